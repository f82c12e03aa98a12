"""Run bounded PCP search at increasing depths and tabulate the outcome."""

import argparse

from chorcheck.pcp import DEMO_INSTANCES, PcpInstance, bounded_search


def scan(inst: PcpInstance, depths):
    for d in depths:
        r = bounded_search(inst, d)
        yield d, r


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--pairs", action="append", help="instance s1:t1,...; repeatable (default: the demo instances)")
    ap.add_argument("--max-depth", type=int, default=9)
    ap.add_argument("--step", type=int, default=2)
    ap.add_argument("--stop-on-solution", action="store_true")
    args = ap.parse_args()
    instances = args.pairs or list(DEMO_INSTANCES.values())
    print(f"{'instance':<28} {'depth':>5} {'explored':>9} {'time/s':>8}  result")
    for text in instances:
        inst = PcpInstance.parse(text)
        for d, r in scan(inst, range(1, args.max_depth + 1, args.step)):
            result = f"solved {r.indices()} in {len(r.trace)} steps" if r.solved else "-"
            print(f"{text:<28} {d:>5} {r.explored:>9} {r.elapsed:>8.2f}  {result}")
            if r.solved and args.stop_on_solution:
                break


if __name__ == "__main__":
    main()
