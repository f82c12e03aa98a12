"""Compare the prover against direct evaluation on seeded random inputs.

Prints disagreements, timing and how often each proof rule fired in
derivations of formulae that hold.
"""

import argparse
import collections
import random
import time
from dataclasses import dataclass, field

from chorcheck.checker import entails
from chorcheck.generators import GeneratorConfig, random_choreography, random_formula, random_state
from chorcheck.oracle import satisfies_naive
from chorcheck.semantics import Configuration
from chorcheck.syntax import print_choreography, print_formula


@dataclass
class SweepConfig:
    seed: int = 0
    cases: int = 500
    gen: GeneratorConfig = field(default_factory=GeneratorConfig)


def rules(proof, counter):
    counter[proof.rule] += 1
    for p in proof.premises:
        rules(p, counter)


def sweep(cfg: SweepConfig) -> dict:
    rng = random.Random(cfg.seed)
    used = collections.Counter()
    disagreements, holds, worst = [], 0, 0.0
    t0 = time.perf_counter()
    for i in range(cfg.cases):
        c = random_choreography(rng, cfg.gen)
        conf = Configuration(random_state(rng, cfg.gen), c)
        f = random_formula(rng, cfg.gen, c)
        t = time.perf_counter()
        v = entails(conf, f, witness=True)
        worst = max(worst, time.perf_counter() - t)
        if v.holds:
            holds += 1
            rules(v.witness, used)
        if v.holds != satisfies_naive(conf, f):
            disagreements.append((i, print_choreography(c), print_formula(f)))
    return {
        "disagreements": disagreements,
        "holds": holds,
        "worst": worst,
        "elapsed": time.perf_counter() - t0,
        "rules": used,
    }


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--cases", type=int, default=500)
    args = ap.parse_args()
    r = sweep(SweepConfig(seed=args.seed, cases=args.cases))
    for i, c, f in r["disagreements"]:
        print(f"DISAGREE #{i}: {c}  |=  {f}")
    print(f"cases {args.cases}, holds {r['holds']}, disagreements {len(r['disagreements'])}")
    print(f"slowest call {r['worst'] * 1000:.1f} ms, total {r['elapsed']:.2f} s")
    for rule, n in sorted(r["rules"].items()):
        print(f"  {rule:<9} {n}")


if __name__ == "__main__":
    main()
