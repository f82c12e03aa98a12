"""Write the PCP encodings used as golden files (corpus/pcp/pcp_n{1..5}.gc)."""

import argparse
from pathlib import Path

from chorcheck.pcp import DEMO_INSTANCES as INSTANCES
from chorcheck.pcp import PcpInstance, encode_pcp, pcp_formula
from chorcheck.syntax import Document, print_document


def render(n: int) -> str:
    inst = PcpInstance.parse(INSTANCES[n])
    cfg = encode_pcp(inst)
    doc = Document()
    doc.state = cfg.state
    doc.choreographies[f"pcp{n}"] = cfg.chor
    doc.formulas["solution"] = pcp_formula()
    return f"// PCP encoding of {inst}\n" + print_document(doc)


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out", default=str(Path(__file__).resolve().parent.parent / "corpus" / "pcp"))
    args = ap.parse_args()
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    for n in INSTANCES:
        path = out / f"pcp_n{n}.gc"
        path.write_text(render(n), encoding="utf-8")
        print(f"wrote {path}")


if __name__ == "__main__":
    main()
