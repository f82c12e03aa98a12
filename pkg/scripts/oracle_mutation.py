"""Check that the oracle comparison notices broken proof rules.

Each mutant replaces one rule of the prover with a plausible but wrong
version; a useful oracle sweep must report disagreements for all of them.
"""

import argparse
import random

from chorcheck import checker
from chorcheck import formulas as F
from chorcheck.generators import random_choreography, random_formula, random_state
from chorcheck.oracle import satisfies_naive
from chorcheck.semantics import Configuration

ORIGINAL = checker._Prover._prove


def par_left_only(self, cfg, f):
    # forgets to split: both operands see the whole term
    if isinstance(f, F.ParF):
        p = self.prove(cfg, f.left)
        return p and self.prove(cfg, f.right)
    return ORIGINAL(self, cfg, f)


def may_no_steps(self, cfg, f):
    # only looks at the current configuration
    if isinstance(f, F.May):
        return self.prove(cfg, f.body)
    return ORIGINAL(self, cfg, f)


def exists_first_only(self, cfg, f):
    # tries a single candidate witness
    if isinstance(f, F.Exists):
        domain = checker.quantifier_domain(cfg, f.body, f.sort)[:1]
        for w in domain:
            return self.prove(cfg, F.substitute(f.body, f.var, f.sort, w))
        return None
    return ORIGINAL(self, cfg, f)


def end_single_component(self, cfg, f):
    # treats every single-component term as finished
    if isinstance(f, F.EndF):
        parts = checker.norm(cfg.chor)
        return self.mark("P_end") if len(parts) <= 1 else None
    return ORIGINAL(self, cfg, f)


MUTANTS = {
    "par": par_left_only,
    "may": may_no_steps,
    "exists": exists_first_only,
    "end": end_single_component,
}


def count_disagreements(seed: int, cases: int) -> int:
    rng = random.Random(seed)
    n = 0
    for _ in range(cases):
        c = random_choreography(rng)
        conf = Configuration(random_state(rng), c)
        f = random_formula(rng, None, c)
        n += checker.entails(conf, f).holds != satisfies_naive(conf, f)
    return n


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--cases", type=int, default=500)
    args = ap.parse_args()
    try:
        print(f"{'original':<8} {count_disagreements(args.seed, args.cases)}")
        for name, mutant in MUTANTS.items():
            checker._Prover._prove = mutant
            print(f"{name:<8} {count_disagreements(args.seed, args.cases)}")
    finally:
        checker._Prover._prove = ORIGINAL


if __name__ == "__main__":
    main()
