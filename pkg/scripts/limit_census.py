"""Sample random small machines and tally how their first limit is reached.

Each machine is run to omega.  Runs end in one of: halted, a cycle lasso,
a translation lasso, or no lasso found within the step budget.
"""

import argparse
import random
from collections import Counter
from dataclasses import dataclass

from transfinite import otm
from transfinite.lasso import AccelerationFailure
from transfinite.ordinal import OMEGA


@dataclass
class Config:
    machines: int = 200
    states: int = 3
    step_budget: int = 300
    seed: int = 0


def random_machine(rng: random.Random, states: int) -> str:
    halt = states
    rules = [f"{q} {s} -> {rng.choice('01')} {rng.choice('LR')} {rng.randint(0, halt)}"
             for q in range(states) for s in "01"]
    return "\n".join([f"states: {states + 1}", f"halt: {halt}", *rules]) + "\n"


def main(cfg: Config) -> int:
    rng = random.Random(cfg.seed)
    tally = Counter()
    for _ in range(cfg.machines):
        p = otm.parse_program(random_machine(rng, cfg.states))
        try:
            rep = otm.run(p, bound=OMEGA, step_budget=cfg.step_budget)
        except AccelerationFailure:
            tally["no lasso"] += 1
            continue
        tally["halted" if rep.halted else rep.segments[0].cert.kind] += 1
    for k, v in sorted(tally.items()):
        print(f"{k:>12} {v}")
    return 0


if __name__ == "__main__":
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    for f in Config.__dataclass_fields__.values():
        ap.add_argument("--" + f.name.replace("_", "-"), type=int, default=f.default)
    raise SystemExit(main(Config(**vars(ap.parse_args()))))
