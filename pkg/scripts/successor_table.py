"""Run the compiled successor machine on a few ordinals and print the answers."""

import argparse
from dataclasses import dataclass, field

from transfinite import bridge, corpus, iam, otm
from transfinite.ordinal import OMEGA, parse_ordinal


@dataclass
class Config:
    inputs: list = field(default_factory=lambda: ["0", "1", "5", "w", "w+3", "w*2", "w*3+1"])


def main(cfg: Config) -> int:
    prog = bridge.compile_otm(otm.parse_program(corpus.SUCCESSOR, "successor"))
    wrong = 0
    for text in cfg.inputs:
        a = parse_ordinal(text)
        rep = iam.run(prog, iam.IamRunOptions(input=a, bound=a + OMEGA))
        got = iam.decode_function_answer(rep)
        wrong += got != a.succ()
        print(f"{str(a):>8} -> {got}  (halted at {rep.halt_time})")
    return 1 if wrong else 0


if __name__ == "__main__":
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("inputs", nargs="*")
    a = ap.parse_args()
    raise SystemExit(main(Config(a.inputs) if a.inputs else Config()))
