"""Cross-check every bundled machine against its compiled IAM.

    python3 scripts/crosscheck_corpus.py --bound w*2+50 --tape-bound w+20
"""

import argparse
import time
from dataclasses import dataclass
from typing import Optional

from transfinite import corpus
from transfinite.harness import crosscheck
from transfinite.ordinal import parse_ordinal


@dataclass
class Config:
    bound: str = "w*2+50"
    tape_bound: Optional[str] = "w+20"
    names: tuple = ()


def main(cfg: Config) -> int:
    entries = [corpus.get(n) for n in cfg.names] if cfg.names else corpus.ENTRIES
    bad = 0
    t0 = time.perf_counter()
    for e in entries:
        rep = crosscheck(e.program, e.input_ordinal, parse_ordinal(cfg.bound),
                         tapes=cfg.tape_bound is not None,
                         tape_bound=parse_ordinal(cfg.tape_bound) if cfg.tape_bound else None)
        print("\n".join(rep.lines()))
        bad += not rep.ok
    print(f"{len(entries) - bad}/{len(entries)} agree in {time.perf_counter() - t0:.1f}s")
    return 1 if bad else 0


if __name__ == "__main__":
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("names", nargs="*")
    ap.add_argument("--bound", default=Config.bound)
    ap.add_argument("--tape-bound", default=Config.tape_bound, help="'none' skips the tapes")
    a = ap.parse_args()
    tb = None if a.tape_bound.lower() == "none" else a.tape_bound
    raise SystemExit(main(Config(a.bound, tb, tuple(a.names))))
