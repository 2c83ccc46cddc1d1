"""Bundled single-tape machines used by the cross-checks."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from .ordinal import Ordinal, parse_ordinal
from .otm import OtmProgram, parse_program


@dataclass(frozen=True)
class Entry:
    name: str
    text: str
    input: Optional[str] = None  # ordinal text, fed as chi_alpha
    note: str = ""

    @property
    def program(self) -> OtmProgram:
        return parse_program(self.text, self.name)

    @property
    def input_ordinal(self) -> Optional[Ordinal]:
        return None if self.input is None else parse_ordinal(self.input)


def _t(states, halt, *rules):
    return "\n".join([f"states: {states}", f"halt: {halt}", *rules]) + "\n"


SUCCESSOR = _t(2, 1, "0 1 -> 1 R 0", "0 0 -> 1 R 1")

ENTRIES = [
    Entry("sweep_ones", _t(2, 1, "0 0 -> 1 R 0", "0 1 -> 1 R 0"), note="writes 1 moving right forever"),
    Entry("sweep_zeros", _t(2, 1, "0 0 -> 0 R 0", "0 1 -> 0 R 0"), "w+2", "erases while sweeping"),
    Entry("blinker", _t(2, 1, "0 0 -> 1 L 0", "0 1 -> 0 L 0"), note="flips cell 0 forever"),
    Entry("halt_now", _t(2, 1, "0 0 -> 0 R 1", "0 1 -> 1 R 1"), note="halts after one step"),
    Entry("count_to_three", _t(4, 3, "0 0 -> 1 R 1", "0 1 -> 1 R 1", "1 0 -> 1 R 2",
                               "1 1 -> 1 R 2", "2 0 -> 1 R 3", "2 1 -> 1 R 3"),
          note="writes three ones and halts"),
    Entry("successor", SUCCESSOR, "3", "chi_a to chi_(a+1)"),
    Entry("successor_limit", SUCCESSOR, "w", "successor on a limit input"),
    Entry("successor_big", SUCCESSOR, "w+3"),
    Entry("alternator", _t(3, 2, "0 0 -> 1 R 1", "0 1 -> 1 R 1", "1 0 -> 0 R 0", "1 1 -> 0 R 0"),
          note="writes 1010... with oscillating state"),
    Entry("period_three", _t(4, 3, "0 0 -> 1 R 1", "0 1 -> 1 R 1", "1 0 -> 0 R 2",
                             "1 1 -> 0 R 2", "2 0 -> 1 R 0", "2 1 -> 1 R 0")),
    Entry("state_blinker", _t(3, 2, "0 0 -> 0 L 1", "0 1 -> 1 L 1", "1 0 -> 0 L 0", "1 1 -> 1 L 0"),
          note="state alternates, tape idle"),
    Entry("bouncer", _t(3, 2, "0 0 -> 1 R 1", "0 1 -> 1 R 1", "1 0 -> 0 L 0", "1 1 -> 0 L 0"),
          note="head shuttles between cells 0 and 1"),
    Entry("inverter", _t(2, 1, "0 0 -> 1 R 0", "0 1 -> 0 R 0"), "w", "inverts while sweeping"),
    Entry("skip_ones", _t(2, 1, "0 1 -> 1 R 0", "0 0 -> 0 R 1"), "5", "halts on the first 0"),
    Entry("skip_ones_limit", _t(2, 1, "0 1 -> 1 R 0", "0 0 -> 0 R 1"), "w+2"),
    Entry("double_sweep", _t(3, 2, "0 0 -> 1 R 1", "0 1 -> 1 R 1", "1 0 -> 1 R 0", "1 1 -> 1 R 0")),
    Entry("left_eraser", _t(2, 1, "0 0 -> 0 L 0", "0 1 -> 0 L 0"), "4", "clears cell 0 and idles"),
    Entry("flip_skip", _t(3, 2, "0 0 -> 1 R 1", "0 1 -> 0 R 1", "1 0 -> 0 R 0", "1 1 -> 1 R 0"), "w"),
    Entry("four_cycle", _t(5, 4, "0 0 -> 1 R 1", "0 1 -> 0 R 1", "1 0 -> 1 R 2", "1 1 -> 1 R 2",
                           "2 0 -> 0 R 3", "2 1 -> 0 R 3", "3 0 -> 0 R 0", "3 1 -> 1 R 0")),
    Entry("mark_and_halt", _t(2, 1, "0 0 -> 1 L 0", "0 1 -> 1 R 1"), note="halts at time 2"),
    Entry("pair_blinker", _t(3, 2, "0 0 -> 1 R 1", "0 1 -> 0 R 1", "1 0 -> 1 L 0", "1 1 -> 0 L 0"),
          note="flips cells 0 and 1 alternately"),
    Entry("sweep_over_input", _t(2, 1, "0 0 -> 1 R 0", "0 1 -> 1 R 0"), "w+1"),
]

BY_NAME = {e.name: e for e in ENTRIES}


def get(name: str) -> Entry:
    try:
        return BY_NAME[name]
    except KeyError:
        raise KeyError(f"no corpus entry named {name!r}") from None
