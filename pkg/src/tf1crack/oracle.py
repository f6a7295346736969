"""Exhaustive ground truth at tiny widths, for certifying the attack.

The oracle shares nothing with the attack's search machinery: it considers
the complete 2**(4w) state space and keeps every state that emits the zero
word at the given position and reproduces the requested window after it.
At w=4 that is 65536 states and runs in a fraction of a second; w=8 costs
minutes and must be requested explicitly via the budget.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator

import numpy as np

from .attack import AttackReport
from .generator import Keystream, State, Tf1Params, output_word, update
from .word import WordSpec

__all__ = ["BudgetExceeded", "OracleResult", "brute_force_consistent_states", "compare_with_report"]

_DEFAULT_BUDGET = 1 << 16  # covers w=4 exhaustively
_SCALAR_SPACE = 1 << 16  # widths whose full space is walked one state at a time


class BudgetExceeded(Exception):
    """The state space is larger than the allowed enumeration budget."""


@dataclass
class OracleResult:
    consistent_states: list[State]
    window: int
    states_scanned: int
    zero_index: int


def brute_force_consistent_states(
    ks: Keystream,
    zero_index: int,
    params: Tf1Params,
    window: int,
    budget: int | None = None,
) -> OracleResult:
    """Scan every possible state and keep the ones consistent with the keystream.

    A state is consistent when its own output is the (zero) word at
    ``zero_index`` and rolling it forward reproduces the next ``window``
    words.  Indexing matches the attack: the state checked is the
    post-update state at the zero position.
    """
    spec = params.spec
    w = spec.width
    if w > 8:
        raise ValueError("the exhaustive oracle is limited to widths 4 and 8 by design")
    if zero_index < 0 or window < 0 or zero_index + window >= len(ks):
        raise ValueError("verification window exceeds the keystream")
    if ks.words[zero_index] != 0:
        raise ValueError(f"keystream word at {zero_index} is not zero")
    space = 1 << (4 * w)
    allowed = _DEFAULT_BUDGET if budget is None else budget
    if space > allowed:
        raise BudgetExceeded(
            f"state space 2^{4 * w} = {space} exceeds the budget of {allowed}; "
            "pass an explicit budget to allow it"
        )

    words = ks.words
    consistent: list[State] = []
    scan = _scan_zero_states_scalar if space <= _SCALAR_SPACE else _scan_zero_states_chunked
    for st in scan(spec):
        rolled = st
        ok = True
        for j in range(1, window + 1):
            rolled = update(rolled, params)
            if output_word(rolled, spec) != words[zero_index + j]:
                ok = False
                break
        if ok:
            consistent.append(st)
    consistent.sort()
    return OracleResult(
        consistent_states=consistent,
        window=window,
        states_scanned=space,
        zero_index=zero_index,
    )


def compare_with_report(report: AttackReport, oracle: OracleResult) -> bool:
    """True iff the attack recovered exactly the oracle's consistent states.

    Both sides must describe the same zero position and verification window;
    anything else is an apples-to-oranges comparison and raises.
    """
    if report.zero_index != oracle.zero_index:
        raise ValueError(
            f"zero positions differ: report {report.zero_index}, oracle {oracle.zero_index}"
        )
    if report.verified_words != oracle.window:
        raise ValueError(
            f"verification windows differ: report {report.verified_words}, oracle {oracle.window}"
        )
    return list(report.recovered) == oracle.consistent_states


def _scan_zero_states_scalar(spec: WordSpec) -> Iterator[State]:
    """Every state with output word zero, by walking the whole space."""
    n = 1 << spec.width
    rng = range(n)
    for a in rng:
        for b in rng:
            for c in rng:
                for d in rng:
                    st = State(a, b, c, d)
                    if output_word(st, spec) == 0:
                        yield st


def _scan_zero_states_chunked(spec: WordSpec) -> Iterator[State]:
    """Same zero-output scan, batched so the w=8 space stays affordable.

    States are indexed (a << 3w) | (b << 2w) | (c << w) | d and visited in
    the same ascending order as the scalar walk.
    """
    w = spec.width
    mask = np.uint64(spec.mask)
    h = np.uint64(spec.half)
    one = np.uint64(1)
    space = 1 << (4 * w)
    chunk = 1 << 22
    for start in range(0, space, chunk):
        idx = np.arange(start, min(start + chunk, space), dtype=np.uint64)
        a = idx >> np.uint64(3 * w)
        b = (idx >> np.uint64(2 * w)) & mask
        c = (idx >> np.uint64(w)) & mask
        d = idx & mask
        x = (a + c) & mask
        sx = (x >> h) | ((x << h) & mask)
        y = (b + d) & mask
        sy = (y >> h) | ((y << h) & mask)
        out = (sx * (sy | one)) & mask
        for i in idx[out == 0].tolist():
            yield State(i >> (3 * w), (i >> (2 * w)) & spec.mask, (i >> w) & spec.mask, i & spec.mask)
