"""Checks for the structural and statistical assumptions the attack rests on.

The attack needs the update and inner word to be T-functions (verified
structurally, trial by trial), truncated evaluation to agree with full
evaluation, and outputs to look mildly random; the latter has no formal
definition, so we measure zero frequency and cycle lengths instead.

All checks are deterministic: trial i of a run seeded with s draws from a
stream that depends only on (s, i), so trials can be partitioned across
workers in any way without changing the report.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

from .generator import (
    ColumnPrefix,
    GeneratorInstance,
    Keystream,
    State,
    Tf1Params,
    demo_generalized_instance,
    state_prefix,
    tf1_instance,
    update,
)
from .rng import trial_rng
from .word import WordSpec, low_mask

__all__ = [
    "PropertyReport",
    "check_tfunction_property",
    "check_truncation_consistency",
    "zero_frequency",
    "cycle_probe",
]


@dataclass(frozen=True)
class PropertyReport:
    trials: int
    failures: int
    first_witness: tuple | None = None

    def __post_init__(self) -> None:
        if self.failures > self.trials:
            raise ValueError("failures cannot exceed trials")
        if (self.failures > 0) != (self.first_witness is not None):
            raise ValueError("witness must be present exactly when failures > 0")

    @property
    def ok(self) -> bool:
        return self.failures == 0


def _random_state(rng, mask: int) -> State:
    return State(rng.next64() & mask, rng.next64() & mask, rng.next64() & mask, rng.next64() & mask)


def _agree_low_columns(x, y, k: int) -> bool:
    m = low_mask(k)
    if isinstance(x, State):
        return all((xv & m) == (yv & m) for xv, yv in zip(x.words(), y.words()))
    return (x & m) == (y & m)


def check_tfunction_property(
    target: str | Callable,
    spec: WordSpec,
    params: Tf1Params,
    trials: int,
    rng_seed: int,
) -> PropertyReport:
    """Trial-by-trial check that the target's first k columns ignore the rest.

    Each trial draws a state X, a column count k, and a Y that agrees with X
    on columns 1..k but is redrawn above; the outputs must agree on columns
    1..k.  ``target`` is one of "t1", "t2", "t2_demo" or any callable from
    State to State or to a word.
    """
    if trials < 1:
        raise ValueError("trials must be >= 1")
    fn = _resolve_target(target, spec, params)
    w = spec.width
    mask = spec.mask
    failures = 0
    witness = None
    for i in range(trials):
        rng = trial_rng(rng_seed, i)
        x = _random_state(rng, mask)
        k = 1 + rng.below(w)
        keep = low_mask(k)
        flip = mask & ~keep
        y = State(
            (x.a & keep) | (rng.next64() & flip),
            (x.b & keep) | (rng.next64() & flip),
            (x.c & keep) | (rng.next64() & flip),
            (x.d & keep) | (rng.next64() & flip),
        )
        if not _agree_low_columns(fn(x), fn(y), k):
            failures += 1
            if witness is None:
                witness = (x, y, k)
    return PropertyReport(trials=trials, failures=failures, first_witness=witness)


def _resolve_target(target, spec: WordSpec, params: Tf1Params) -> Callable:
    if callable(target):
        return target
    if target == "t1":
        return lambda st: update(st, params)
    if target == "t2":
        return tf1_instance(params).t2
    if target == "t2_demo":
        return demo_generalized_instance(spec, params).t2
    raise ValueError(f"unknown target {target!r}; expected t1, t2, t2_demo or a callable")


def check_truncation_consistency(
    instance: GeneratorInstance,
    spec: WordSpec,
    trials: int,
    rng_seed: int,
) -> PropertyReport:
    """Truncated t1/t2 must equal the low columns of the full evaluation."""
    if trials < 1:
        raise ValueError("trials must be >= 1")
    if instance.spec != spec:
        raise ValueError("instance was built for a different word spec")
    w = spec.width
    mask = spec.mask
    failures = 0
    witness = None
    for i in range(trials):
        rng = trial_rng(rng_seed, i)
        x = _random_state(rng, mask)
        l = 1 + rng.below(w)
        prefix = state_prefix(x, l)
        m = low_mask(l)
        t1_ok = instance.t1_trunc(prefix) == state_prefix(instance.t1(x), l)
        t2_ok = instance.t2_trunc(prefix) == (instance.t2(x) & m)
        if not (t1_ok and t2_ok):
            failures += 1
            if witness is None:
                witness = (x, l)
    return PropertyReport(trials=trials, failures=failures, first_witness=witness)


def zero_frequency(ks: Keystream) -> tuple[int, float]:
    """Count of exact-zero words and their rate; expectation is 2**-w per word."""
    if len(ks) == 0:
        raise ValueError("keystream is empty")
    zeros = sum(1 for word in ks.words if word == 0)
    return zeros, zeros / len(ks)


def cycle_probe(
    seed: State,
    params: Tf1Params,
    max_steps: int,
) -> tuple[bool, int | None]:
    """Find the orbit's cycle length in constant memory, within a step budget.

    Brent's method: the stationary pointer teleports to the moving one at
    power-of-two intervals while the moving pointer steps once per update
    evaluation.  At most about 2*(tail + cycle) evaluations are needed, so a
    w-bit generator always resolves within a 2**(4w+1) budget.
    """
    if max_steps < 1:
        raise ValueError("max_steps must be >= 1")
    power = 1
    length = 1
    tortoise = seed
    hare = update(seed, params)
    steps = 1
    while tortoise != hare:
        if steps >= max_steps:
            return False, None
        if power == length:
            tortoise = hare
            power <<= 1
            length = 0
        hare = update(hare, params)
        steps += 1
        length += 1
    return True, length
