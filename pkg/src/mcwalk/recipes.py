"""Entanglement-generation pipelines built on the multi-coin walk.

Each recipe prepares its initial product of entangled pairs/GHZ blocks,
runs the walk with particle 1 as the walker, measures particles 2 and 3 in
the computational basis and compares every residual with its closed form.

Particles are numbered from 1 as in the usual diagrams of these schemes
(particle ``p`` lives on register subsystem ``p - 1``). Closed-form
targets carry the phase the projection leaves on the residual, so
``amplitude_error`` checks them amplitude-wise while
``fidelity_to_target`` ignores global phase.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .analysis import concurrence, entanglement_entropy
from .statevec import (
    NORM_TOL,
    GeneralizedBellLabel,
    MeasurementRecord,
    PureState,
    encode_index,
    make_generalized_bell,
    make_ghz,
    make_pair,
    make_schmidt_pair,
    measure_enumerate,
    tensor,
)
from .walk import GraphKind, WalkSchedule, coin_from_symbol, haar_unitary, build_coin, run_schedule

WALKER = 1
MEASURED = (2, 3)
BELL_VARIANTS = ("IHX", "IXH", "XXH", "XHX")
CIRCLE_CASES = ("two_qubit_3coins", "ghz_4coins")

# Residual on particles (1, 4) for each outcome (q2, q3) of the t=3 walk on
# the 2-complete graph, up to normalization.  IHX is the regrouped final
# state of the I, H, X_2 schedule; the others follow the same derivation.
_BELL_2COMPLETE_FORMS: dict[str, dict[tuple[int, int], Callable]] = {
    "IHX": {
        (0, 0): lambda a, b: {(1, 0): a * b, (0, 1): b * b},
        (0, 1): lambda a, b: {(0, 0): a * b, (1, 1): -b * b},
        (1, 0): lambda a, b: {(1, 0): a * a, (0, 1): a * b},
        (1, 1): lambda a, b: {(0, 0): a * a, (1, 1): -a * b},
    },
    "IXH": {
        (0, 0): lambda a, b: {(1, 0): b * b, (0, 1): b * b},
        (0, 1): lambda a, b: {(0, 0): a * b, (1, 1): -a * b},
        (1, 0): lambda a, b: {(1, 0): a * b, (0, 1): a * b},
        (1, 1): lambda a, b: {(0, 0): a * a, (1, 1): -a * a},
    },
    "XXH": {
        (0, 0): lambda a, b: {(0, 0): a * b, (1, 1): a * b},
        (0, 1): lambda a, b: {(1, 0): a * a, (0, 1): -a * a},
        (1, 0): lambda a, b: {(0, 0): b * b, (1, 1): b * b},
        (1, 1): lambda a, b: {(1, 0): a * b, (0, 1): -a * b},
    },
    "XHX": {
        (0, 0): lambda a, b: {(0, 0): a * a, (1, 1): a * b},
        (0, 1): lambda a, b: {(1, 0): a * a, (0, 1): -a * b},
        (1, 0): lambda a, b: {(0, 0): a * b, (1, 1): b * b},
        (1, 1): lambda a, b: {(1, 0): a * b, (0, 1): -b * b},
    },
}


@dataclass(frozen=True, eq=False)
class RecipeOutcome:
    record: MeasurementRecord
    target_particles: tuple[int, ...]
    achieved: PureState
    target: PureState
    target_form: str
    fidelity_to_target: float
    amplitude_error: float

    @property
    def outcome(self) -> tuple[int, ...]:
        return self.record.outcome

    @property
    def prob(self) -> float:
        return self.record.prob

    def to_dict(self) -> dict:
        return {
            "outcome": list(self.record.outcome),
            "measured_particles": [i + 1 for i in self.record.measured],
            "prob": float(self.record.prob),
            "target_particles": list(self.target_particles),
            "target_form": self.target_form,
            "fidelity_to_target": float(self.fidelity_to_target),
            "amplitude_error": float(self.amplitude_error),
            "achieved": self.achieved.to_dict(),
        }


@dataclass(frozen=True)
class RecipeSetup:
    """Initial state, schedule and particle roles of one recipe."""

    initial: PureState
    schedule: WalkSchedule
    measured: tuple[int, ...] = MEASURED

    @property
    def targets(self) -> tuple[int, ...]:
        roles = set(self.measured)
        return tuple(p for p in range(1, self.initial.n + 1) if p not in roles)

    def final_state(self) -> PureState:
        return run_schedule(self.initial, self.schedule)


def _schedule(kind: str, n: int, symbols: Sequence[str], coins: Sequence[int]) -> WalkSchedule:
    graph = GraphKind(kind, n)
    ops = tuple(coin_from_symbol(s, graph.coin_dim) for s in symbols)
    return WalkSchedule(graph, WALKER - 1, tuple(p - 1 for p in coins), ops, len(ops))


def _state_from_terms(dims, terms: dict[tuple[int, ...], complex]) -> PureState:
    amps = np.zeros(int(np.prod(dims)), dtype=np.complex128)
    for digits, c in terms.items():
        amps[encode_index(digits, dims)] += c
    return PureState.from_unnormalized(dims, amps)


def _outcome(record: MeasurementRecord, targets, target: PureState, form: str) -> RecipeOutcome:
    achieved = record.residual
    return RecipeOutcome(
        record=record,
        target_particles=tuple(targets),
        achieved=achieved,
        target=target,
        target_form=form,
        fidelity_to_target=achieved.fidelity(target),
        amplitude_error=float(np.max(np.abs(achieved.amps - target.amps))),
    )


def run_setup(setup: RecipeSetup, target_of: Callable[[tuple[int, ...]], tuple[PureState, str]]) -> list[RecipeOutcome]:
    """Walk, enumerate the measurement and score every residual."""
    final = setup.final_state()
    records = measure_enumerate(final, [p - 1 for p in setup.measured])
    return [_outcome(r, setup.targets, *target_of(r.outcome)) for r in records]


def _phase(c: complex) -> complex:
    return c / abs(c)


# -- two qubits ---------------------------------------------------------------


def bell_2line_setup(a: complex, b: complex) -> RecipeSetup:
    pair = make_pair(a, b)
    return RecipeSetup(tensor([pair, pair]), _schedule("line", 2, "HI", (2, 3, 4)))


def bell_2line(a: complex, b: complex) -> list[RecipeOutcome]:
    """Two steps on the 2-line with coins H then I.

    Every outcome leaves ``a|11> + b|00>`` on particles (1, 4).
    """
    a, b = complex(a), complex(b)
    setup = bell_2line_setup(a, b)
    weight = {(0, 0): -a, (0, 1): a, (1, 0): b, (1, 1): b}
    base = _state_from_terms((2, 2), {(1, 1): a, (0, 0): b})

    def target_of(outcome):
        return PureState(base.dims, _phase(weight[outcome]) * base.amps), "a|11>+b|00>"

    return run_setup(setup, target_of)


def bell_2complete_setup(a: complex, b: complex, variant: str = "IHX") -> RecipeSetup:
    if variant not in BELL_VARIANTS:
        raise ValueError(f"unknown coin variant {variant!r}; choose from {BELL_VARIANTS}")
    pair = make_pair(a, b)
    return RecipeSetup(tensor([pair, pair]), _schedule("complete", 2, variant, (2, 3, 4)))


def bell_2complete(a: complex, b: complex, variant: str = "IHX") -> list[RecipeOutcome]:
    """Three steps on the 2-complete graph; coins step-by-step from ``variant``."""
    a, b = complex(a), complex(b)
    setup = bell_2complete_setup(a, b, variant)
    forms = _BELL_2COMPLETE_FORMS[variant]

    def target_of(outcome):
        terms = forms[outcome](a, b)
        label = " ".join(f"{round(c.real, 12) + 0.0:+.6g}{round(c.imag, 12) + 0.0:+.6g}j|{q1}{q4}>" for (q1, q4), c in terms.items())
        return _state_from_terms((2, 2), terms), f"{variant}: {label}"

    return run_setup(setup, target_of)


# -- two qudits ---------------------------------------------------------------


def swap_label(first: GeneralizedBellLabel, second: GeneralizedBellLabel, outcome: Sequence[int]) -> GeneralizedBellLabel:
    """Label left on (walker, last coin) after the I, F, X_d walk.

    ``first`` is the walker's pair, ``outcome`` the digits read on the two
    middle qudits, i.e. ``(m - y, p)``.
    """
    d = first.d
    m = outcome[0] + first.l
    p = outcome[1]
    return GeneralizedBellLabel.wrap(d, second.k + p, 2 * m + p - first.l)


def swap_residual(first: GeneralizedBellLabel, second: GeneralizedBellLabel, outcome: Sequence[int]) -> PureState:
    """Closed-form residual of the qudit swap, phases included.

    The phase splits into the outcome phase exp(2 pi i m x / d) carried by
    the measured ket and the reduced-state phase
    exp(-2 pi i (2m + p - y - l + 1)(k + p) / d).
    """
    d = first.d
    x, y, k, l = first.k, first.l, second.k, second.l  # noqa: E741
    m = outcome[0] + y
    p = outcome[1]
    outcome_phase = np.exp(2j * np.pi * m * x / d)
    reduced_phase = np.exp(-2j * np.pi * (2 * m + p - y - l + 1) * (k + p) / d)
    bell = make_generalized_bell(swap_label(first, second, outcome))
    return PureState(bell.dims, outcome_phase * reduced_phase * bell.amps)


def qudit_pair_setup(d: int, first, second=None) -> RecipeSetup:
    """``first``/``second`` are Bell labels or Schmidt coefficient lists."""
    if d < 2:
        raise ValueError(f"qudit recipes need d >= 2, got {d}")
    second = first if second is None else second

    def pair(source):
        if isinstance(source, GeneralizedBellLabel):
            if source.d != d:
                raise ValueError(f"label dimension {source.d} does not match d={d}")
            return make_generalized_bell(source)
        coeffs = np.asarray(source, dtype=np.complex128)
        if coeffs.shape != (d,):
            raise ValueError(f"expected {d} Schmidt coefficients, got shape {coeffs.shape}")
        return make_schmidt_pair(coeffs)

    return RecipeSetup(tensor([pair(first), pair(second)]), _schedule("complete", d, "IFX", (2, 3, 4)))


def qudit_pair_dcomplete(d: int, first, second=None) -> list[RecipeOutcome]:
    """Three steps on the d-complete graph with coins I, F, X_d.

    With generalized Bell inputs the residual on (1, 4) is again a
    generalized Bell state whose label and phase follow :func:`swap_label`
    and :func:`swap_residual`. With Schmidt-form inputs ``sum a_i|ii>`` and
    ``sum b_j|jj>`` the outcome ``(i, k)`` leaves
    ``sum_j b_j w^(jk) |2i + j + k + 1>|j + 1>`` up to the phase of ``a_i``.
    """
    second = first if second is None else second
    setup = qudit_pair_setup(d, first, second)
    if isinstance(first, GeneralizedBellLabel) and isinstance(second, GeneralizedBellLabel):

        def target_of(outcome):
            return swap_residual(first, second, outcome), str(swap_label(first, second, outcome))

        return run_setup(setup, target_of)

    if isinstance(first, GeneralizedBellLabel) or isinstance(second, GeneralizedBellLabel):
        raise ValueError("mix of Bell-label and Schmidt-coefficient inputs is not supported")
    a = np.asarray(first, dtype=np.complex128)
    b = np.asarray(second, dtype=np.complex128)
    w = np.exp(2j * np.pi / d)

    def target_of(outcome):
        i, k = outcome
        terms = {}
        for j in range(d):
            key = ((2 * i + j + k + 1) % d, (j + 1) % d)
            terms[key] = terms.get(key, 0) + _phase(a[i]) * b[j] * w ** (j * k)
        return _state_from_terms((d, d), terms), f"sum_j b_j w^(j*{k})|{2 * i + k + 1}+j,1+j>"

    return run_setup(setup, target_of)


# -- three-party GHZ ----------------------------------------------------------


def ghz_2line_setup(a: complex, b: complex) -> RecipeSetup:
    return RecipeSetup(tensor([make_pair(a, b), make_ghz(2, 3)]), _schedule("line", 2, "HX", (2, 3, 4, 5)))


def ghz_2line(a: complex, b: complex) -> list[RecipeOutcome]:
    """Two steps on the 2-line with coins H then X; always leaves GHZ on (1, 4, 5)."""
    a, b = complex(a), complex(b)
    setup = ghz_2line_setup(a, b)
    weight = {(0, 0): -a, (0, 1): a, (1, 0): b, (1, 1): b}
    ghz = make_ghz(2, 3)

    def target_of(outcome):
        return PureState(ghz.dims, _phase(weight[outcome]) * ghz.amps), "ghz"

    return run_setup(setup, target_of)


_GHZ_LIKE_EVEN = {(1, 0, 0): 1, (0, 0, 1): 1, (0, 1, 0): 1, (1, 1, 1): 1}
_GHZ_LIKE_ODD = {(0, 0, 0): 1, (1, 0, 1): -1, (1, 1, 0): -1, (0, 1, 1): 1}


def ghz_2complete_setup(a: complex, b: complex) -> RecipeSetup:
    return RecipeSetup(
        tensor([make_pair(a, b), make_ghz(2, 3)]), _schedule("complete", 2, "IIHH", (2, 3, 4, 5))
    )


def ghz_2complete(a: complex, b: complex) -> list[RecipeOutcome]:
    """Four steps on the 2-complete graph with coins I, I, H, H.

    The residual on (1, 4, 5) is one of two GHZ-like states selected by
    the digit read on particle 3.
    """
    a, b = complex(a), complex(b)
    setup = ghz_2complete_setup(a, b)

    def target_of(outcome):
        q2, q3 = outcome
        weight = a if q2 else b
        terms = _GHZ_LIKE_ODD if q3 else _GHZ_LIKE_EVEN
        base = _state_from_terms((2, 2, 2), terms)
        return PureState(base.dims, _phase(weight) * base.amps), f"ghz-like[{'odd' if q3 else 'even'}]"

    return run_setup(setup, target_of)


def ghz_qudit_setup(d: int, label: GeneralizedBellLabel) -> RecipeSetup:
    if d < 2:
        raise ValueError(f"qudit recipes need d >= 2, got {d}")
    if label.d != d:
        raise ValueError(f"label dimension {label.d} does not match d={d}")
    return RecipeSetup(
        tensor([make_generalized_bell(label), make_ghz(d, 3)]),
        _schedule("complete", d, "IIFF", (2, 3, 4, 5)),
    )


def ghz_like_state(d: int, x0: int, n: int = 0) -> PureState:
    """(1/d) sum_{p,q} exp(2 pi i n (p + q) / d) |x0 + p + q, p, q>."""
    terms = {}
    for p in range(d):
        for q in range(d):
            terms[((x0 + p + q) % d, p, q)] = np.exp(2j * np.pi * n * (p + q) / d)
    return _state_from_terms((d, d, d), terms)


def ghz_qudit_dcomplete(d: int, label: GeneralizedBellLabel) -> list[RecipeOutcome]:
    """Four steps on the d-complete graph with coins I, I, F, F.

    Outcome digits ``(m - l, n)`` leave the high-dimensional GHZ-like state
    with ``x0 = 2m - l + n`` on (1, 4, 5), times the outcome phase
    exp(2 pi i m k / d).
    """
    setup = ghz_qudit_setup(d, label)

    def target_of(outcome):
        m = outcome[0] + label.l
        n = outcome[1]
        x0 = (2 * m - label.l + n) % d
        base = ghz_like_state(d, x0, n)
        phase = np.exp(2j * np.pi * m * label.k / d)
        return PureState(base.dims, phase * base.amps), f"ghz-like[d={d}](x0={x0},n={n})"

    return run_setup(setup, target_of)


# -- 2-circle negative results ------------------------------------------------


@dataclass(frozen=True)
class CircleSearchReport:
    case: str
    samples: int
    seed: int
    threshold: float
    max_min_entanglement: float
    max_min_entropy: float
    witness_found: bool

    def to_dict(self) -> dict:
        return {
            "case": self.case,
            "samples": self.samples,
            "seed": self.seed,
            "threshold": self.threshold,
            "max_min_entanglement": self.max_min_entanglement,
            "max_min_entropy": self.max_min_entropy,
            "witness_found": self.witness_found,
        }


def _circle_setup(case: str, coins: Sequence[np.ndarray], a: complex, b: complex) -> RecipeSetup:
    if case == "two_qubit_3coins":
        pair = make_pair(a, b)
        initial, coin_particles = tensor([pair, pair]), (2, 3, 4)
    elif case == "ghz_4coins":
        initial, coin_particles = tensor([make_pair(a, b), make_ghz(2, 3)]), (2, 3, 4, 5)
    else:
        raise ValueError(f"unknown circle case {case!r}; choose from {CIRCLE_CASES}")
    if len(coins) != len(coin_particles):
        raise ValueError(f"case {case!r} needs {len(coin_particles)} coins, got {len(coins)}")
    ops = tuple(build_coin("custom", 2, c) for c in coins)
    schedule = WalkSchedule(GraphKind("circle", 2), WALKER - 1, tuple(p - 1 for p in coin_particles), ops, len(ops))
    return RecipeSetup(initial, schedule)


def circle_min_entanglement(
    case: str, coins: Sequence[np.ndarray], a: complex = 2**-0.5, b: complex = 2**-0.5
) -> tuple[float, float]:
    """Worst-outcome entanglement of the 2-circle walk for one coin tuple.

    Returns ``(primary, entropy)``. For two qubits the primary measure is
    the concurrence of particles (1, 4); for the GHZ case it is the smallest
    single-particle entropy of (1, 4, 5) in bits. ``entropy`` is the
    smallest single-particle entropy in both cases.
    """
    setup = _circle_setup(case, coins, a, b)
    final = setup.final_state()
    primary, entropy = np.inf, np.inf
    for record in measure_enumerate(final, [p - 1 for p in setup.measured]):
        residual = record.residual
        entropies = [entanglement_entropy(residual, [i]) for i in range(residual.n)]
        e = min(entropies)
        c = concurrence(residual) if case == "two_qubit_3coins" else e
        primary, entropy = min(primary, c), min(entropy, e)
    return float(primary), float(entropy)


def circle_search(
    case: str,
    samples: int = 1000,
    seed: int = 0,
    threshold: float = 0.99,
    a: complex = 2**-0.5,
    b: complex = 2**-0.5,
) -> CircleSearchReport:
    """Haar-random search for 2-circle coin tuples that entangle the targets.

    A witness is a coin tuple whose worst outcome still reaches
    ``threshold`` of maximal entanglement.
    """
    if case not in CIRCLE_CASES:
        raise ValueError(f"unknown circle case {case!r}; choose from {CIRCLE_CASES}")
    if samples < 1:
        raise ValueError(f"samples must be >= 1, got {samples}")
    if not 0 < threshold <= 1:
        raise ValueError(f"threshold must lie in (0, 1], got {threshold}")
    n_coins = 3 if case == "two_qubit_3coins" else 4
    rng = np.random.default_rng(seed)
    best, best_entropy = 0.0, 0.0
    for _ in range(samples):
        coins = [haar_unitary(2, rng) for _ in range(n_coins)]
        primary, entropy = circle_min_entanglement(case, coins, a, b)
        best, best_entropy = max(best, primary), max(best_entropy, entropy)
    return CircleSearchReport(
        case=case,
        samples=samples,
        seed=seed,
        threshold=threshold,
        max_min_entanglement=best,
        max_min_entropy=best_entropy,
        witness_found=bool(best >= threshold),
    )


def all_match(outcomes: Sequence[RecipeOutcome], atol: float = NORM_TOL) -> bool:
    """True when probabilities sum to one and every residual hits its target."""
    total = sum(o.prob for o in outcomes)
    return abs(total - 1) <= atol and all(abs(o.fidelity_to_target - 1) <= atol for o in outcomes)
