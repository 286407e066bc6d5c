"""Multiparty quantum secret sharing over walk-based entanglement swapping.

Layout for ``N`` parties (sender plus ``N - 1`` agents): the sender
prepares ``N`` copies of |psi_{k,l}> arranged in a ring,

    link 0      : (sender, agent 1)
    link j      : (agent j, agent j + 1)      for 1 <= j <= N - 2
    link N - 1  : (agent N - 1, sender)

With three parties this is pairs (1,2), (3,4), (5,6) with Bob = agent 1
and Charlie = agent 2. In a message round the sender encodes her secret
``i`` with X_d^i on her qudit of link N - 1, then the swap walk (coins I, F,
X_d on the d-complete graph, walker = first qudit of the walker pair)
merges the links one by one: first (N-1) with 0 (sender measures), then
the running pair with link 1, 2, ... (agent j measures). The last agent
ends up holding both qudits of a generalized Bell pair and reads its
label with a Bell-basis measurement.

Each run repeats step 1: with probability ``q`` it is a check round
(every link is measured in a random one of two mutually unbiased bases
and compared), otherwise it is the message round that ends the run. A
failed check aborts the run. Classical announcements are assumed
authenticated; only the quantum links can be attacked.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field, fields, replace
from functools import lru_cache
from typing import Sequence

import numpy as np

from .statevec import (
    GeneralizedBellLabel,
    MeasurementRecord,
    PureState,
    apply_unitary,
    make_generalized_bell,
    measure_enumerate,
    measure_sample,
    tensor,
)
from .walk import fourier, run_schedule, weyl_x
from .recipes import qudit_pair_setup

BASES = ("computational", "fourier_tilde")
STRATEGIES = ("none", "intercept_resend_computational")
MAX_ROUNDS = 100_000


@dataclass(frozen=True)
class QssConfig:
    d: int = 3
    k: int = 0
    l: int = 0  # noqa: E741
    q: float = 0.0
    parties: int = 3
    seed: int = 0

    def __post_init__(self):
        if self.d < 3 or self.d % 2 == 0:
            raise ValueError(f"d must be an odd integer >= 3, got {self.d}")
        if not (0 <= self.k < self.d and 0 <= self.l < self.d):
            raise ValueError(f"k and l must lie in [0, {self.d}), got k={self.k}, l={self.l}")
        if not 0 <= self.q < 1:
            raise ValueError(f"check probability q must lie in [0, 1), got {self.q}")
        if self.parties < 3:
            raise ValueError(f"the protocol needs at least 3 parties, got {self.parties}")

    @property
    def label(self) -> GeneralizedBellLabel:
        return GeneralizedBellLabel(self.d, self.k, self.l)

    def to_dict(self) -> dict:
        return {f.name: getattr(self, f.name) for f in fields(self)}

    @classmethod
    def from_dict(cls, data: dict) -> QssConfig:
        known = {f.name for f in fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise ValueError(f"unknown config keys: {sorted(unknown)}")
        return cls(**data)


@dataclass(frozen=True)
class Adversary:
    """Who attacks which link.

    ``target_channel`` is a link index, or one of ``"alice-bob"`` (link 0)
    and ``"alice-charlie"`` (the last link).
    """

    strategy: str = "none"
    target_channel: int | str = 0

    def __post_init__(self):
        if self.strategy not in STRATEGIES:
            raise ValueError(f"unknown adversary strategy {self.strategy!r}; choose from {STRATEGIES}")

    @property
    def active(self) -> bool:
        return self.strategy != "none"

    def link(self, parties: int) -> int | None:
        if not self.active:
            return None
        names = {"alice-bob": 0, "alice-charlie": parties - 1}
        link = names.get(self.target_channel, self.target_channel)
        if not isinstance(link, int) or not 0 <= link < parties:
            raise ValueError(f"target channel {self.target_channel!r} is not a link of a {parties}-party ring")
        return link


NO_ADVERSARY = Adversary()


@dataclass(frozen=True)
class CheckRecord:
    """One link's check. ``alice_outcome`` is the sender's qudit (for a
    link between two agents, the lower-numbered agent's)."""

    round: int
    link: int
    basis: str
    alice_outcome: int
    agent_outcome: int
    passed: bool

    def to_dict(self) -> dict:
        return {
            "round": self.round,
            "link": self.link,
            "basis": self.basis,
            "alice_outcome": self.alice_outcome,
            "agent_outcome": self.agent_outcome,
            "pass": self.passed,
        }


@dataclass
class QssTranscript:
    d: int
    parties: int
    seed: int
    true_secret: int
    phase: str = "check"
    aborted: bool = False
    rounds: int = 0
    check_results: list[CheckRecord] = field(default_factory=list)
    alice_announcement: tuple[int, int] | None = None
    bob_outcomes: list[tuple[int, int]] = field(default_factory=list)
    final_label: tuple[int, int] | None = None
    decoded_secret: int | None = None

    @property
    def pairs_used(self) -> int:
        return self.parties * self.rounds

    @property
    def correct(self) -> bool:
        return self.decoded_secret == self.true_secret

    def to_dict(self) -> dict:
        return {
            "d": self.d,
            "parties": self.parties,
            "seed": self.seed,
            "phase": self.phase,
            "aborted": self.aborted,
            "rounds": self.rounds,
            "pairs_used": self.pairs_used,
            "check_results": [c.to_dict() for c in self.check_results],
            "alice_announcement": list(self.alice_announcement) if self.alice_announcement else None,
            "bob_outcomes": [list(o) for o in self.bob_outcomes],
            "final_label": list(self.final_label) if self.final_label else None,
            "decoded_secret": self.decoded_secret,
            "true_secret": self.true_secret,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)


def capacity_bits(d: int) -> int:
    """Classical bits carried by one secret symbol."""
    return math.ceil(math.log2(d))


# -- primitives ---------------------------------------------------------------


def encode_secret(pair: PureState, i: int, d: int) -> PureState:
    """Apply U_i = X_d^i to the second qudit: |psi_{k,l}> -> |psi_{k,l-i}>."""
    if not 0 <= i < d:
        raise ValueError(f"secret index must lie in [0, {d}), got {i}")
    if pair.dims != (d, d):
        raise ValueError(f"expected a two-qudit pair of dimension {d}, got dims {pair.dims}")
    return apply_unitary(pair, weyl_x(d, i), [1])


def _rotate_for(pair: PureState, basis: str) -> PureState:
    if basis == "computational":
        return pair
    if basis == "fourier_tilde":
        d = pair.dims[0]
        fdag = fourier(d).conj().T
        return apply_unitary(apply_unitary(pair, fdag, [0]), fdag, [1])
    raise ValueError(f"unknown basis {basis!r}; choose from {BASES}")


def check_passes(label: GeneralizedBellLabel, basis: str, first: int, second: int) -> bool:
    """Correlation |psi_{k,l}> guarantees between the two ends.

    Computational basis: first - second = l. Fourier basis
    |~i> = d^-1/2 sum_j w^(ij)|j> on both ends: first + second = k.
    """
    d = label.d
    if basis == "computational":
        return (first - second - label.l) % d == 0
    if basis == "fourier_tilde":
        return (first + second - label.k) % d == 0
    raise ValueError(f"unknown basis {basis!r}; choose from {BASES}")


def _resend(pair: PureState, qudit: int, record: MeasurementRecord) -> PureState:
    """Pair after the interceptor read ``qudit`` and forwarded the result."""
    d = pair.dims[qudit]
    sent = PureState.basis((d,), record.outcome)
    parts = [record.residual, sent] if qudit == 1 else [sent, record.residual]
    return tensor(parts)


def intercept(pair: PureState, adversary: Adversary | None, qudit: int, rng: np.random.Generator) -> PureState:
    if adversary is None or not adversary.active:
        return pair
    return _resend(pair, qudit, measure_sample(pair, [qudit], rng))


def channel_check(
    pair: PureState,
    label: GeneralizedBellLabel,
    basis: str,
    rng: np.random.Generator,
    adversary: Adversary | None = None,
    intercept_qudit: int = 1,
) -> tuple[int, int, bool]:
    """Both ends of ``pair`` read in ``basis``; returns (first, second, passed).

    ``adversary`` (when active) intercepts ``intercept_qudit`` in transit.
    """
    pair = intercept(pair, adversary, intercept_qudit, rng)
    rec = measure_sample(_rotate_for(pair, basis), [0, 1], rng)
    first, second = rec.outcome
    return first, second, check_passes(label, basis, first, second)


def check_pass_probability(
    pair: PureState,
    label: GeneralizedBellLabel,
    basis: str,
    adversary: Adversary | None = None,
    intercept_qudit: int = 1,
) -> float:
    """Exact pass probability by enumerating the interceptor's and both ends' outcomes."""
    if adversary is not None and adversary.active:
        branches = [(r.prob, _resend(pair, intercept_qudit, r)) for r in measure_enumerate(pair, [intercept_qudit])]
    else:
        branches = [(1.0, pair)]
    total = 0.0
    for weight, state in branches:
        for rec in measure_enumerate(_rotate_for(state, basis), [0, 1]):
            if check_passes(label, basis, *rec.outcome):
                total += weight * rec.prob
    return total


@lru_cache(maxsize=None)
def _swap_schedule(d: int):
    return qudit_pair_setup(d, GeneralizedBellLabel(d, 0, 0)).schedule


def swap_final_state(state: PureState) -> PureState:
    """Three-step I, F, X_d walk on a (walker pair) (x) (pair) register."""
    if state.n != 4 or len(set(state.dims)) != 1:
        raise ValueError(f"swap needs four qudits of equal dimension, got dims {state.dims}")
    return run_schedule(state, _swap_schedule(state.dims[0]))


def swap_step(state: PureState, rng: np.random.Generator) -> tuple[tuple[int, int], PureState]:
    """Walk, read the two middle qudits, return (digits, pair on the outer qudits)."""
    rec = measure_sample(swap_final_state(state), [1, 2], rng)
    return tuple(rec.outcome), rec.residual


def swap_step_enumerate(state: PureState) -> list[MeasurementRecord]:
    return measure_enumerate(swap_final_state(state), [1, 2])


def swap_map(d: int, k: int, y: int, outcome: Sequence[int]) -> tuple[int, int]:
    """(m - y, p) -> (k + p, 2m + p - y) mod d."""
    m = outcome[0] + y
    p = outcome[1]
    return ((k + p) % d, (2 * m + p - y) % d)


def is_swap_bijection(d: int, k: int, y: int) -> bool:
    images = {swap_map(d, k, y, (a, p)) for a in range(d) for p in range(d)}
    return len(images) == d * d


def bell_measure(pair: PureState, rng: np.random.Generator) -> tuple[tuple[int, int], float]:
    """Projective measurement in the generalized Bell basis; returns ((k, l), prob)."""
    d = pair.dims[0]
    labels = [(k, l) for k in range(d) for l in range(d)]  # noqa: E741
    probs = np.array([abs(np.vdot(make_generalized_bell(GeneralizedBellLabel(d, k, l)).amps, pair.amps)) ** 2 for k, l in labels])
    i = int(rng.choice(len(labels), p=probs / probs.sum()))
    return labels[i], float(probs[i])


def decode_secret(l: int, alice: Sequence[int], relays: Sequence[Sequence[int]], final_label: Sequence[int], d: int) -> int:  # noqa: E741
    """Secret index from the announced digits and the last agent's label.

    Each relay round with digits (alpha, beta) adds 2 alpha + beta to the
    running shift index, so the pair after the sender's round had
    l_bar = L - sum(2 alpha + beta). The sender's digits (a, b) then give
    U_{l - (l_bar - b - 2a)}.
    """
    l_bar = final_label[1] - sum(2 * alpha + beta for alpha, beta in relays)
    a, b = alice
    return (l - (l_bar - b - 2 * a)) % d


# -- protocol -----------------------------------------------------------------


def _intercept_qudit(link: int, parties: int) -> int:
    # the agent-side qudit of the link travels over the channel
    return 0 if link == parties - 1 else 1


def _check_round(config: QssConfig, adversary: Adversary, round_no: int, rng, transcript: QssTranscript) -> bool:
    n = config.parties
    target = adversary.link(n)
    pair = make_generalized_bell(config.label)
    ok = True
    for link in range(n):
        basis = BASES[int(rng.integers(2))]
        first, second, passed = channel_check(
            pair,
            config.label,
            basis,
            rng,
            adversary if link == target else None,
            _intercept_qudit(link, n),
        )
        alice, agent = (second, first) if link == n - 1 else (first, second)
        transcript.check_results.append(CheckRecord(round_no, link, basis, alice, agent, passed))
        ok = ok and passed
    return ok


def _message_round(config: QssConfig, secret: int, adversary: Adversary, rng, transcript: QssTranscript) -> None:
    n, d = config.parties, config.d
    target = adversary.link(n)
    pairs = []
    for link in range(n):
        pair = make_generalized_bell(config.label)
        if link == target:
            pair = intercept(pair, adversary, _intercept_qudit(link, n), rng)
        pairs.append(pair)
    pairs[-1] = encode_secret(pairs[-1], secret, d)

    digits, running = swap_step(tensor([pairs[-1], pairs[0]]), rng)
    transcript.alice_announcement = digits
    for link in range(1, n - 1):
        digits, running = swap_step(tensor([running, pairs[link]]), rng)
        transcript.bob_outcomes.append(digits)
    final_label, _ = bell_measure(running, rng)
    transcript.final_label = final_label
    transcript.decoded_secret = decode_secret(
        config.l, transcript.alice_announcement, transcript.bob_outcomes, final_label, d
    )


def run_protocol_n(config: QssConfig, secret: int, adversary: Adversary = NO_ADVERSARY) -> QssTranscript:
    """One protocol run for ``config.parties`` parties, seeded by ``config.seed``."""
    if not 0 <= secret < config.d:
        raise ValueError(f"secret must lie in [0, {config.d}), got {secret}")
    adversary.link(config.parties)  # validate early
    rng = np.random.default_rng(config.seed)
    transcript = QssTranscript(config.d, config.parties, config.seed, secret)
    while transcript.rounds < MAX_ROUNDS:
        transcript.rounds += 1
        if rng.random() < config.q:
            if not _check_round(config, adversary, transcript.rounds, rng, transcript):
                transcript.phase = "check"
                transcript.aborted = True
                return transcript
            continue
        transcript.phase = "message"
        _message_round(config, secret, adversary, rng, transcript)
        return transcript
    raise RuntimeError(f"no message round within {MAX_ROUNDS} rounds")


def run_protocol(config: QssConfig, secret: int, adversary: Adversary = NO_ADVERSARY) -> QssTranscript:
    """Three-party run (sender, Bob, Charlie)."""
    if config.parties != 3:
        raise ValueError(f"run_protocol is the 3-party protocol; got parties={config.parties}")
    return run_protocol_n(config, secret, adversary)


def run_seeds(config: QssConfig, runs: int) -> list[int]:
    """Per-run seeds derived deterministically from ``config.seed``."""
    return [int(s) for s in np.random.SeedSequence(config.seed).generate_state(runs)]


def run_batch(
    config: QssConfig,
    runs: int,
    secret: int | None = None,
    adversary: Adversary = NO_ADVERSARY,
) -> list[QssTranscript]:
    """``runs`` independent runs; a random secret per run unless ``secret`` is given."""
    secret_rng = np.random.default_rng(config.seed)
    out = []
    for s in run_seeds(config, runs):
        i = int(secret_rng.integers(config.d)) if secret is None else secret
        out.append(run_protocol_n(replace(config, seed=s), i, adversary))
    return out


def check_round_failure_probability(config: QssConfig, adversary: Adversary) -> float:
    """Exact chance that a check round fails (uniform basis choice per link)."""
    target = adversary.link(config.parties)
    if target is None:
        return 0.0
    pair = make_generalized_bell(config.label)
    q = _intercept_qudit(target, config.parties)
    passing = np.mean([check_pass_probability(pair, config.label, b, adversary, q) for b in BASES])
    return float(1 - passing)


def abort_probability(config: QssConfig, adversary: Adversary) -> float:
    """Chance a run aborts: q.delta / (1 - q (1 - delta)) with delta the per-round failure."""
    delta = check_round_failure_probability(config, adversary)
    q = config.q
    if delta == 0:
        return 0.0
    return q * delta / (1 - q * (1 - delta))
