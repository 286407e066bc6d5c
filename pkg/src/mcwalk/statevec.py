"""Dense multi-qudit states.

Subsystems are indexed from 0 and subsystem 0 is the most significant
digit of the flat amplitude index, so a ket written ``|q0 q1 q2>`` maps
left-to-right onto the register. Everything here is immutable: operations
return new states and the amplitude arrays are marked read-only.
"""

from __future__ import annotations

import json
from collections import Counter
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from . import kernels

NORM_TOL = 1e-9
PSD_TOL = 1e-7
PROB_FLOOR = 1e-12
MAX_AMPLITUDES = 10**6
SCHEMA_VERSION = 1


def _total_dim(dims: Sequence[int]) -> int:
    total = 1
    for d in dims:
        total *= int(d)
    return total


def _check_dims(dims) -> tuple[int, ...]:
    dims = tuple(int(d) for d in dims)
    if any(d < 1 for d in dims):
        raise ValueError(f"subsystem dimensions must be positive, got {dims}")
    if _total_dim(dims) > MAX_AMPLITUDES:
        raise ValueError(
            f"register of dimension {_total_dim(dims)} exceeds the dense cap of {MAX_AMPLITUDES}"
        )
    return dims


def _check_targets(targets, n: int) -> tuple[int, ...]:
    targets = tuple(int(t) for t in targets)
    if len(set(targets)) != len(targets):
        raise ValueError(f"target subsystems must be distinct, got {targets}")
    for t in targets:
        if not 0 <= t < n:
            raise ValueError(f"subsystem {t} out of range for {n} subsystems")
    return targets


def encode_index(digits: Sequence[int], dims: Sequence[int]) -> int:
    """Mixed-radix flat index of ``digits`` (first digit most significant)."""
    idx = 0
    for digit, d in zip(digits, dims, strict=True):
        if not 0 <= digit < d:
            raise ValueError(f"digit {digit} out of range for dimension {d}")
        idx = idx * d + int(digit)
    return idx


def decode_index(idx: int, dims: Sequence[int]) -> tuple[int, ...]:
    """Inverse of :func:`encode_index`."""
    if not 0 <= idx < _total_dim(dims):
        raise ValueError(f"index {idx} out of range for dims {tuple(dims)}")
    digits = []
    for d in reversed(dims):
        idx, r = divmod(idx, d)
        digits.append(r)
    return tuple(reversed(digits))


def _readonly(arr: np.ndarray) -> np.ndarray:
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class PureState:
    """Unit-norm amplitude vector over an ordered list of qudits."""

    dims: tuple[int, ...]
    amps: np.ndarray

    def __post_init__(self):
        dims = _check_dims(self.dims)
        amps = np.array(self.amps, dtype=np.complex128).reshape(-1)
        if amps.shape[0] != _total_dim(dims):
            raise ValueError(
                f"amplitude vector has length {amps.shape[0]}, dims {dims} require {_total_dim(dims)}"
            )
        norm = np.linalg.norm(amps)
        if abs(norm - 1.0) > NORM_TOL:
            raise ValueError(f"state is not normalized (norm {norm!r})")
        object.__setattr__(self, "dims", dims)
        object.__setattr__(self, "amps", _readonly(amps))

    @classmethod
    def from_unnormalized(cls, dims, amps) -> PureState:
        amps = np.asarray(amps, dtype=np.complex128).reshape(-1)
        norm = np.linalg.norm(amps)
        if norm <= 0:
            raise ValueError("cannot normalize the zero vector")
        return cls(dims, amps / norm)

    @classmethod
    def basis(cls, dims, digits) -> PureState:
        """Computational basis ket ``|digits>``."""
        dims = _check_dims(dims)
        amps = np.zeros(_total_dim(dims), dtype=np.complex128)
        amps[encode_index(digits, dims)] = 1.0
        return cls(dims, amps)

    @property
    def n(self) -> int:
        return len(self.dims)

    @property
    def dim(self) -> int:
        return self.amps.shape[0]

    def tensor_view(self) -> np.ndarray:
        return self.amps.reshape(self.dims)

    def probabilities(self) -> np.ndarray:
        return self.amps.real**2 + self.amps.imag**2

    def density(self) -> DensityMatrix:
        return DensityMatrix(self.dims, np.outer(self.amps, self.amps.conj()))

    def overlap(self, other: PureState) -> complex:
        """<self|other>."""
        if self.dims != other.dims:
            raise ValueError(f"dims differ: {self.dims} vs {other.dims}")
        return complex(np.vdot(self.amps, other.amps))

    def fidelity(self, other: PureState) -> float:
        return abs(self.overlap(other)) ** 2

    def allclose(self, other: PureState, atol: float = NORM_TOL) -> bool:
        """Amplitude-wise equality, global phase included."""
        return self.dims == other.dims and bool(np.allclose(self.amps, other.amps, rtol=0, atol=atol))

    def equal_up_to_phase(self, other: PureState, atol: float = NORM_TOL) -> bool:
        if self.dims != other.dims:
            return False
        ov = self.overlap(other)
        if abs(ov) < PROB_FLOOR:
            return False
        phase = ov / abs(ov)
        return bool(np.allclose(self.amps * phase, other.amps, rtol=0, atol=atol))

    def to_dict(self) -> dict:
        return {
            "version": SCHEMA_VERSION,
            "dims": list(self.dims),
            "amps": [[float(a.real), float(a.imag)] for a in self.amps],
        }

    @classmethod
    def from_dict(cls, data: dict) -> PureState:
        if data.get("version", SCHEMA_VERSION) != SCHEMA_VERSION:
            raise ValueError(f"unsupported state schema version {data.get('version')}")
        amps = np.array([complex(re, im) for re, im in data["amps"]], dtype=np.complex128)
        return cls(tuple(data["dims"]), amps)

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_json(cls, text: str) -> PureState:
        return cls.from_dict(json.loads(text))

    def __repr__(self) -> str:
        return f"PureState(dims={self.dims})"


@dataclass(frozen=True, eq=False)
class DensityMatrix:
    """Hermitian, trace-one operator.

    Positivity is not enforced at construction because raw linear-inversion
    tomography estimates may dip below zero; use :meth:`is_psd` to check.
    """

    dims: tuple[int, ...]
    mat: np.ndarray

    def __post_init__(self):
        dims = _check_dims(self.dims)
        mat = np.array(self.mat, dtype=np.complex128)
        size = _total_dim(dims)
        if mat.shape != (size, size):
            raise ValueError(f"matrix shape {mat.shape} does not match dims {dims}")
        if not np.allclose(mat, mat.conj().T, rtol=0, atol=NORM_TOL):
            raise ValueError("density matrix is not Hermitian")
        tr = np.trace(mat).real
        if abs(tr - 1.0) > NORM_TOL:
            raise ValueError(f"density matrix trace is {tr!r}, expected 1")
        object.__setattr__(self, "dims", dims)
        object.__setattr__(self, "mat", _readonly(mat))

    @classmethod
    def maximally_mixed(cls, dims) -> DensityMatrix:
        size = _total_dim(_check_dims(dims))
        return cls(dims, np.eye(size, dtype=np.complex128) / size)

    @property
    def n(self) -> int:
        return len(self.dims)

    def eigenvalues(self) -> np.ndarray:
        return np.linalg.eigvalsh(self.mat)

    def is_psd(self, tol: float = PSD_TOL) -> bool:
        return bool(self.eigenvalues().min() >= -tol)

    def purity(self) -> float:
        return float(np.real(np.trace(self.mat @ self.mat)))

    def allclose(self, other: DensityMatrix, atol: float = NORM_TOL) -> bool:
        return self.dims == other.dims and bool(np.allclose(self.mat, other.mat, rtol=0, atol=atol))

    def to_dict(self) -> dict:
        return {
            "version": SCHEMA_VERSION,
            "dims": list(self.dims),
            "mat": [[[float(z.real), float(z.imag)] for z in row] for row in self.mat],
        }

    @classmethod
    def from_dict(cls, data: dict) -> DensityMatrix:
        mat = np.array([[complex(re, im) for re, im in row] for row in data["mat"]])
        return cls(tuple(data["dims"]), mat)

    def __repr__(self) -> str:
        return f"DensityMatrix(dims={self.dims})"


@dataclass(frozen=True)
class GeneralizedBellLabel:
    """Index pair (k, l) of a generalized Bell state on two d-level qudits."""

    d: int
    k: int
    l: int  # noqa: E741

    def __post_init__(self):
        if self.d < 2:
            raise ValueError(f"generalized Bell states need d >= 2, got {self.d}")
        if not (0 <= self.k < self.d and 0 <= self.l < self.d):
            raise ValueError(f"labels must lie in [0, {self.d}), got k={self.k}, l={self.l}")

    @classmethod
    def wrap(cls, d: int, k: int, l: int) -> GeneralizedBellLabel:  # noqa: E741
        """Build a label with k and l reduced mod d."""
        return cls(d, k % d, l % d)

    def __str__(self) -> str:
        return f"psi[d={self.d}]({self.k},{self.l})"


@dataclass(frozen=True, eq=False)
class MeasurementRecord:
    """One computational-basis outcome of a projective measurement.

    ``residual`` keeps whatever phase the projection leaves behind; it is
    the normalized post-measurement state of the unmeasured subsystems
    (a zero-subsystem state when everything was measured).
    """

    measured: tuple[int, ...]
    outcome: tuple[int, ...]
    prob: float
    residual: PureState

    def to_dict(self) -> dict:
        return {
            "measured": list(self.measured),
            "outcome": list(self.outcome),
            "prob": float(self.prob),
            "residual": self.residual.to_dict(),
        }


def make_generalized_bell(label: GeneralizedBellLabel) -> PureState:
    """(1/sqrt d) sum_m exp(2 pi i m k / d) |m>|m - l mod d>."""
    d, k, l = label.d, label.k, label.l  # noqa: E741
    amps = np.zeros(d * d, dtype=np.complex128)
    m = np.arange(d)
    amps[m * d + (m - l) % d] = np.exp(2j * np.pi * m * k / d) / np.sqrt(d)
    return PureState((d, d), amps)


def bell_state(d: int, k: int = 0, l: int = 0) -> PureState:  # noqa: E741
    return make_generalized_bell(GeneralizedBellLabel.wrap(d, k, l))


def make_pair(a: complex, b: complex, flipped: bool = False) -> PureState:
    """a|01> + b|10>, or a|00> + b|11> when ``flipped``."""
    a, b = complex(a), complex(b)
    norm = abs(a) ** 2 + abs(b) ** 2
    if abs(norm - 1.0) > NORM_TOL:
        raise ValueError(f"|a|^2 + |b|^2 = {norm!r}, expected 1")
    amps = np.zeros(4, dtype=np.complex128)
    if flipped:
        amps[0b00], amps[0b11] = a, b
    else:
        amps[0b01], amps[0b10] = a, b
    return PureState((2, 2), amps)


def make_ghz(d: int, n: int) -> PureState:
    """(1/sqrt d) sum_m |m>^n."""
    if d < 2 or n < 2:
        raise ValueError(f"GHZ state needs d >= 2 and n >= 2, got d={d}, n={n}")
    dims = (d,) * n
    amps = np.zeros(d**n, dtype=np.complex128)
    step = sum(d**j for j in range(n))  # index of |1...1>
    amps[np.arange(d) * step] = 1 / np.sqrt(d)
    return PureState(dims, amps)


def make_schmidt_pair(coeffs: Sequence[complex]) -> PureState:
    """sum_i c_i |i>|i> on two len(coeffs)-level qudits."""
    c = np.asarray(coeffs, dtype=np.complex128)
    d = c.shape[0]
    if abs(np.vdot(c, c).real - 1.0) > NORM_TOL:
        raise ValueError("Schmidt coefficients are not normalized")
    amps = np.zeros(d * d, dtype=np.complex128)
    amps[np.arange(d) * (d + 1)] = c
    return PureState((d, d), amps)


def tensor(states: Iterable[PureState]) -> PureState:
    states = list(states)
    if not states:
        raise ValueError("tensor() needs at least one state")
    dims: tuple[int, ...] = ()
    amps = np.ones(1, dtype=np.complex128)
    for s in states:
        dims += s.dims
        _check_dims(dims)
        amps = np.kron(amps, s.amps)
    return PureState(dims, amps)


def is_unitary(mat: np.ndarray, atol: float = NORM_TOL) -> bool:
    mat = np.asarray(mat)
    if mat.ndim != 2 or mat.shape[0] != mat.shape[1]:
        return False
    return bool(np.allclose(mat.conj().T @ mat, np.eye(mat.shape[0]), rtol=0, atol=atol))


def apply_unitary(state: PureState, U: np.ndarray, targets: Sequence[int]) -> PureState:
    """Apply ``U`` to ``targets`` (listed order = U's tensor-factor order)."""
    targets = _check_targets(targets, state.n)
    U = np.asarray(U, dtype=np.complex128)
    side = _total_dim([state.dims[t] for t in targets])
    if U.shape != (side, side):
        raise ValueError(f"operator shape {U.shape} does not match target dimension {side}")
    if not is_unitary(U):
        raise ValueError("operator is not unitary")
    out = kernels.apply_local(state.amps, np.asarray(state.dims), U, np.asarray(targets))
    return PureState(state.dims, out)


def apply_permutation(state: PureState, perm: np.ndarray, targets: Sequence[int]) -> PureState:
    """Apply the basis permutation ``|j> -> |perm[j]>`` on ``targets``."""
    targets = _check_targets(targets, state.n)
    perm = np.asarray(perm, dtype=np.int64)
    side = _total_dim([state.dims[t] for t in targets])
    if perm.shape != (side,) or not np.array_equal(np.sort(perm), np.arange(side)):
        raise ValueError("perm is not a permutation of the target basis")
    out = kernels.permute_local(state.amps, np.asarray(state.dims), perm, np.asarray(targets))
    return PureState(state.dims, out)


def _split_outcomes(state: PureState, targets: tuple[int, ...]):
    rest = [i for i in range(state.n) if i not in targets]
    t = np.moveaxis(state.tensor_view(), targets, list(range(len(targets))))
    blocks = t.reshape(_total_dim([state.dims[i] for i in targets]), -1)
    return rest, blocks


def _record(state, targets, rest, outcome_idx, block, prob) -> MeasurementRecord:
    digits = decode_index(outcome_idx, [state.dims[t] for t in targets])
    residual = PureState(tuple(state.dims[i] for i in rest), block / np.sqrt(prob))
    return MeasurementRecord(targets, digits, float(prob), residual)


def measure_enumerate(state: PureState, targets: Sequence[int]) -> list[MeasurementRecord]:
    """All computational-basis outcomes of ``targets`` with prob above 1e-12.

    Records are ordered by outcome digits ascending.
    """
    targets = _check_targets(targets, state.n)
    rest, blocks = _split_outcomes(state, targets)
    probs = kernels.marginal_probs(state.amps, np.asarray(state.dims), np.asarray(targets))
    return [
        _record(state, targets, rest, i, blocks[i], probs[i])
        for i in range(blocks.shape[0])
        if probs[i] > PROB_FLOOR
    ]


def measure_sample(state: PureState, targets: Sequence[int], rng: np.random.Generator) -> MeasurementRecord:
    """Draw one outcome of ``targets`` and collapse."""
    targets = _check_targets(targets, state.n)
    probs = kernels.marginal_probs(state.amps, np.asarray(state.dims), np.asarray(targets))
    probs = np.where(probs > PROB_FLOOR, probs, 0.0)
    i = int(rng.choice(probs.shape[0], p=probs / probs.sum()))
    rest, blocks = _split_outcomes(state, targets)
    return _record(state, targets, rest, i, blocks[i], probs[i])


def basis_label(digits: Sequence[int], dims: Sequence[int]) -> str:
    if max(dims, default=2) <= 10:
        return "".join(str(x) for x in digits)
    return ".".join(str(x) for x in digits)


def sample_shots(state: PureState, shots: int, seed: int) -> dict[str, int]:
    """Multinomial histogram of full-register computational-basis shots."""
    if shots < 1:
        raise ValueError(f"shots must be >= 1, got {shots}")
    rng = np.random.default_rng(seed)
    probs = state.probabilities()
    counts = rng.multinomial(shots, probs / probs.sum())
    hist = Counter()
    for idx in np.flatnonzero(counts):
        hist[basis_label(decode_index(int(idx), state.dims), state.dims)] = int(counts[idx])
    return dict(sorted(hist.items()))


def partial_trace(rho: DensityMatrix, keep: Sequence[int]) -> DensityMatrix:
    """Reduced density matrix on ``keep`` (kept in ascending subsystem order)."""
    keep = tuple(sorted(_check_targets(keep, rho.n)))
    n = rho.n
    drop = [i for i in range(n) if i not in keep]
    t = rho.mat.reshape(rho.dims * 2)
    # bring kept row axes, kept column axes, then traced pairs
    order = list(keep) + [n + i for i in keep] + drop + [n + i for i in drop]
    t = np.transpose(t, order)
    dk = _total_dim([rho.dims[i] for i in keep])
    dd = _total_dim([rho.dims[i] for i in drop])
    t = t.reshape(dk, dk, dd, dd)
    reduced = np.trace(t, axis1=2, axis2=3)
    return DensityMatrix(tuple(rho.dims[i] for i in keep), reduced)


def reduced_density(state: PureState, keep: Sequence[int]) -> DensityMatrix:
    """Reduced state of a pure state without forming the full projector."""
    keep = tuple(sorted(_check_targets(keep, state.n)))
    t = np.moveaxis(state.tensor_view(), list(keep), list(range(len(keep))))
    m = t.reshape(_total_dim([state.dims[i] for i in keep]), -1)
    return DensityMatrix(tuple(state.dims[i] for i in keep), m @ m.conj().T)
