"""Entanglement measures, fidelity, noise and simulated Pauli tomography."""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .statevec import (
    PROB_FLOOR,
    DensityMatrix,
    PureState,
    reduced_density,
)

TOMOGRAPHY_METHODS = ("linear_inversion", "psd_projected")

PAULI = {
    "I": np.eye(2, dtype=np.complex128),
    "X": np.array([[0, 1], [1, 0]], dtype=np.complex128),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=np.complex128),
    "Z": np.array([[1, 0], [0, -1]], dtype=np.complex128),
}

# Rotations taking each Pauli eigenbasis onto the computational basis.
_TO_Z = {
    "X": np.array([[1, 1], [1, -1]], dtype=np.complex128) / np.sqrt(2),
    "Y": np.array([[1, -1j], [1, 1j]], dtype=np.complex128) / np.sqrt(2),
    "Z": np.eye(2, dtype=np.complex128),
}


def _as_density(x) -> DensityMatrix:
    return x.density() if isinstance(x, PureState) else x


def von_neumann_entropy(rho: DensityMatrix) -> float:
    """Entropy in bits; eigenvalues below 1e-12 contribute nothing."""
    w = rho.eigenvalues()
    w = w[w > PROB_FLOOR]
    return float(-np.sum(w * np.log2(w)))


def entanglement_entropy(state: PureState, cut: Sequence[int]) -> float:
    """Entropy (bits) of the reduced state on the subsystems in ``cut``."""
    cut = tuple(cut)
    if not cut or len(set(cut)) == state.n:
        raise ValueError(f"cut must be a proper non-empty subset of {state.n} subsystems")
    if len(set(cut)) != len(cut) or any(not 0 <= c < state.n for c in cut):
        raise ValueError(f"invalid cut {cut}")
    return von_neumann_entropy(reduced_density(state, cut))


def schmidt_coefficients(state: PureState, cut: Sequence[int]) -> np.ndarray:
    """Singular values across ``cut`` | rest, descending."""
    cut = tuple(cut)
    t = np.moveaxis(state.tensor_view(), cut, list(range(len(cut))))
    rows = int(np.prod([state.dims[i] for i in cut]))
    return np.linalg.svd(t.reshape(rows, -1), compute_uv=False)


def schmidt_rank(state: PureState, cut: Sequence[int], tol: float = 1e-9) -> int:
    return int(np.sum(schmidt_coefficients(state, cut) > tol))


def concurrence(rho) -> float:
    """Wootters concurrence of a two-qubit state (pure or mixed)."""
    if rho.dims != (2, 2):
        raise ValueError(f"concurrence needs a two-qubit state, got dims {rho.dims}")
    yy = np.kron(PAULI["Y"], PAULI["Y"])
    if isinstance(rho, PureState):
        # |<psi| Y(x)Y |psi*>| avoids square roots of round-off eigenvalues
        return float(abs(np.vdot(rho.amps, yy @ rho.amps.conj())))
    flipped = yy @ rho.mat.conj() @ yy
    lam = np.sqrt(np.clip(np.linalg.eigvals(rho.mat @ flipped).real, 0, None))
    lam = np.sort(lam)[::-1]
    return float(max(0.0, lam[0] - lam[1] - lam[2] - lam[3]))


def _psd_sqrt(mat: np.ndarray) -> np.ndarray:
    w, v = np.linalg.eigh(mat)
    return (v * np.sqrt(np.clip(w, 0, None))) @ v.conj().T


def fidelity(rho, sigma) -> float:
    """Uhlmann fidelity (Tr sqrt(sqrt(rho) sigma sqrt(rho)))^2.

    Either argument may be a :class:`PureState`; then the overlap formula
    <psi|sigma|psi> is used, which stays meaningful for the slightly
    non-positive matrices raw tomography produces.
    """
    if rho.dims != sigma.dims:
        raise ValueError(f"dims differ: {rho.dims} vs {sigma.dims}")
    if isinstance(rho, PureState) and isinstance(sigma, PureState):
        return rho.fidelity(sigma)
    if isinstance(sigma, PureState):
        rho, sigma = sigma, rho
    if isinstance(rho, PureState):
        return float(np.real(np.vdot(rho.amps, sigma.mat @ rho.amps)))
    root = _psd_sqrt(rho.mat)
    inner = root @ sigma.mat @ root
    w = np.clip(np.linalg.eigvalsh((inner + inner.conj().T) / 2), 0, None)
    return float(np.sum(np.sqrt(w)) ** 2)


def trace_distance(rho: DensityMatrix, sigma: DensityMatrix) -> float:
    diff = _as_density(rho).mat - _as_density(sigma).mat
    return float(0.5 * np.sum(np.abs(np.linalg.eigvalsh(diff))))


def depolarize(rho, p: float) -> DensityMatrix:
    """(1 - p) rho + p I / D."""
    if not 0 <= p <= 1:
        raise ValueError(f"depolarizing probability must lie in [0, 1], got {p}")
    rho = _as_density(rho)
    size = rho.mat.shape[0]
    return DensityMatrix(rho.dims, (1 - p) * rho.mat + p * np.eye(size) / size)


@dataclass(frozen=True, eq=False)
class TomographyResult:
    rho: DensityMatrix
    basis_settings: int
    shots_per_setting: int | None
    method: str
    is_psd: bool

    def to_dict(self) -> dict:
        return {
            "rho": self.rho.to_dict(),
            "basis_settings": self.basis_settings,
            "shots_per_setting": self.shots_per_setting,
            "method": self.method,
            "is_psd": self.is_psd,
        }


def _pauli_string(labels: Sequence[str]) -> np.ndarray:
    out = np.ones((1, 1), dtype=np.complex128)
    for s in labels:
        out = np.kron(out, PAULI[s])
    return out


def setting_probabilities(rho: DensityMatrix, setting: Sequence[str]) -> np.ndarray:
    """Outcome distribution when each qubit is read in the given Pauli basis."""
    rot = np.ones((1, 1), dtype=np.complex128)
    for s in setting:
        rot = np.kron(rot, _TO_Z[s])
    p = np.real(np.diag(rot @ rho.mat @ rot.conj().T))
    p = np.clip(p, 0, None)
    return p / p.sum()


def _parity_signs(n: int) -> np.ndarray:
    # signs[mask, outcome] = (-1)^(number of 1 bits of outcome inside mask)
    outcomes = np.arange(2**n)
    masks = np.arange(2**n)
    bits = np.array([bin(int(x)).count("1") for x in range(2**n)])
    return 1 - 2 * (bits[(masks[:, None] & outcomes[None, :])] % 2)


def pauli_expectations_from_frequencies(freqs: dict[tuple[str, ...], np.ndarray], n: int) -> dict[tuple[str, ...], float]:
    """Estimate every Pauli string from per-setting outcome frequencies.

    A string with identities is compatible with every setting that agrees
    on its non-identity letters; estimates from all compatible settings are
    averaged.
    """
    signs = _parity_signs(n)
    sums: dict[tuple[str, ...], float] = {}
    counts: dict[tuple[str, ...], int] = {}
    for setting, f in freqs.items():
        for keep in itertools.product((False, True), repeat=n):
            label = tuple(s if k else "I" for s, k in zip(setting, keep))
            # qubit 0 is the most significant bit of the outcome index
            mask = sum(1 << (n - 1 - i) for i, k in enumerate(keep) if k)
            sums[label] = sums.get(label, 0.0) + float(signs[mask] @ f)
            counts[label] = counts.get(label, 0) + 1
    return {label: sums[label] / counts[label] for label in sums}


def reconstruct(expectations: dict[tuple[str, ...], float], n: int) -> np.ndarray:
    """Linear inversion: rho = 2^-n sum_P <P> P."""
    mat = np.zeros((2**n, 2**n), dtype=np.complex128)
    for label, e in expectations.items():
        mat += e * _pauli_string(label)
    return mat / 2**n


def project_psd(mat: np.ndarray) -> np.ndarray:
    """Clip negative eigenvalues to zero and renormalize the trace."""
    herm = (mat + mat.conj().T) / 2
    w, v = np.linalg.eigh(herm)
    w = np.clip(w, 0, None)
    w = w / w.sum()
    return (v * w) @ v.conj().T


def tomography(
    state_or_rho,
    shots_per_setting: int | None = 8192,
    seed: int = 0,
    method: str = "linear_inversion",
) -> TomographyResult:
    """Simulated Pauli tomography of a 2- or 3-qubit state.

    All 3^n settings are sampled with ``shots_per_setting`` shots each from
    a generator seeded with ``seed``. ``shots_per_setting=None`` uses exact
    outcome probabilities instead of samples.
    """
    if method not in TOMOGRAPHY_METHODS:
        raise ValueError(f"unknown method {method!r}; choose from {TOMOGRAPHY_METHODS}")
    rho = _as_density(state_or_rho)
    n = rho.n
    if rho.dims != (2,) * n or n not in (2, 3):
        raise ValueError(f"tomography supports 2 or 3 qubits, got dims {rho.dims}")
    if shots_per_setting is not None and shots_per_setting < 1:
        raise ValueError(f"shots_per_setting must be >= 1, got {shots_per_setting}")
    rng = np.random.default_rng(seed)
    freqs = {}
    for setting in itertools.product("XYZ", repeat=n):
        p = setting_probabilities(rho, setting)
        if shots_per_setting is None:
            freqs[setting] = p
        else:
            freqs[setting] = rng.multinomial(shots_per_setting, p) / shots_per_setting
    mat = reconstruct(pauli_expectations_from_frequencies(freqs, n), n)
    mat = (mat + mat.conj().T) / 2
    if method == "psd_projected":
        mat = project_psd(mat)
    est = DensityMatrix(rho.dims, mat)
    return TomographyResult(est, 3**n, shots_per_setting, method, est.is_psd())


def tomography_by_outcome(outcomes, shots_per_setting: int | None = 8192, seed: int = 0, method: str = "linear_inversion", noise: float = 0.0):
    """Per-outcome tomography of recipe residuals.

    Returns ``{outcome digits: (TomographyResult, fidelity to target)}``.
    Each outcome gets its own seed derived from ``seed``.
    """
    seeds = np.random.SeedSequence(seed).generate_state(max(len(outcomes), 1))
    results = {}
    for o, s in zip(outcomes, seeds):
        rho = depolarize(o.achieved, noise) if noise else o.achieved.density()
        res = tomography(rho, shots_per_setting, int(s), method)
        results[tuple(o.outcome)] = (res, fidelity(o.target, res.rho))
    return results


def exact_pauli_expectations(rho: DensityMatrix) -> dict[tuple[str, ...], float]:
    n = rho.n
    return {
        label: float(np.real(np.trace(_pauli_string(label) @ rho.mat)))
        for label in itertools.product("IXYZ", repeat=n)
    }

