"""Coins, conditional shifts and the multi-coin walk engine.

A walk acts on one walker qudit (the position) and ``k`` coin qudits.
Step ``i`` (1-based) flips coin ``coins[(i - 1) % k]`` with that step's
coin operator and then applies the conditional shift to the pair
(walker, active coin):

    U_i = (S (x) I) . (I (x) C_i)

When ``k`` divides the step count this is the usual block form
``(U_k ... U_1)^(t/k)``; shorter or ragged schedules simply stop after
``t`` steps.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from typing import Sequence

import numpy as np

from .statevec import PureState, apply_permutation, apply_unitary, is_unitary

GRAPH_KINDS = ("line", "circle", "complete")
COIN_NAMES = ("identity", "hadamard", "weyl_x", "fourier", "custom")


@dataclass(frozen=True)
class GraphKind:
    kind: str
    n: int

    def __post_init__(self):
        if self.kind not in GRAPH_KINDS:
            raise ValueError(f"unknown graph kind {self.kind!r}; choose from {GRAPH_KINDS}")
        if self.n < 2:
            raise ValueError(f"graphs need at least 2 vertices, got {self.n}")

    @property
    def coin_dim(self) -> int:
        """Dimension of the coin a shift on this graph conditions on."""
        return self.n if self.kind == "complete" else 2

    def to_dict(self) -> dict:
        return {"kind": self.kind, "n": self.n}


@lru_cache(maxsize=64)
def shift_permutation(graph: GraphKind) -> np.ndarray:
    """Image of each basis index ``x * c + j`` of position (x) coin.

    ``c`` is the coin dimension. The line graph follows the boundary rule
    where a walker pushed off either end stays put and has its coin
    flipped.
    """
    n, c = graph.n, graph.coin_dim
    perm = np.empty(n * c, dtype=np.int64)
    for x in range(n):
        for j in range(c):
            if graph.kind == "complete":
                y, jj = (x + j) % n, j
            elif graph.kind == "circle":
                y, jj = ((x + 1) % n, 0) if j == 0 else ((x - 1) % n, 1)
            elif j == 0:
                y, jj = (x + 1, 0) if x < n - 1 else (n - 1, 1)
            else:
                y, jj = (x - 1, 1) if x > 0 else (0, 0)
            perm[x * c + j] = y * c + jj
    perm.setflags(write=False)
    return perm


def build_shift(graph: GraphKind) -> np.ndarray:
    """Dense permutation matrix of the conditional shift on position (x) coin."""
    perm = shift_permutation(graph)
    mat = np.zeros((perm.size, perm.size), dtype=np.complex128)
    mat[perm, np.arange(perm.size)] = 1.0
    return mat


def hadamard() -> np.ndarray:
    return np.array([[1, 1], [1, -1]], dtype=np.complex128) / np.sqrt(2)


def weyl_x(d: int, power: int = 1) -> np.ndarray:
    """X_d^power = sum_i |i + power mod d><i|."""
    return np.roll(np.eye(d, dtype=np.complex128), power, axis=0)


def fourier(d: int) -> np.ndarray:
    j = np.arange(d)
    return np.exp(2j * np.pi * np.outer(j, j) / d) / np.sqrt(d)


def haar_unitary(d: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-random unitary from the QR decomposition of a Ginibre matrix."""
    z = (rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))) / np.sqrt(2)
    q, r = np.linalg.qr(z)
    diag = np.diag(r)
    return q * (diag / np.abs(diag))


@dataclass(frozen=True, eq=False)
class CoinOp:
    name: str
    d: int
    mat: np.ndarray = field(repr=False)

    def __post_init__(self):
        if self.name not in COIN_NAMES:
            raise ValueError(f"unknown coin {self.name!r}")
        mat = np.array(self.mat, dtype=np.complex128)
        if mat.shape != (self.d, self.d):
            raise ValueError(f"coin matrix shape {mat.shape} does not match d={self.d}")
        if not is_unitary(mat):
            raise ValueError(f"coin {self.name!r} is not unitary")
        mat.setflags(write=False)
        object.__setattr__(self, "mat", mat)

    def to_json_value(self):
        if self.name == "custom":
            return [[[float(z.real), float(z.imag)] for z in row] for row in self.mat]
        return self.name

    @classmethod
    def from_json_value(cls, value, d: int) -> CoinOp:
        if isinstance(value, str):
            return build_coin(value, d)
        mat = np.array([[complex(re, im) for re, im in row] for row in value])
        return build_coin("custom", d, mat)


def build_coin(name: str, d: int, mat: np.ndarray | None = None) -> CoinOp:
    if d < 2:
        raise ValueError(f"coin dimension must be >= 2, got {d}")
    if name == "identity":
        m = np.eye(d, dtype=np.complex128)
    elif name == "hadamard":
        if d != 2:
            raise ValueError(f"the Hadamard coin is 2-dimensional, got d={d}")
        m = hadamard()
    elif name == "weyl_x":
        m = weyl_x(d)
    elif name == "fourier":
        m = fourier(d)
    elif name == "custom":
        if mat is None:
            raise ValueError("custom coins need an explicit matrix")
        m = mat
    else:
        raise ValueError(f"unknown coin {name!r}; choose from {COIN_NAMES}")
    return CoinOp(name, d, m)


def coin_from_symbol(symbol: str, d: int) -> CoinOp:
    """Shorthand used by the recipes: I, H, X, F."""
    names = {"I": "identity", "H": "hadamard", "X": "weyl_x", "F": "fourier"}
    return build_coin(names[symbol], d)


@dataclass(frozen=True)
class WalkSchedule:
    graph: GraphKind
    walker: int
    coins: tuple[int, ...]
    coin_ops: tuple[CoinOp, ...]
    steps: int

    def __post_init__(self):
        object.__setattr__(self, "coins", tuple(int(c) for c in self.coins))
        object.__setattr__(self, "coin_ops", tuple(self.coin_ops))
        if self.steps < 1:
            raise ValueError(f"a schedule needs at least one step, got {self.steps}")
        if not self.coins:
            raise ValueError("a schedule needs at least one coin")
        indices = (self.walker,) + self.coins
        if len(set(indices)) != len(indices) or min(indices) < 0:
            raise ValueError(f"walker and coins must be distinct non-negative indices, got {indices}")
        if len(self.coin_ops) != self.steps:
            raise ValueError(f"expected {self.steps} coin operators, got {len(self.coin_ops)}")
        for i, op in enumerate(self.coin_ops, start=1):
            if op.d != self.graph.coin_dim:
                raise ValueError(
                    f"coin at step {i} has d={op.d}; the {self.graph.kind} graph needs {self.graph.coin_dim}"
                )

    @classmethod
    def cyclic(cls, graph: GraphKind, walker: int, coins: Sequence[int], block: Sequence[CoinOp], repeats: int = 1):
        """``repeats`` passes of a per-coin block of operators."""
        return cls(graph, walker, tuple(coins), tuple(block) * repeats, len(block) * repeats)

    def active_coin(self, step_index: int) -> int:
        return self.coins[(step_index - 1) % len(self.coins)]

    def to_dict(self) -> dict:
        return {
            "graph": self.graph.to_dict(),
            "walker": self.walker,
            "coins": list(self.coins),
            "coin_ops": [op.to_json_value() for op in self.coin_ops],
            "steps": self.steps,
        }

    @classmethod
    def from_dict(cls, data: dict) -> WalkSchedule:
        graph = GraphKind(data["graph"]["kind"], int(data["graph"]["n"]))
        ops = tuple(CoinOp.from_json_value(v, graph.coin_dim) for v in data["coin_ops"])
        return cls(graph, int(data["walker"]), tuple(data["coins"]), ops, int(data["steps"]))


def _check_register(state: PureState, schedule: WalkSchedule) -> None:
    last = max((schedule.walker,) + schedule.coins)
    if last >= state.n:
        raise ValueError(f"schedule touches subsystem {last} but the state has {state.n}")
    if state.dims[schedule.walker] != schedule.graph.n:
        raise ValueError(
            f"walker subsystem has dimension {state.dims[schedule.walker]}, graph has {schedule.graph.n} vertices"
        )
    for c in schedule.coins:
        if state.dims[c] != schedule.graph.coin_dim:
            raise ValueError(
                f"coin subsystem {c} has dimension {state.dims[c]}, expected {schedule.graph.coin_dim}"
            )


def walk_step(state: PureState, schedule: WalkSchedule, step_index: int) -> PureState:
    if not 1 <= step_index <= schedule.steps:
        raise ValueError(f"step_index {step_index} outside [1, {schedule.steps}]")
    _check_register(state, schedule)
    coin = schedule.active_coin(step_index)
    state = apply_unitary(state, schedule.coin_ops[step_index - 1].mat, [coin])
    return apply_permutation(state, shift_permutation(schedule.graph), [schedule.walker, coin])


def run_schedule(state: PureState, schedule: WalkSchedule) -> PureState:
    for i in range(1, schedule.steps + 1):
        state = walk_step(state, schedule, i)
    return state
