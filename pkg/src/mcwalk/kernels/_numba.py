"""Numba-compiled state-vector kernels.

Same contracts as the numpy kernels. The Python wrappers only normalize
argument dtypes so the jitted loops compile once per signature.
"""

import numpy as np
from numba import njit


@njit(cache=True)
def _strides(dims):
    n = dims.shape[0]
    strides = np.empty(n, dtype=np.int64)
    acc = 1
    for i in range(n - 1, -1, -1):
        strides[i] = acc
        acc *= dims[i]
    return strides


@njit(cache=True)
def _local_layout(dims, targets):
    # For each local index: its offset in the full register and the local
    # stride of each target (target 0 most significant).
    strides = _strides(dims)
    k = targets.shape[0]
    lstrides = np.empty(k, dtype=np.int64)
    acc = 1
    for t in range(k - 1, -1, -1):
        lstrides[t] = acc
        acc *= dims[targets[t]]
    size = acc
    offsets = np.zeros(size, dtype=np.int64)
    for s in range(size):
        rem = s
        off = 0
        for t in range(k):
            digit = rem // lstrides[t]
            rem -= digit * lstrides[t]
            off += digit * strides[targets[t]]
        offsets[s] = off
    return strides, lstrides, offsets


@njit(cache=True)
def _bases(dims, strides, targets):
    # Offsets of every index whose target digits are all zero, by odometer.
    n = dims.shape[0]
    is_target = np.zeros(n, dtype=np.bool_)
    count = 1
    for t in range(targets.shape[0]):
        is_target[targets[t]] = True
    for i in range(n):
        if not is_target[i]:
            count *= dims[i]
    out = np.empty(count, dtype=np.int64)
    digits = np.zeros(n, dtype=np.int64)
    base = 0
    for b in range(count):
        out[b] = base
        for i in range(n - 1, -1, -1):
            if is_target[i]:
                continue
            digits[i] += 1
            base += strides[i]
            if digits[i] < dims[i]:
                break
            base -= digits[i] * strides[i]
            digits[i] = 0
    return out


@njit(cache=True)
def _apply_local(amps, dims, mat, targets):
    strides, _, offsets = _local_layout(dims, targets)
    bases = _bases(dims, strides, targets)
    size = offsets.shape[0]
    out = np.empty_like(amps)
    local = np.empty(size, dtype=np.complex128)
    for b in range(bases.shape[0]):
        base = bases[b]
        for s in range(size):
            local[s] = amps[base + offsets[s]]
        for r in range(size):
            acc = 0j
            for s in range(size):
                acc += mat[r, s] * local[s]
            out[base + offsets[r]] = acc
    return out


@njit(cache=True)
def _permute_local(amps, dims, perm, targets):
    strides, _, offsets = _local_layout(dims, targets)
    bases = _bases(dims, strides, targets)
    out = np.empty_like(amps)
    for b in range(bases.shape[0]):
        base = bases[b]
        for s in range(offsets.shape[0]):
            out[base + offsets[perm[s]]] = amps[base + offsets[s]]
    return out


@njit(cache=True)
def _marginal_probs(amps, dims, targets):
    strides, _, offsets = _local_layout(dims, targets)
    bases = _bases(dims, strides, targets)
    out = np.zeros(offsets.shape[0], dtype=np.float64)
    for b in range(bases.shape[0]):
        base = bases[b]
        for s in range(offsets.shape[0]):
            a = amps[base + offsets[s]]
            out[s] += a.real * a.real + a.imag * a.imag
    return out


def _i64(x):
    return np.ascontiguousarray(x, dtype=np.int64)


def apply_local(amps, dims, mat, targets):
    return _apply_local(
        np.ascontiguousarray(amps, dtype=np.complex128),
        _i64(dims),
        np.ascontiguousarray(mat, dtype=np.complex128),
        _i64(targets),
    )


def permute_local(amps, dims, perm, targets):
    return _permute_local(
        np.ascontiguousarray(amps, dtype=np.complex128), _i64(dims), _i64(perm), _i64(targets)
    )


def marginal_probs(amps, dims, targets):
    return _marginal_probs(
        np.ascontiguousarray(amps, dtype=np.complex128), _i64(dims), _i64(targets)
    )
