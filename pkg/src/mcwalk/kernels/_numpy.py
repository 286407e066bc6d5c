"""Pure-numpy state-vector kernels.

Every kernel takes a flat complex amplitude vector together with the
per-subsystem dimensions and an ordered array of target subsystems.
Subsystem 0 is the most significant digit of the flat index.
"""

import numpy as np


def apply_local(amps, dims, mat, targets):
    """Contract ``mat`` with the listed subsystems of ``amps``."""
    dims = tuple(int(x) for x in dims)
    targets = [int(t) for t in targets]
    k = len(targets)
    tensor = amps.reshape(dims)
    op = mat.reshape([dims[t] for t in targets] * 2)
    out = np.tensordot(op, tensor, axes=(list(range(k, 2 * k)), targets))
    out = np.moveaxis(out, list(range(k)), targets)
    return np.ascontiguousarray(out).reshape(-1)


def permute_local(amps, dims, perm, targets):
    """Send local basis index ``j`` of the targets to ``perm[j]``."""
    dims = tuple(int(x) for x in dims)
    targets = [int(t) for t in targets]
    k = len(targets)
    tensor = np.moveaxis(amps.reshape(dims), targets, list(range(k)))
    front = tensor.shape
    flat = tensor.reshape(len(perm), -1)
    out = np.empty_like(flat)
    out[perm] = flat
    out = np.moveaxis(out.reshape(front), list(range(k)), targets)
    return np.ascontiguousarray(out).reshape(-1)


def marginal_probs(amps, dims, targets):
    """Born probabilities of the targets' joint computational-basis outcomes."""
    dims = tuple(int(x) for x in dims)
    targets = [int(t) for t in targets]
    k = len(targets)
    weights = (amps.real**2 + amps.imag**2).reshape(dims)
    weights = np.moveaxis(weights, targets, list(range(k)))
    size = int(np.prod([dims[t] for t in targets], dtype=np.int64))
    return weights.reshape(size, -1).sum(axis=1)
