"""Pure numpy versions of the compiled kernels in ``_kernels.pyx``.

Both modules expose the same two functions with identical contracts;
:mod:`groth_lhv.kernels` picks one at import time.
"""
import numpy as np

_CHUNK_BITS = 16


def local_bound_signs(M):
    """Maximize sum_j |sum_i M_ij a_i| over a in {-1,+1}^p with a_0 = +1.

    Enumerates in chunks: the low bits of the sign pattern form a fixed
    table, the high bits a shift applied per chunk, so each chunk costs a
    single matrix product.

    Returns
    -------
    value : float
        best objective found (accumulated in floating point)
    signs : ndarray of int8
        maximizing sign vector, first entry +1
    """
    M = np.ascontiguousarray(M, dtype=float)
    p = M.shape[0]
    if p == 1:
        return float(np.abs(M[0]).sum()), np.ones(1, dtype=np.int8)
    free = p - 1
    low = min(free, _CHUNK_BITS)
    high = free - low
    idx = np.arange(1 << low)
    low_signs = 1 - 2 * ((idx[:, None] >> np.arange(low)) & 1)  # (2^low, low)
    base = M[0] + low_signs @ M[1:1 + low]  # (2^low, q)
    best, best_signs = -np.inf, None
    for h in range(1 << high):
        hs = 1 - 2 * ((h >> np.arange(high)) & 1)
        shift = hs @ M[1 + low:] if high else 0.0
        vals = np.abs(base + shift).sum(axis=1)
        k = int(np.argmax(vals))
        if vals[k] > best:
            best = float(vals[k])
            best_signs = np.concatenate([[1], low_signs[k], hs]).astype(np.int8)
    return best, best_signs


def seesaw_run(M, A, B, gain_tol, max_iter, zero_tol):
    """Alternating closed-form maximization of sum_ij M_ij a_i . b_j.

    ``A`` (p x n) and ``B`` (q x n) hold unit rows and are updated in place.

    Returns
    -------
    history : ndarray
        objective after the initial point and after every iteration
    capped : bool
        True when ``max_iter`` was reached without meeting ``gain_tol``
    """
    M = np.asarray(M, dtype=float)
    value = float(np.sum(M * (A @ B.T)))
    history = [value]
    for _ in range(max_iter):
        _half_step(M.T @ A, B, zero_tol)
        _half_step(M @ B, A, zero_tol)
        new = float(np.sum(M * (A @ B.T)))
        history.append(new)
        gain = new - value
        value = new
        if gain < gain_tol:
            return np.asarray(history), False
    return np.asarray(history), True


def _half_step(R, V, zero_tol):
    norms = np.linalg.norm(R, axis=1)
    ok = norms >= zero_tol
    V[ok] = R[ok] / norms[ok, None]
