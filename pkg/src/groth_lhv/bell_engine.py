"""Correlation Bell inequalities: exact local bounds and see-saw vector bounds.

A correlation inequality is a real coefficient matrix ``M``; its local
bound is the largest ``|sum_ij M_ij a_i b_j|`` over sign assignments and
its dimension-``n`` vector value replaces the signs by unit vectors in
R^n. The ratio of the two lower-bounds the Grothendieck constant of
order ``n``.
"""
from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .constants import (LOCAL_BOUND_CAP, SEESAW_GAIN_TOL, SEESAW_MAX_ITER,
                        STRUCT_TOL, ZERO_RESULTANT)
from .core import RandomSource, as_real_matrix, sample_sphere
from .errors import DegenerateInequality, InvalidArgument, ResourceLimitError

__all__ = [
    "CHSH",
    "BellCorrelationInequality",
    "VectorStrategy",
    "BoundReport",
    "Threshold",
    "local_bound",
    "local_optimum",
    "normalize",
    "seesaw_vector_bound",
    "violation_threshold",
    "read_matrix_csv",
    "format_matrix_csv",
]

CHSH = np.array([[1.0, 1.0], [1.0, -1.0]])


def local_optimum(M, cap: int = LOCAL_BOUND_CAP):
    """Exact deterministic optimum of a correlation inequality.

    Returns
    -------
    value : float
        ``max |a^T M b|`` over sign vectors, recomputed with ``math.fsum``
        from the maximizing signs so the result is the correctly rounded
        sum of the (exact) signed coefficients
    a, b : ndarray of int
        maximizing sign vectors
    """
    M = as_real_matrix(M)
    transpose = M.shape[0] > M.shape[1]
    W = np.ascontiguousarray(M.T if transpose else M)
    if W.shape[0] > cap:
        raise ResourceLimitError(
            f"exhaustive local bound needs 2^{W.shape[0] - 1} sign patterns; "
            f"raise the cap (currently {cap}) to allow m = {W.shape[0]}")
    _, s = kernels.local_bound_signs(W)
    s = s.astype(int)
    col = s @ W
    t = np.where(col >= 0, 1, -1)
    value = math.fsum((W * np.outer(s, t)).ravel())
    if transpose:
        s, t = t, s
    return value, s, t


def local_bound(M, cap: int = LOCAL_BOUND_CAP) -> float:
    """``max over a, b in {-1,+1} of |sum_ij M_ij a_i b_j|``."""
    return local_optimum(M, cap)[0]


@dataclass(frozen=True, eq=False)
class BellCorrelationInequality:
    M: np.ndarray
    local_bound: float
    normalized: bool = False

    @property
    def m(self) -> int:
        return self.M.shape[0]

    @classmethod
    def from_matrix(cls, M, cap: int = LOCAL_BOUND_CAP) -> "BellCorrelationInequality":
        M = as_real_matrix(M)
        lb = local_bound(M, cap)
        return cls(M, lb, normalized=abs(lb - 1) <= STRUCT_TOL)


def normalize(M, cap: int = LOCAL_BOUND_CAP) -> BellCorrelationInequality:
    """Rescale ``M`` so its local bound is one."""
    M = as_real_matrix(M)
    lb = local_bound(M, cap)
    if lb <= 0:
        raise DegenerateInequality("inequality has zero local bound")
    N = M / lb
    return BellCorrelationInequality(N, local_bound(N, cap), normalized=True)


@dataclass(frozen=True, eq=False)
class VectorStrategy:
    a_vectors: np.ndarray
    b_vectors: np.ndarray
    value: float

    @property
    def dim(self) -> int:
        return self.a_vectors.shape[1]

    def recompute(self, M) -> float:
        return float(np.sum(np.asarray(M) * (self.a_vectors @ self.b_vectors.T)))


@dataclass(frozen=True, eq=False)
class BoundReport:
    local: float
    value: float
    dim: int
    ratio: float
    certificate: VectorStrategy
    restarts: int
    iterations: int
    capped: bool
    best_restart: int = 0
    history: np.ndarray = field(default=None, repr=False)

    @property
    def m(self) -> int:
        return self.certificate.a_vectors.shape[0]

    def to_dict(self) -> dict:
        th = violation_threshold(self)
        return {
            "m": self.m,
            "dim": self.dim,
            "local": self.local,
            "value": self.value,
            "ratio": self.ratio,
            "threshold": th.value,
            "violation": th.violation,
            "a_vectors": self.certificate.a_vectors.tolist(),
            "b_vectors": self.certificate.b_vectors.tolist(),
            "restarts": self.restarts,
            "iterations": self.iterations,
            "capped": self.capped,
        }


def _run(M, A, B):
    A = np.ascontiguousarray(A, dtype=float)
    B = np.ascontiguousarray(B, dtype=float)
    hist, capped = kernels.seesaw_run(np.ascontiguousarray(M), A, B,
                                      SEESAW_GAIN_TOL, SEESAW_MAX_ITER, ZERO_RESULTANT)
    return A, B, np.asarray(hist), bool(capped)


def seesaw_vector_bound(ineq, dim: int, restarts: int = 10,
                        rng: RandomSource | None = None,
                        init=None) -> BoundReport:
    """Best see-saw vector value of ``ineq`` with unit vectors in R^dim.

    Restart 0 starts from the deterministic local optimum embedded along
    the first axis, so the reported ratio is never below one. Restarts
    ``1..restarts-1`` start from uniformly random vectors, restart ``r``
    drawing from stream ``r`` of ``rng``. An explicit ``init=(A, B)`` pair
    (zero-padded to ``dim`` if narrower) is run as an extra restart.

    The result is a lower bound on the dimension-``dim`` maximum.
    """
    if not isinstance(ineq, BellCorrelationInequality):
        ineq = BellCorrelationInequality.from_matrix(ineq)
    if dim < 1:
        raise InvalidArgument("vector dimension must be >= 1")
    if restarts < 1:
        raise InvalidArgument("need at least one restart")
    rng = RandomSource(0) if rng is None else rng
    M = np.ascontiguousarray(ineq.M, dtype=float)
    p, q = M.shape
    if ineq.local_bound <= 0:
        raise DegenerateInequality("inequality has zero local bound")

    _, sa, sb = local_optimum(M)
    starts = []
    A0 = np.zeros((p, dim))
    B0 = np.zeros((q, dim))
    A0[:, 0] = sa
    B0[:, 0] = sb
    starts.append((A0, B0))
    for r in range(1, restarts):
        g = rng.fork(rng.stream + r).generator()
        starts.append((sample_sphere(g, dim, p), sample_sphere(g, dim, q)))
    if init is not None:
        Ai, Bi = (np.asarray(x, dtype=float) for x in init)
        if Ai.shape[1] > dim or Bi.shape[1] > dim:
            raise InvalidArgument("initial vectors wider than the target dimension")
        A1 = np.zeros((p, dim))
        B1 = np.zeros((q, dim))
        A1[:, :Ai.shape[1]] = Ai
        B1[:, :Bi.shape[1]] = Bi
        starts.append((A1, B1))

    best = None
    total_iter = 0
    any_capped = False
    for r, (A, B) in enumerate(starts):
        A, B, hist, capped = _run(M, A, B)
        total_iter += len(hist) - 1
        any_capped |= capped
        val = float(np.sum(M * (A @ B.T)))
        # strict comparison keeps the lowest restart index on ties
        if best is None or val > best[0]:
            best = (val, A, B, hist, r, capped)
    val, A, B, hist, r, capped = best
    cert = VectorStrategy(A, B, val)
    return BoundReport(local=ineq.local_bound, value=val, dim=dim,
                       ratio=val / ineq.local_bound, certificate=cert,
                       restarts=len(starts), iterations=total_iter,
                       capped=capped, best_restart=r, history=hist)


@dataclass(frozen=True)
class Threshold:
    value: float
    violation: bool


def violation_threshold(report) -> Threshold:
    """Visibility ``1/ratio`` above which the certificate violates on the singlet.

    Accepts a :class:`BoundReport` or a bare ratio. Ratios not exceeding
    one give ``Threshold(1.0, violation=False)``.
    """
    ratio = report.ratio if isinstance(report, BoundReport) else float(report)
    if ratio <= 1 + STRUCT_TOL:
        return Threshold(1.0, False)
    return Threshold(1.0 / ratio, True)


def read_matrix_csv(text_or_path) -> np.ndarray:
    """Parse a CSV of decimal reals into a matrix.

    Accepts a path or the CSV text itself (anything containing a comma or
    newline is treated as text). Blank lines and ``#`` comments are skipped.
    """
    if isinstance(text_or_path, str) and ("," in text_or_path or "\n" in text_or_path):
        text = text_or_path
    else:
        with open(text_or_path, newline="") as fh:
            text = fh.read()
    rows = []
    for row in csv.reader(io.StringIO(text)):
        if not row or row[0].strip().startswith("#"):
            continue
        try:
            rows.append([float(x) for x in row if x.strip() != ""])
        except ValueError as exc:
            raise InvalidArgument(f"malformed CSV entry: {exc}") from None
    rows = [r for r in rows if r]
    if not rows or len({len(r) for r in rows}) != 1:
        raise InvalidArgument("CSV must contain rows of equal length")
    return as_real_matrix(rows)


def format_matrix_csv(M) -> str:
    return "\n".join(",".join(repr(float(x)) for x in row) for row in np.asarray(M)) + "\n"
