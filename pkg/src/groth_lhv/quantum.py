"""Bipartite states, two-outcome observables and exact correlation evaluation."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .constants import IMAG_TOL, OPERATOR_TOL, PSD_TOL, STRUCT_TOL
from .core import _unit_array, as_hermitian, is_identity
from .errors import InconsistentCorrelation, InvalidArgument

__all__ = [
    "PAULI",
    "DensityMatrix",
    "WernerState",
    "NoisyState",
    "BellDiagonalState",
    "DichotomicObservable",
    "CorrelationData",
    "bell_state",
    "maximally_entangled",
    "singlet",
    "joint_correlation",
    "projective_qubit_observable",
    "bell_diagonal_correlation",
    "outcome_probability",
    "operator_to_dict",
    "operator_from_dict",
]

I2 = np.eye(2, dtype=complex)
X = np.array([[0, 1], [1, 0]], dtype=complex)
Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
Z = np.array([[1, 0], [0, -1]], dtype=complex)
PAULI = (X, Y, Z)

#: fixed Bell-basis order used for eigen-probabilities
BELL_ORDER = ("psi-", "psi+", "phi-", "phi+")
#: correlation triples <XX>, <YY>, <ZZ> of the Bell states, in BELL_ORDER
BELL_TRIPLES = np.array([
    [-1.0, -1.0, -1.0],
    [1.0, 1.0, -1.0],
    [-1.0, 1.0, 1.0],
    [1.0, -1.0, 1.0],
])


def bell_state(name: str) -> np.ndarray:
    s = 1 / np.sqrt(2)
    vecs = {
        "psi-": [0, s, -s, 0],
        "psi+": [0, s, s, 0],
        "phi-": [s, 0, 0, -s],
        "phi+": [s, 0, 0, s],
    }
    try:
        return np.array(vecs[name], dtype=complex)
    except KeyError:
        raise InvalidArgument(f"unknown Bell state {name!r}") from None


def singlet() -> np.ndarray:
    return bell_state("psi-")


def maximally_entangled(d: int) -> np.ndarray:
    """(1/sqrt d) sum_i |ii>."""
    psi = np.zeros(d * d, dtype=complex)
    psi[np.arange(d) * (d + 1)] = 1 / np.sqrt(d)
    return psi


@dataclass(frozen=True, eq=False)
class DensityMatrix:
    """Bipartite density operator on C^dA (x) C^dB."""

    matrix: np.ndarray
    dims: tuple

    def __post_init__(self):
        rho = as_hermitian(self.matrix)
        dA, dB = (int(d) for d in self.dims)
        if dA * dB != rho.shape[0]:
            raise InvalidArgument(f"dims {self.dims} do not match matrix size {rho.shape[0]}")
        if abs(np.trace(rho) - 1) > STRUCT_TOL:
            raise InvalidArgument("density matrix must have unit trace")
        if np.linalg.eigvalsh(rho)[0] < -PSD_TOL:
            raise InvalidArgument("density matrix has a negative eigenvalue")
        rho.setflags(write=False)
        object.__setattr__(self, "matrix", rho)
        object.__setattr__(self, "dims", (dA, dB))

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    @classmethod
    def pure(cls, psi, dims=None) -> "DensityMatrix":
        psi = np.asarray(psi, dtype=complex).reshape(-1)
        nrm = np.linalg.norm(psi)
        if abs(nrm - 1) > STRUCT_TOL:
            raise InvalidArgument("state vector must be normalized")
        if dims is None:
            d = int(round(np.sqrt(psi.size)))
            if d * d != psi.size:
                raise InvalidArgument("cannot infer local dimensions; pass dims")
            dims = (d, d)
        return cls(np.outer(psi, psi.conj()), dims)

    @classmethod
    def maximally_mixed(cls, dA: int, dB: int | None = None) -> "DensityMatrix":
        dB = dA if dB is None else dB
        return cls(np.eye(dA * dB, dtype=complex) / (dA * dB), (dA, dB))


@dataclass(frozen=True)
class NoisyState:
    """p * rho + (1 - p) * I / d^2."""

    base: DensityMatrix
    p: float

    def __post_init__(self):
        if not 0.0 <= self.p <= 1.0:
            raise InvalidArgument("visibility p must lie in [0, 1]")

    def density(self) -> DensityMatrix:
        d = self.base.dim
        rho = self.p * self.base.matrix + (1 - self.p) * np.eye(d) / d
        return DensityMatrix(rho, self.base.dims)


@dataclass(frozen=True)
class WernerState:
    """Singlet mixed with white noise at visibility p."""

    p: float

    def __post_init__(self):
        if not 0.0 <= self.p <= 1.0:
            raise InvalidArgument("visibility p must lie in [0, 1]")

    def density(self) -> DensityMatrix:
        return NoisyState(DensityMatrix.pure(singlet()), self.p).density()

    def bell_diagonal(self) -> "BellDiagonalState":
        return BellDiagonalState.from_correlations([-self.p] * 3)


@dataclass(frozen=True)
class BellDiagonalState:
    """Two-qubit state diagonal in the Bell basis.

    ``probs`` are the weights of (psi-, psi+, phi-, phi+). The correlation
    triple ``t = (<XX>, <YY>, <ZZ>)`` is the matching mixture of the rows
    of ``BELL_TRIPLES``.
    """

    probs: tuple

    def __post_init__(self):
        q = np.asarray(self.probs, dtype=float)
        if q.shape != (4,):
            raise InvalidArgument("need four Bell-basis weights")
        if np.any(q < -STRUCT_TOL) or abs(q.sum() - 1) > STRUCT_TOL:
            raise InvalidArgument("Bell-basis weights must be a probability vector")
        object.__setattr__(self, "probs", tuple(float(x) for x in np.clip(q, 0.0, None)))

    @classmethod
    def from_correlations(cls, t) -> "BellDiagonalState":
        t = np.asarray(t, dtype=float)
        A = np.vstack([np.ones(4), BELL_TRIPLES.T])
        q = np.linalg.solve(A, np.concatenate([[1.0], t]))
        return cls(tuple(q))

    @property
    def correlations(self) -> np.ndarray:
        return np.asarray(self.probs) @ BELL_TRIPLES

    def density(self) -> DensityMatrix:
        rho = sum(q * np.outer(bell_state(n), bell_state(n).conj())
                  for q, n in zip(self.probs, BELL_ORDER))
        return DensityMatrix(rho, (2, 2))


@dataclass(frozen=True, eq=False)
class DichotomicObservable:
    """Hermitian operator with spectrum in {-1, +1}."""

    op: np.ndarray
    traceless: bool = field(init=False)

    def __post_init__(self):
        A = as_hermitian(self.op, tol=OPERATOR_TOL)
        if not is_identity(A @ A, OPERATOR_TOL):
            raise InvalidArgument("observable does not square to the identity")
        A.setflags(write=False)
        object.__setattr__(self, "op", A)
        object.__setattr__(self, "traceless", bool(abs(np.trace(A)) <= OPERATOR_TOL))

    @property
    def dim(self) -> int:
        return self.op.shape[0]

    def projector(self, outcome: int) -> np.ndarray:
        """Projector onto the ``outcome`` (+1 or -1) eigenspace."""
        return (np.eye(self.dim) + outcome * self.op) / 2


@dataclass(frozen=True)
class CorrelationData:
    joint: float
    marginal_a: float = 0.0
    marginal_b: float = 0.0

    def __post_init__(self):
        for v in (self.joint, self.marginal_a, self.marginal_b):
            if not -1 - OPERATOR_TOL <= v <= 1 + OPERATOR_TOL:
                raise InvalidArgument(f"correlation value {v} outside [-1, 1]")


def _real(z: complex, what: str) -> float:
    if abs(z.imag) > IMAG_TOL:
        raise InvalidArgument(f"{what} has imaginary residue {z.imag:.3e}")
    return float(z.real)


def _as_observable(A) -> DichotomicObservable:
    return A if isinstance(A, DichotomicObservable) else DichotomicObservable(A)


def _as_density(state) -> DensityMatrix:
    if isinstance(state, DensityMatrix):
        return state
    if hasattr(state, "density"):
        return state.density()
    raise InvalidArgument(f"not a state: {type(state).__name__}")


def joint_correlation(state, A, B) -> CorrelationData:
    """tr(A (x) B rho) together with both local marginals."""
    rho = _as_density(state)
    A = _as_observable(A)
    B = _as_observable(B)
    if (A.dim, B.dim) != rho.dims:
        raise InvalidArgument(f"observables of dims {(A.dim, B.dim)} on a {rho.dims} state")
    r = rho.matrix
    joint = np.trace(np.kron(A.op, B.op) @ r)
    ma = np.trace(np.kron(A.op, np.eye(B.dim)) @ r)
    mb = np.trace(np.kron(np.eye(A.dim), B.op) @ r)
    return CorrelationData(_real(joint, "joint correlation"),
                           _real(ma, "Alice marginal"),
                           _real(mb, "Bob marginal"))


def projective_qubit_observable(a) -> DichotomicObservable:
    """The Bloch-vector observable a . sigma."""
    v = _unit_array(a, 3)
    return DichotomicObservable(v[0] * X + v[1] * Y + v[2] * Z)


def bell_diagonal_correlation(state: BellDiagonalState, a, b) -> CorrelationData:
    """Closed form sum_k t_k a_k b_k; marginals vanish identically."""
    if not isinstance(state, BellDiagonalState):
        raise InvalidArgument("expected a BellDiagonalState")
    u, v = _unit_array(a, 3), _unit_array(b, 3)
    return CorrelationData(float(np.sum(state.correlations * u * v)), 0.0, 0.0)


def outcome_probability(corr: CorrelationData, alpha: int, beta: int) -> float:
    """P(alpha, beta) = (1 + alpha<a> + beta<b> + alpha beta <ab>) / 4."""
    if alpha not in (-1, 1) or beta not in (-1, 1):
        raise InvalidArgument("outcomes must be +1 or -1")
    p = (1 + alpha * corr.marginal_a + beta * corr.marginal_b + alpha * beta * corr.joint) / 4
    if p < -OPERATOR_TOL:
        raise InconsistentCorrelation(f"probability {p} < 0 for outcomes ({alpha}, {beta})")
    return p


def operator_to_dict(M) -> dict:
    """Serialize a square complex matrix as {dim, re, im}, row-major."""
    if isinstance(M, DensityMatrix):
        M = M.matrix
    elif isinstance(M, DichotomicObservable):
        M = M.op
    M = np.asarray(M, dtype=complex)
    return {"dim": int(M.shape[0]),
            "re": M.real.reshape(-1).tolist(),
            "im": M.imag.reshape(-1).tolist()}


def operator_from_dict(data: dict) -> np.ndarray:
    d = int(data["dim"])
    re = np.asarray(data["re"], dtype=float)
    im = np.asarray(data.get("im", np.zeros(d * d)), dtype=float)
    if re.size != d * d or im.size != d * d:
        raise InvalidArgument("serialized operator has the wrong number of entries")
    return (re + 1j * im).reshape(d, d)
