"""Dictionary between two-outcome observables and real unit vectors.

Forward direction: observables measured on a pure state give unit
vectors whose dot products are the joint correlations (through the
realified vectors ``(A (x) I)|psi>`` or, on the maximally entangled state,
through coefficients over a traceless operator basis). Reverse direction:
unit vectors in R^n become observables built from n anticommuting
generators on C^d with d = 2^floor(n/2).
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import reduce

import numpy as np

from .constants import IMAG_TOL, OPERATOR_TOL, STRUCT_TOL
from .core import UnitVector
from .errors import InvalidArgument, ResourceLimitError
from .quantum import I2, X, Y, Z, DichotomicObservable, maximally_entangled

__all__ = [
    "TracelessOperatorBasis",
    "CliffordGenerators",
    "TsirelsonRealization",
    "gell_mann_basis",
    "realify",
    "observables_to_vectors",
    "observables_to_vectors_maxent",
    "clifford_generators",
    "vectors_to_observables",
]

MAX_GENERATORS = 12


@dataclass(frozen=True, eq=False)
class TracelessOperatorBasis:
    """d^2 - 1 Hermitian traceless operators with tr(g_i g_j) = d delta_ij."""

    d: int
    operators: np.ndarray  # (d^2 - 1, d, d)

    def coefficients(self, A) -> np.ndarray:
        """Real coefficients x_i with A = sum_i x_i g_i (A traceless Hermitian)."""
        A = np.asarray(A, dtype=complex)
        x = np.einsum("kij,ji->k", self.operators, A) / self.d
        if np.max(np.abs(x.imag)) > IMAG_TOL:
            raise InvalidArgument("operator is not Hermitian")
        return x.real

    def gram(self) -> np.ndarray:
        return np.einsum("aij,bji->ab", self.operators, self.operators)


def gell_mann_basis(d: int) -> TracelessOperatorBasis:
    """Generalized Gell-Mann matrices rescaled so tr(g_i g_j) = d delta_ij."""
    if d < 2:
        raise InvalidArgument("need local dimension d >= 2")
    ops = []
    for j in range(d):
        for k in range(j + 1, d):
            S = np.zeros((d, d), dtype=complex)
            S[j, k] = S[k, j] = 1
            A = np.zeros((d, d), dtype=complex)
            A[j, k], A[k, j] = -1j, 1j
            ops += [S, A]
    for l in range(1, d):
        D = np.zeros((d, d), dtype=complex)
        D[np.arange(l), np.arange(l)] = 1
        D[l, l] = -l
        ops.append(D * np.sqrt(2 / (l * (l + 1))))
    # standard normalization is tr(g_i g_j) = 2 delta_ij
    return TracelessOperatorBasis(d, np.array(ops) * np.sqrt(d / 2))


def realify(z) -> np.ndarray:
    """(Re z1, Im z1, Re z2, Im z2, ...)."""
    z = np.asarray(z, dtype=complex).reshape(-1)
    return np.column_stack([z.real, z.imag]).reshape(-1)


def _observable(A) -> DichotomicObservable:
    return A if isinstance(A, DichotomicObservable) else DichotomicObservable(A)


def observables_to_vectors(psi, A, B):
    """Unit vectors in R^(2 d^2) whose dot product is <psi|A (x) B|psi>.

    ``psi`` must be a pure state vector; decompose mixed states into pure
    components first and combine the resulting models convexly.
    """
    psi = np.asarray(psi, dtype=complex)
    if psi.ndim != 1:
        raise InvalidArgument("expected a pure state vector (mixed states must be decomposed)")
    if abs(np.linalg.norm(psi) - 1) > STRUCT_TOL:
        raise InvalidArgument("state vector must be normalized")
    A, B = _observable(A), _observable(B)
    if A.dim * B.dim != psi.size:
        raise InvalidArgument("observable dimensions do not match the state")
    ket_a = np.kron(A.op, np.eye(B.dim)) @ psi
    ket_b = np.kron(np.eye(A.dim), B.op) @ psi
    overlap = np.vdot(ket_a, ket_b)
    if abs(overlap.imag) > IMAG_TOL:
        raise InvalidArgument(f"<a|b> has imaginary part {overlap.imag:.3e}")
    return (UnitVector(realify(ket_a), normalize=True),
            UnitVector(realify(ket_b), normalize=True))


def observables_to_vectors_maxent(A, B, basis: TracelessOperatorBasis | None = None):
    """Unit vectors in R^(d^2 - 1) reproducing correlations on the maximally entangled state.

    ``a`` holds the coefficients of A and ``b`` those of B^T over the basis,
    so ``a . b = tr(A B^T) / d``.
    """
    A, B = _observable(A), _observable(B)
    if A.dim != B.dim:
        raise InvalidArgument("both observables must act on C^d")
    if not (A.traceless and B.traceless):
        raise InvalidArgument("observables must be traceless")
    basis = gell_mann_basis(A.dim) if basis is None else basis
    if basis.d != A.dim:
        raise InvalidArgument("basis dimension does not match the observables")
    a = basis.coefficients(A.op)
    b = basis.coefficients(B.op.T)
    for v in (a, b):
        if abs(np.linalg.norm(v) - 1) > OPERATOR_TOL:
            raise InvalidArgument("coefficient vector is not unit norm")
    return UnitVector(a, normalize=True), UnitVector(b, normalize=True)


@dataclass(frozen=True, eq=False)
class CliffordGenerators:
    n: int
    d: int
    generators: np.ndarray  # (n, d, d)

    def combine(self, v) -> np.ndarray:
        """sum_k v_k gamma_k."""
        return np.tensordot(np.asarray(v, dtype=float), self.generators, axes=1)


def _kron_all(ops):
    return reduce(np.kron, ops, np.eye(1, dtype=complex))


def clifford_generators(n: int) -> CliffordGenerators:
    """n mutually anticommuting Hermitian involutions on C^d, d = 2^floor(n/2).

    Jordan-Wigner strings on q = floor(n/2) qubits: Z..Z X I..I and
    Z..Z Y I..I per qubit, plus Z^(x q) for odd n. For n = 1 the single
    generator is X on one qubit, so that it stays traceless.
    """
    if n < 1:
        raise InvalidArgument("need at least one generator")
    if n > MAX_GENERATORS:
        raise ResourceLimitError(f"n = {n} needs d = 2^{n // 2}; the cap is n <= {MAX_GENERATORS}")
    if n == 1:
        return CliffordGenerators(1, 2, X[None].copy())
    q = n // 2
    gens = []
    for j in range(q):
        for P in (X, Y):
            gens.append(_kron_all([Z] * j + [P] + [I2] * (q - j - 1)))
    if n % 2:
        gens.append(_kron_all([Z] * q))
    return CliffordGenerators(n, 2 ** q, np.array(gens))


@dataclass(frozen=True, eq=False)
class TsirelsonRealization:
    alice: list
    bob: list
    state: np.ndarray
    correlations: np.ndarray
    marginals_a: np.ndarray
    marginals_b: np.ndarray


def _rows(vectors) -> np.ndarray:
    rows = [np.asarray(v.components if isinstance(v, UnitVector) else v, dtype=float)
            for v in vectors]
    if not rows:
        raise InvalidArgument("need at least one vector")
    dims = {r.size for r in rows}
    if len(dims) != 1:
        raise InvalidArgument("all vectors must have the same dimension")
    out = np.array(rows)
    if np.max(np.abs(np.linalg.norm(out, axis=1) - 1)) > STRUCT_TOL:
        raise InvalidArgument("vectors must have unit norm")
    return out


def vectors_to_observables(a_vectors, b_vectors) -> TsirelsonRealization:
    """Observables on a maximally entangled state whose correlations are the Gram matrix.

    A_i = sum_k a_ik gamma_k and B_j = (sum_k b_jk gamma_k)^T, so that
    <Phi|A_i (x) B_j|Phi> = tr(A_i B_j^T) / d = a_i . b_j.
    """
    Av, Bv = _rows(a_vectors), _rows(b_vectors)
    if Av.shape[1] != Bv.shape[1]:
        raise InvalidArgument("Alice and Bob vectors differ in dimension")
    gens = clifford_generators(Av.shape[1])
    d = gens.d
    phi = maximally_entangled(d)
    alice = [DichotomicObservable(gens.combine(a)) for a in Av]
    bob = [DichotomicObservable(gens.combine(b).T) for b in Bv]
    eye = np.eye(d)
    corr = np.array([[np.vdot(phi, np.kron(A.op, B.op) @ phi).real for B in bob] for A in alice])
    ma = np.array([np.vdot(phi, np.kron(A.op, eye) @ phi).real for A in alice])
    mb = np.array([np.vdot(phi, np.kron(eye, B.op) @ phi).real for B in bob])
    return TsirelsonRealization(alice, bob, phi, corr, ma, mb)
