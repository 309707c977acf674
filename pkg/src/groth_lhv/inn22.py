"""The I_nn22 family of two-outcome Bell inequalities.

For states with uniformly random marginals (Bell-diagonal states under
projective measurements) every marginal probability equals 1/2, and the
inequality ``I'_n <= 0`` splits into a positive combination of CHSH-type
``I'_2`` inequalities and terms ``p(a_j, b_l) - 1/2`` that are never
positive:

    (n - 1) I'_n = sum of s1(n) I'_2 terms + sum of s2(n) (p - 1/2) terms

with s1(n) = n(n^2 - 1)/6 and s2(n) = (n - 1)(n - 2)(n - 3)/6. Hence a
violation of I_nn22 by such a state implies a CHSH violation.

Settings are numbered from 1 in everything user-facing, matching the usual
``I'_2(ijkl)`` notation: Alice uses settings i, j and Bob k, l in
``p(a_i b_k) + p(a_i b_l) + p(a_j b_k) - p(a_j b_l) - p(a_i) - p(b_k)``.
"""
from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .core import RandomSource, sample_sphere
from .errors import InvalidArgument, TheoremViolation
from .quantum import BellDiagonalState

__all__ = [
    "Inn22Inequality",
    "DecompositionCertificate",
    "ImplicationReport",
    "s1",
    "s2",
    "generate",
    "evaluate_bell_diagonal",
    "evaluate_probabilities",
    "chsh_term_value",
    "decompose",
    "verify_identity",
    "check_chsh_implication",
]

MAX_N = 16


def s1(n: int) -> int:
    return n * (n * n - 1) // 6


def s2(n: int) -> int:
    return (n - 1) * (n - 2) * (n - 3) // 6


@dataclass(frozen=True, eq=False)
class Inn22Inequality:
    """Coefficients of ``sum J_ij p(a_i b_j) + sum alpha_i p(a_i) + sum beta_j p(b_j) <= 0``."""

    n: int
    joint: np.ndarray  # (n, n) int
    alice_marginals: np.ndarray  # (n,) int
    bob_marginals: np.ndarray  # (n,) int
    local_bound: int = 0

    def table(self) -> np.ndarray:
        """The (n+1) x (n+1) display table: Bob marginals on top, Alice's on the left."""
        T = np.zeros((self.n + 1, self.n + 1), dtype=int)
        T[0, 1:] = self.bob_marginals
        T[1:, 0] = self.alice_marginals
        T[1:, 1:] = self.joint
        return T


def generate(n: int) -> Inn22Inequality:
    """Coefficient pattern of I_nn22.

    Row ``r`` (1-based) of the joint block holds ones in columns
    ``1..n+1-r`` followed by a single -1, then zeros; Alice's marginal
    coefficient is ``-(n-r)``, Bob's are ``(-1, 0, ..., 0)``.
    """
    if not 2 <= n <= MAX_N:
        raise InvalidArgument(f"n must lie in [2, {MAX_N}]")
    J = np.zeros((n, n), dtype=int)
    for r in range(1, n + 1):
        ones = n + 1 - r
        J[r - 1, :ones] = 1
        if ones < n:
            J[r - 1, ones] = -1
    alpha = -(n - np.arange(1, n + 1))
    beta = np.zeros(n, dtype=int)
    beta[0] = -1
    return Inn22Inequality(n, J, alpha.astype(int), beta)


def evaluate_probabilities(ineq: Inn22Inequality, p_joint) -> float:
    """I'_n for joint probabilities ``p_joint[i, j] = p(a_i = +1, b_j = +1)``.

    All marginal probabilities are taken to be 1/2.
    """
    P = np.asarray(p_joint, dtype=float)
    if P.shape != (ineq.n, ineq.n):
        raise InvalidArgument(f"need an {ineq.n} x {ineq.n} probability table")
    return float(np.sum(ineq.joint * P) + 0.5 * (ineq.alice_marginals.sum() + ineq.bob_marginals.sum()))


def _correlations(state: BellDiagonalState, a_settings, b_settings) -> np.ndarray:
    A = np.asarray([np.asarray(a, dtype=float) for a in a_settings])
    B = np.asarray([np.asarray(b, dtype=float) for b in b_settings])
    if A.ndim != 2 or B.ndim != 2 or A.shape[1] != 3 or B.shape[1] != 3:
        raise InvalidArgument("settings must be 3-dimensional unit vectors")
    return (A * state.correlations) @ B.T


def evaluate_bell_diagonal(ineq: Inn22Inequality, state: BellDiagonalState,
                           a_settings, b_settings) -> float:
    """I'_n of projective measurements along the given Bloch vectors.

    With uniform marginals ``p(a_i, b_j) = (1 + <alpha_i beta_j>) / 4``.
    """
    if len(a_settings) != ineq.n or len(b_settings) != ineq.n:
        raise InvalidArgument(f"need {ineq.n} settings per party")
    E = _correlations(state, a_settings, b_settings)
    return evaluate_probabilities(ineq, (1 + E) / 4)


def chsh_term_value(P, term) -> float:
    """I'_2(ijkl) = p_ik + p_il + p_jk - p_jl - 1 on a joint-probability table."""
    i, j, k, l = (t - 1 for t in term)
    return float(P[i, k] + P[i, l] + P[j, k] - P[j, l] - 1)


@dataclass(frozen=True)
class DecompositionCertificate:
    n: int
    chsh_terms: tuple  # (i, j, k, l), 1-based
    negative_terms: tuple  # (j, l), 1-based
    scale: Fraction


def decompose(n: int) -> DecompositionCertificate:
    """CHSH decomposition of I'_n.

    Every -1 entry ``(j, l)`` of the joint block (``j + l = n + 2``) is the
    negative corner of the CHSH terms ``I'_2(i j k l)`` for all ``i < j``,
    ``k < l``; the ``(j-1)(l-1) - (n-1)`` surplus copies of ``-p(a_j b_l)``
    are cancelled by that many ``p(a_j b_l) - 1/2`` terms. Each +1 entry
    ``(r, c)`` is then covered ``(n+1-r-c) + (r-1) + (c-1) = n - 1`` times.
    The certificate is checked by :func:`verify_identity` before return.
    """
    if not 2 <= n <= 12:
        raise InvalidArgument("decomposition is provided for 2 <= n <= 12")
    chsh, neg = [], []
    for j in range(2, n + 1):
        l = n + 2 - j
        for i in range(1, j):
            for k in range(1, l):
                chsh.append((i, j, k, l))
        neg += [(j, l)] * ((j - 2) * (n - j))
    cert = DecompositionCertificate(n, tuple(chsh), tuple(neg), Fraction(1, n - 1))
    ok, resid = verify_identity(cert)
    if not ok:
        raise TheoremViolation(f"decomposition identity fails for n = {n}: {resid}")
    return cert


def _form_inn22(ineq: Inn22Inequality) -> Counter:
    form = Counter()
    for i in range(ineq.n):
        for j in range(ineq.n):
            if ineq.joint[i, j]:
                form[(i + 1, j + 1)] += Fraction(int(ineq.joint[i, j]))
    form["1"] += Fraction(int(ineq.alice_marginals.sum() + ineq.bob_marginals.sum()), 2)
    return form


def verify_identity(cert: DecompositionCertificate):
    """Exact check of ``I'_n = scale * (sum I'_2 + sum (p - 1/2))``.

    Both sides are linear forms in the joint probabilities with rational
    coefficients. Returns ``(ok, residual)`` where ``residual`` maps every
    mismatched coefficient to its difference.
    """
    lhs = _form_inn22(generate(cert.n))
    rhs = Counter()
    for (i, j, k, l) in cert.chsh_terms:
        rhs[(i, k)] += 1
        rhs[(i, l)] += 1
        rhs[(j, k)] += 1
        rhs[(j, l)] -= 1
        rhs["1"] -= 1
    for (a, b) in cert.negative_terms:
        rhs[(a, b)] += 1
        rhs["1"] -= Fraction(1, 2)
    keys = set(lhs) | set(rhs)
    resid = {k: lhs[k] - cert.scale * rhs[k] for k in keys}
    resid = {k: v for k, v in resid.items() if v != 0}
    return not resid, resid


def _ascend(J, t, A, B, sweeps):
    # maximize sum_ij J_ij a_i . (t * b_j) over unit vectors
    for _ in range(sweeps):
        R = J.T @ (A * t)
        B = R / np.maximum(np.linalg.norm(R, axis=1), 1e-300)[:, None]
        R = J @ (B * t)
        A = R / np.maximum(np.linalg.norm(R, axis=1), 1e-300)[:, None]
    # keep rows exactly representable as settings
    A[np.linalg.norm(A, axis=1) == 0] = [0.0, 0.0, 1.0]
    B[np.linalg.norm(B, axis=1) == 0] = [0.0, 0.0, 1.0]
    return A, B


@dataclass
class ImplicationReport:
    trials: int
    violations: dict  # n -> trials with I'_n > tol
    counterexamples: int
    max_value: float

    def to_dict(self) -> dict:
        return {"trials": self.trials,
                "violations": {str(k): v for k, v in self.violations.items()},
                "counterexamples": self.counterexamples,
                "max_value": self.max_value}


def check_chsh_implication(trials: int, rng: RandomSource, ns=(3, 4, 5), tol: float = 1e-12,
                   concentration: float = 0.3, sweeps: int = 8) -> ImplicationReport:
    """Random search for an I_nn22 violation without a CHSH violation.

    Each trial draws a Bell-diagonal state (Dirichlet weights with the given
    concentration, so near-pure states are common) and uniformly random
    settings; on every other trial the settings are then pushed uphill by a
    few see-saw sweeps, since random settings rarely violate anything.
    Whenever I'_n > ``tol`` some term of the certificate must be positive;
    a trial where none is counts as a counterexample.
    """
    if trials < 1:
        raise InvalidArgument("need at least one trial")
    g = rng.generator()
    certs = {n: decompose(n) for n in ns}
    ineqs = {n: generate(n) for n in ns}
    violations = {n: 0 for n in ns}
    bad = 0
    best = -np.inf
    for t in range(trials):
        n = ns[t % len(ns)]
        state = BellDiagonalState(tuple(g.dirichlet([concentration] * 4)))
        A = sample_sphere(g, 3, n)
        B = sample_sphere(g, 3, n)
        if t % 2:
            A, B = _ascend(ineqs[n].joint, state.correlations, A, B, sweeps)
        P = (1 + _correlations(state, A, B)) / 4
        val = evaluate_probabilities(ineqs[n], P)
        best = max(best, val)
        if val > tol:
            violations[n] += 1
            if max(chsh_term_value(P, term) for term in certs[n].chsh_terms) <= 0:
                bad += 1
    return ImplicationReport(trials, violations, bad, float(best))
