"""Grothendieck constant bounds and sign-rounding local models.

The construction behind every model here: find feature maps F, G into a
unit sphere with ``<F(a), G(b)> = sin(c a.b)``, share a Gaussian vector
lambda, and let each party output the sign of its projection. Since
``E[sgn<u,lambda> sgn<v,lambda>] = (2/pi) arcsin(u.v)`` the correlation is
``(2c/pi) a.b``, a local model at visibility ``2c/pi``.

The largest usable ``c`` is fixed by requiring the absolute expansion
coefficients of ``sin(c t)`` in the chosen feature basis to sum to one.
Three bases are provided: odd Taylor monomials (any source dimension),
odd Legendre polynomials on S^2, and odd Fourier modes on S^1.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field

import numpy as np
from scipy import integrate, special

from .constants import QUAD_TOL, ROOT_RESIDUAL, STRUCT_TOL
from .core import _unit_array
from .errors import GrothLhvError, InvalidArgument, ResourceLimitError
from .lhv import LhvModel, _sgn

__all__ = [
    "KrivineRoot",
    "FeatureBlock",
    "FeatureEmbedding",
    "GROTHENDIECK_LEDGER",
    "ledger_checks",
    "c3_condition",
    "solve_c3",
    "spherical_bessel_j",
    "taylor_embedding",
    "spherical_embedding_3d",
    "circle_embedding_2d",
    "sign_rounding_correlation",
    "GaussianRounding",
    "RoundingModel",
    "rounding_model",
]

HALF_PI = math.pi / 2
DEFAULT_DIM_CAP = 100_000


# -- bound ledger -----------------------------------------------------------

GROTHENDIECK_LEDGER = {
    "K_G_lower": (1.6770, "Reeds / Davies lower bound on K_G"),
    "K_G_upper": (1.7822, "Krivine: pi / (2 ln(1 + sqrt 2))"),
    "K_G(2)": (math.sqrt(2), "Krivine: exact value for planar vectors"),
    "K_G(3)_upper": (1.5163, "Krivine: pi / (2 c3)"),
    "K_G(8)_upper": (1.6641, "Krivine; gives a local model for two-qubit states up to p = 0.6009"),
    "p_c_lower": (0.5611, "1 / K_G upper bound"),
    "p_c_upper": (0.5963, "1 / K_G lower bound"),
}

#: (bound, threshold) pairs that must be reciprocal
_RECIPROCAL_PAIRS = [("K_G_upper", "p_c_lower"), ("K_G_lower", "p_c_upper")]


def ledger_checks(tol: float = 5e-5) -> dict:
    """Reciprocity residuals |1/bound - threshold| for the ledger pairs."""
    out = {}
    for bound, thr in _RECIPROCAL_PAIRS:
        resid = abs(1 / GROTHENDIECK_LEDGER[bound][0] - GROTHENDIECK_LEDGER[thr][0])
        out[f"{bound}*{thr}"] = {"residual": resid, "ok": resid <= tol}
    return out


# -- roots ----------------------------------------------------------------------

@dataclass(frozen=True)
class KrivineRoot:
    order: str
    c: float
    residual: float

    def __post_init__(self):
        if not 0 < self.c <= HALF_PI + STRUCT_TOL:
            raise InvalidArgument(f"root {self.c} outside (0, pi/2]")

    @property
    def upper_bound(self) -> float:
        return HALF_PI / self.c

    @property
    def model_visibility(self) -> float:
        return self.c / HALF_PI

    def to_dict(self) -> dict:
        return {"order": self.order, "c": self.c, "upper_bound": self.upper_bound,
                "model_visibility": self.model_visibility, "residual": self.residual}


def _bisect(f, lo: float, hi: float, target: float = 1.0) -> tuple[float, float]:
    """Root of ``f(x) = target`` for increasing ``f``; bisection, then one secant polish."""
    flo, fhi = f(lo) - target, f(hi) - target
    if flo > 0 or fhi < 0:
        raise GrothLhvError(f"root not bracketed on [{lo}, {hi}]: {flo}, {fhi}")
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if mid in (lo, hi):
            break
        fm = f(mid) - target
        if fm < 0:
            lo, flo = mid, fm
        else:
            hi, fhi = mid, fm
    x = lo if abs(flo) <= abs(fhi) else hi
    if fhi != flo:
        sec = lo - flo * (hi - lo) / (fhi - flo)
        if lo <= sec <= hi and abs(f(sec) - target) < abs(f(x) - target):
            x = sec
    resid = abs(f(x) - target)
    if resid > ROOT_RESIDUAL:
        raise GrothLhvError(f"root residual {resid:.3e} exceeds {ROOT_RESIDUAL}")
    return x, resid


def _sinc_sq(u):
    # 2 sin(u^2) / u^2, smooth at 0
    return 2.0 * np.sinc(u * u / np.pi)


def c3_condition(c: float) -> float:
    """(sqrt c / 2) * integral_0^c t^(-3/2) sin t dt, via t = u^2."""
    if c <= 0:
        return 0.0
    r = math.sqrt(c)
    val, _ = integrate.quad(_sinc_sq, 0.0, r, epsabs=QUAD_TOL, epsrel=QUAD_TOL, limit=200)
    return 0.5 * r * val


def solve_c3() -> KrivineRoot:
    """Root of the order-3 normalization condition on [1e-6, pi/2]."""
    c, resid = _bisect(c3_condition, 1e-6, HALF_PI)
    return KrivineRoot("3", c, resid)


# -- special functions --------------------------------------------------------

def spherical_bessel_j(lmax: int, x: float) -> np.ndarray:
    """j_0(x) ... j_lmax(x) by downward (Miller) recurrence, scaled to j_0 = sin x / x."""
    if lmax < 0:
        raise InvalidArgument("lmax must be >= 0")
    out = np.zeros(lmax + 1)
    if x == 0.0:
        out[0] = 1.0
        return out
    start = lmax + int(math.sqrt(40.0 * max(lmax, x))) + 20
    j_next, j_cur = 0.0, 1e-300
    vals = np.zeros(start + 1)
    vals[start] = j_cur
    for l in range(start, 0, -1):
        j_prev = (2 * l + 1) / x * j_cur - j_next
        j_next, j_cur = j_cur, j_prev
        vals[l - 1] = j_cur
        if abs(j_cur) > 1e250:  # rescale to stay finite
            vals[l - 1:] *= 1e-250
            j_next *= 1e-250
            j_cur *= 1e-250
    scale = (math.sin(x) / x) / vals[0]
    out[:] = vals[:lmax + 1] * scale
    return out


def _legendre_sum(c: float, l_stop: int = 41) -> float:
    j = spherical_bessel_j(l_stop, c)
    ls = np.arange(1, l_stop + 1, 2)
    return float(np.sum((2 * ls + 1) * j[ls]))


def _bessel_odd_sum(c: float, k_stop: int = 30) -> float:
    ls = 2 * np.arange(k_stop) + 1
    return float(2 * np.sum(special.jv(ls, c)))


# -- embeddings -----------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class FeatureBlock:
    """One expansion term: unit-norm feature map scaled by sqrt(|weight|).

    ``sign`` multiplies the Bob-side copy so that the block contributes
    ``sign * weight * kernel(a . b)`` to the inner product.
    """

    label: str
    weight: float
    sign: int
    size: int
    features: object = field(repr=False)


@dataclass(frozen=True, eq=False)
class FeatureEmbedding:
    """Truncated pair of feature maps F (Alice), G (Bob).

    ``weights`` keeps the exact expansion coefficients of the kept blocks;
    the last block is stretched by ``1 - sum(weights)`` so the maps are
    exactly unit norm. ``tail_bound`` bounds ``|<F(a), G(b)> - sin(c a.b)|``.
    """

    source_dim: int
    blocks: tuple
    weights: tuple
    truncation_order: int
    discarded: float
    tail_bound: float
    c: float

    @property
    def target_dim(self) -> int:
        return sum(b.size for b in self.blocks)

    @property
    def ledger(self):
        return [(b.label, w) for b, w in zip(self.blocks, self.weights)]

    def _effective(self):
        w = list(self.weights)
        w[-1] = 1.0 - math.fsum(w[:-1])
        return w

    def _map(self, x, bob: bool):
        X = np.asarray(x, dtype=float)
        single = X.ndim == 1
        X = np.atleast_2d(X)
        if X.shape[1] != self.source_dim:
            raise InvalidArgument(f"expected {self.source_dim}-dimensional inputs")
        X = X / np.linalg.norm(X, axis=1)[:, None]
        parts = []
        for blk, w in zip(self.blocks, self._effective()):
            s = blk.sign if bob else 1
            parts.append(s * math.sqrt(w) * blk.features(X))
        out = np.concatenate(parts, axis=1)
        return out[0] if single else out

    def alice(self, a):
        return self._map(a, bob=False)

    def bob(self, b):
        return self._map(b, bob=True)

    def kernel(self, a, b) -> float:
        return float(self.alice(a) @ self.bob(b))


def _finish(source_dim, c, terms, tail_tol, dim_cap):
    """Pick the shortest prefix of ``terms`` whose truncation error is within ``tail_tol``.

    ``terms`` yields ``(label, weight, sign, size, make_features)`` with
    weights summing to one; the tail is the sum of all later weights.
    Feature maps are only built for kept blocks.
    """
    terms = list(terms)
    weights = [t[1] for t in terms]
    for L in range(1, len(terms) + 1):
        discarded = math.fsum(weights[L:])
        stretch = 1.0 - math.fsum(weights[:L])
        bound = discarded + abs(stretch)
        if bound <= tail_tol:
            break
    else:
        raise ResourceLimitError("expansion too short to reach the requested tail tolerance")
    kept = terms[:L]
    dim = sum(t[3] for t in kept)
    if dim > dim_cap:
        raise ResourceLimitError(
            f"embedding dimension {dim} exceeds cap {dim_cap}; "
            "use a larger tail tolerance or a smaller source dimension")
    blocks = tuple(FeatureBlock(lab, w, sg, size, make()) for lab, w, sg, size, make in kept)
    return FeatureEmbedding(source_dim, blocks, tuple(weights[:L]), L,
                            discarded, bound, c)


def _monomial_features(n: int, k: int):
    """Weighted monomials whose dot products give (a . b)^k."""
    idx = np.array(list(itertools.combinations_with_replacement(range(n), k)), dtype=int)
    coef = np.array([math.sqrt(math.factorial(k) /
                               math.prod(math.factorial(m) for m in np.bincount(r, minlength=n)))
                     for r in idx])

    def feat(X):
        return X[:, idx].prod(axis=2) * coef

    return feat


def taylor_embedding(n: int, tail_tol: float = 1e-6, dim_cap: int = DEFAULT_DIM_CAP):
    """Dimension-free embedding from the odd Taylor series of sin.

    Degree-``k`` blocks are symmetric tensor powers of the input, stored
    as weighted monomials so the block width is C(n+k-1, k) rather than
    n^k. Weights are c^k / k! with c = asinh(1).
    """
    if n < 1:
        raise InvalidArgument("source dimension must be >= 1")
    if tail_tol <= 0:
        raise InvalidArgument("tail tolerance must be positive")
    c, resid = _bisect(math.sinh, 1e-6, HALF_PI)
    root = KrivineRoot("taylor", c, resid)

    def terms():
        for j in range(15):
            k = 2 * j + 1
            yield (f"deg{k}", c ** k / math.factorial(k), (-1) ** j,
                   math.comb(n + k - 1, k), lambda k=k: _monomial_features(n, k))

    return _finish(n, c, terms(), tail_tol, dim_cap), root


def _real_harmonics(l: int):
    """Unit-block real spherical harmonics: sum over the block equals P_l(a . b)."""
    ms = np.arange(1, l + 1)
    norms = np.sqrt(2.0 * np.exp(special.gammaln(l - ms + 1) - special.gammaln(l + ms + 1)))

    def feat(X):
        z = np.clip(X[:, 2], -1.0, 1.0)
        phi = np.arctan2(X[:, 1], X[:, 0])
        cols = [special.eval_legendre(l, z)]
        for m, nm in zip(ms, norms):
            plm = nm * special.lpmv(m, l, z)
            cols.append(plm * np.cos(m * phi))
            cols.append(plm * np.sin(m * phi))
        return np.stack(cols, axis=1)

    return feat


def spherical_embedding_3d(tail_tol: float = 1e-6, dim_cap: int = DEFAULT_DIM_CAP):
    """Embedding of S^2 from the odd Legendre expansion of sin(c t).

    sin(c t) = sum_{l odd} (-1)^((l-1)/2) (2l+1) j_l(c) P_l(t); c solves
    sum_{l odd} (2l+1) j_l(c) = 1.
    """
    if tail_tol <= 0:
        raise InvalidArgument("tail tolerance must be positive")
    c, resid = _bisect(_legendre_sum, 1e-6, HALF_PI)
    root = KrivineRoot("3", c, resid)
    lmax = 41
    j = spherical_bessel_j(lmax, c)

    def terms():
        for l in range(1, lmax + 1, 2):
            yield (f"l={l}", float((2 * l + 1) * j[l]), (-1) ** ((l - 1) // 2), 2 * l + 1,
                   lambda l=l: _real_harmonics(l))

    return _finish(3, c, terms(), tail_tol, dim_cap), root


def _fourier_features(l: int):
    def feat(X):
        th = np.arctan2(X[:, 1], X[:, 0])
        return np.stack([np.cos(l * th), np.sin(l * th)], axis=1)

    return feat


def circle_embedding_2d(tail_tol: float = 1e-6, dim_cap: int = DEFAULT_DIM_CAP):
    """Embedding of S^1 from the Jacobi-Anger expansion.

    sin(c cos t) = 2 sum_k (-1)^k J_{2k+1}(c) cos((2k+1) t); c solves
    2 sum_k J_{2k+1}(c) = 1, i.e. integral_0^c J_0 = 1. The resulting model
    reaches visibility 2c/pi, just short of 1/sqrt 2.
    """
    if tail_tol <= 0:
        raise InvalidArgument("tail tolerance must be positive")
    c, resid = _bisect(_bessel_odd_sum, 1e-6, HALF_PI)
    root = KrivineRoot("2", c, resid)

    def terms():
        for k in range(30):
            l = 2 * k + 1
            yield (f"m={l}", 2 * float(special.jv(l, c)), (-1) ** k, 2,
                   lambda l=l: _fourier_features(l))

    return _finish(2, c, terms(), tail_tol, dim_cap), root


def planar_gap(root: KrivineRoot) -> dict:
    """How far the Fourier-Bessel model falls short of visibility 1/sqrt 2."""
    exact = 1 / math.sqrt(2)
    return {"exact_visibility": exact,
            "model_visibility": root.model_visibility,
            "gap": exact - root.model_visibility,
            "c_needed": math.pi / (2 * math.sqrt(2)),
            "c_bessel": root.c}


# -- sign rounding --------------------------------------------------------------

def sign_rounding_correlation(u, v) -> float:
    """(2/pi) arcsin(u . v) for unit vectors u, v."""
    x = float(np.dot(np.asarray(u, dtype=float), np.asarray(v, dtype=float)))
    return 2 / math.pi * math.asin(max(-1.0, min(1.0, x)))


class GaussianRounding(LhvModel):
    """Hyperplane rounding in R^D: outputs sgn<u, lambda>, sgn<v, lambda>."""

    def __init__(self, dim: int):
        if dim < 1:
            raise InvalidArgument("dimension must be >= 1")
        self.hidden_dim = dim
        self.label = f"gaussian-rounding({dim})"

    def sample(self, rng, key, size):
        return {"lam": rng.generator(*key).standard_normal((size, self.hidden_dim))}

    def setting(self, x):
        return _unit_array(x, self.hidden_dim)

    def alice(self, hidden, a):
        return _sgn(hidden["lam"] @ a)

    def bob(self, hidden, b):
        return _sgn(hidden["lam"] @ b)

    def predicted(self, a, b):
        return (sign_rounding_correlation(a, b), 0.0, 0.0)


class RoundingModel(LhvModel):
    """Sign rounding of a feature embedding.

    Alice outputs ``-sgn<F(a), lambda>`` (``+`` without ``singlet_sign``),
    Bob ``sgn<G(b), lambda>``, with lambda standard normal in R^D.
    """

    def __init__(self, emb: FeatureEmbedding, root: KrivineRoot, singlet_sign: bool = True):
        self.emb = emb
        self.root = root
        self.singlet_sign = bool(singlet_sign)
        self.hidden_dim = emb.target_dim
        self.label = f"krivine-{root.order}"

    @property
    def visibility(self) -> float:
        return self.root.model_visibility

    def sample(self, rng, key, size):
        return {"lam": rng.generator(*key).standard_normal((size, self.hidden_dim))}

    def setting(self, x):
        return _unit_array(x, self.emb.source_dim)

    def alice(self, hidden, a):
        s = _sgn(hidden["lam"] @ self.emb.alice(a))
        return -s if self.singlet_sign else s

    def bob(self, hidden, b):
        return _sgn(hidden["lam"] @ self.emb.bob(b))

    def predicted(self, a, b):
        """Exact correlation of the truncated model."""
        j = sign_rounding_correlation(self.emb.alice(a), self.emb.bob(b))
        return (-j if self.singlet_sign else j, 0.0, 0.0)

    def target(self, a, b) -> float:
        """Correlation of the untruncated model: -/+ (2c/pi) a . b."""
        j = self.root.model_visibility * float(np.dot(a, b))
        return -j if self.singlet_sign else j

    @property
    def correlation_error_bound(self) -> float:
        """Bound on |predicted - target| from the truncation tail."""
        t = self.emb.tail_bound
        top = min(1.0, math.sin(min(self.root.c, HALF_PI)) + t)
        if top >= 1.0:
            return math.sqrt(2 * t)  # Hoelder modulus of arcsin at the endpoint
        return 2 / math.pi * t / math.sqrt(1 - top * top)


def rounding_model(emb: FeatureEmbedding, root: KrivineRoot, singlet_sign: bool = True):
    return RoundingModel(emb, root, singlet_sign)
