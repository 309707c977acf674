"""Local hidden variable models and their seeded Monte Carlo estimation.

A model draws a batch of hidden variables from a random stream and maps
each party's setting to +/-1 outcomes using only its own setting and the
shared hidden variables. Estimation splits the sample index range into
fixed blocks, block ``k`` always drawing from sub-stream ``k``, so any
sharding of the range reproduces the single-shot tallies exactly.
"""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .constants import MC_BLOCK
from .core import RandomSource, _unit_array
from .errors import InvalidArgument, OutOfRange

__all__ = [
    "LhvModel",
    "WernerModel",
    "ConstantModel",
    "BiasedCoinModel",
    "RandomizedMarginals",
    "VisibilityMixture",
    "McEstimate",
    "Tally",
    "Estimate",
    "werner_model",
    "randomize_marginals",
    "simulate_visibility",
    "estimate",
    "estimate_range",
]

# sub-stream tags for wrapper layers; inner models keep the caller's key
_TAG_MARGINALS = 101
_TAG_VISIBILITY = 102


def _sgn(x: np.ndarray) -> np.ndarray:
    """Sign with sgn(0) = +1, as int8."""
    return np.where(x >= 0, 1, -1).astype(np.int8)


class LhvModel:
    """Base class.

    Subclasses implement :meth:`sample` (hidden variables for ``size``
    trials from the generator keyed by ``key``) and the two response rules.
    """

    label = "lhv"
    hidden_dim = 0
    depth = 0

    def sample(self, rng: RandomSource, key: tuple, size: int):
        raise NotImplementedError

    def alice(self, hidden, a) -> np.ndarray:
        raise NotImplementedError

    def bob(self, hidden, b) -> np.ndarray:
        raise NotImplementedError

    def predicted(self, a, b):
        """Exact (joint, marginal_a, marginal_b) of the model, when known."""
        raise NotImplementedError

    def setting(self, x):
        return np.asarray(x, dtype=float)

    def __repr__(self):
        return f"<{type(self).__name__} {self.label}>"


class WernerModel(LhvModel):
    """Sphere model for projective measurements on the Werner state at p = 1/2.

    lambda is uniform on S^2. Alice answers ``-sgn(a . lambda)``; Bob
    answers +1 with probability ``(1 + b . lambda) / 2`` using one extra
    uniform deviate per trial. The joint correlation is ``-(a . b) / 2``
    and both marginals vanish.
    """

    label = "werner"
    hidden_dim = 3
    visibility = 0.5

    def sample(self, rng, key, size):
        g = rng.generator(*key)
        lam = g.standard_normal((size, 3))
        lam /= np.linalg.norm(lam, axis=1)[:, None]
        u = g.random(size)
        return {"lam": lam, "u": u}

    def setting(self, x):
        return _unit_array(x, 3)

    def alice(self, hidden, a):
        return -_sgn(hidden["lam"] @ a)

    def bob(self, hidden, b):
        p_plus = (1 + hidden["lam"] @ b) / 2
        return np.where(hidden["u"] < p_plus, 1, -1).astype(np.int8)

    def predicted(self, a, b):
        return (-0.5 * float(np.dot(a, b)), 0.0, 0.0)


def werner_model() -> WernerModel:
    return WernerModel()


class ConstantModel(LhvModel):
    """Both parties output fixed values regardless of setting."""

    def __init__(self, alpha: int = 1, beta: int = 1):
        if alpha not in (-1, 1) or beta not in (-1, 1):
            raise InvalidArgument("outputs must be +1 or -1")
        self.alpha, self.beta = alpha, beta
        self.label = f"constant({alpha},{beta})"

    def sample(self, rng, key, size):
        return {"size": size}

    def alice(self, hidden, a):
        return np.full(hidden["size"], self.alpha, dtype=np.int8)

    def bob(self, hidden, b):
        return np.full(hidden["size"], self.beta, dtype=np.int8)

    def predicted(self, a, b):
        return (float(self.alpha * self.beta), float(self.alpha), float(self.beta))


class BiasedCoinModel(LhvModel):
    """Both parties copy one shared coin with mean ``bias``."""

    hidden_dim = 1

    def __init__(self, bias: float):
        if not -1 <= bias <= 1:
            raise InvalidArgument("bias must lie in [-1, 1]")
        self.bias = float(bias)
        self.label = f"biased({bias})"

    def sample(self, rng, key, size):
        u = rng.generator(*key).random(size)
        return {"c": np.where(u < (1 + self.bias) / 2, 1, -1).astype(np.int8)}

    def alice(self, hidden, a):
        return hidden["c"]

    def bob(self, hidden, b):
        return hidden["c"]

    def predicted(self, a, b):
        return (1.0, self.bias, self.bias)


class RandomizedMarginals(LhvModel):
    """Wrap a model with a shared uniform bit c; outputs become (c alpha, c beta).

    The inner model receives exactly the caller's stream key, so wrapped
    and unwrapped models see the same hidden variables and have
    sample-by-sample identical products alpha * beta.
    """

    def __init__(self, inner: LhvModel):
        self.inner = inner
        self.depth = inner.depth + 1
        self.hidden_dim = inner.hidden_dim + 1
        self.label = f"randomized({inner.label})"

    def setting(self, x):
        return self.inner.setting(x)

    def sample(self, rng, key, size):
        g = rng.generator(*key, _TAG_MARGINALS, self.depth)
        c = np.where(g.random(size) < 0.5, 1, -1).astype(np.int8)
        return {"inner": self.inner.sample(rng, key, size), "c": c}

    def alice(self, hidden, a):
        return hidden["c"] * self.inner.alice(hidden["inner"], a)

    def bob(self, hidden, b):
        return hidden["c"] * self.inner.bob(hidden["inner"], b)

    def predicted(self, a, b):
        return (self.inner.predicted(a, b)[0], 0.0, 0.0)


def randomize_marginals(inner: LhvModel) -> RandomizedMarginals:
    return RandomizedMarginals(inner)


class VisibilityMixture(LhvModel):
    """Run ``inner`` with probability ``ratio``, otherwise independent fair coins."""

    def __init__(self, inner: LhvModel, ratio: float):
        if not 0 <= ratio <= 1:
            raise InvalidArgument("mixing ratio must lie in [0, 1]")
        self.inner = inner
        self.ratio = float(ratio)
        self.depth = inner.depth + 1
        self.hidden_dim = inner.hidden_dim + 3
        self.label = f"mixture({inner.label},{ratio:.6g})"

    def setting(self, x):
        return self.inner.setting(x)

    def sample(self, rng, key, size):
        g = rng.generator(*key, _TAG_VISIBILITY, self.depth)
        use = g.random(size) < self.ratio
        na = np.where(g.random(size) < 0.5, 1, -1).astype(np.int8)
        nb = np.where(g.random(size) < 0.5, 1, -1).astype(np.int8)
        return {"inner": self.inner.sample(rng, key, size), "use": use, "na": na, "nb": nb}

    def alice(self, hidden, a):
        return np.where(hidden["use"], self.inner.alice(hidden["inner"], a), hidden["na"])

    def bob(self, hidden, b):
        return np.where(hidden["use"], self.inner.bob(hidden["inner"], b), hidden["nb"])

    def predicted(self, a, b):
        j, ma, mb = self.inner.predicted(a, b)
        return (self.ratio * j, self.ratio * ma, self.ratio * mb)


def simulate_visibility(model: LhvModel, model_visibility: float, p: float) -> VisibilityMixture:
    """Model for visibility ``p`` from one that reaches ``model_visibility``."""
    if model_visibility <= 0:
        raise InvalidArgument("model visibility must be positive")
    if p < 0:
        raise InvalidArgument("visibility must be nonnegative")
    if p > model_visibility:
        raise OutOfRange(f"model reaches visibility {model_visibility}, cannot simulate p = {p}")
    return VisibilityMixture(model, p / model_visibility)


@dataclass(frozen=True)
class McEstimate:
    mean: float
    stderr: float
    samples: int
    seed: int

    def to_dict(self) -> dict:
        return {"mean": self.mean, "stderr": self.stderr}

    def within(self, target: float, sigmas: float, slack: float = 0.0) -> bool:
        return abs(self.mean - target) <= sigmas * self.stderr + slack


@dataclass(frozen=True)
class Tally:
    """Outcome counts, indexed [alpha == -1][beta == -1]."""

    counts: tuple = (0, 0, 0, 0)  # (++, +-, -+, --)

    def __add__(self, other: "Tally") -> "Tally":
        return Tally(tuple(x + y for x, y in zip(self.counts, other.counts)))

    @property
    def n(self) -> int:
        return sum(self.counts)

    def sums(self):
        pp, pm, mp, mm = self.counts
        return pp + mm - pm - mp, pp + pm - mp - mm, pp + mp - pm - mm

    def frequencies(self) -> np.ndarray:
        return np.asarray(self.counts, dtype=float) / self.n


def _mc(total: int, n: int, seed: int) -> McEstimate:
    # +/-1 variable: sum of squares is n
    mean = total / n
    var = max(n - total * total / n, 0.0) / (n - 1)
    return McEstimate(mean, math.sqrt(var / n), n, seed)


@dataclass(frozen=True)
class Estimate:
    joint: McEstimate
    marginal_a: McEstimate
    marginal_b: McEstimate
    tally: Tally

    @classmethod
    def from_tally(cls, tally: Tally, seed: int) -> "Estimate":
        n = tally.n
        if n < 2:
            raise InvalidArgument("need at least two samples")
        sj, sa, sb = tally.sums()
        return cls(_mc(sj, n, seed), _mc(sa, n, seed), _mc(sb, n, seed), tally)

    def to_dict(self) -> dict:
        return {"joint": self.joint.to_dict(),
                "margA": self.marginal_a.to_dict(),
                "margB": self.marginal_b.to_dict()}


def _tally(alpha: np.ndarray, beta: np.ndarray) -> Tally:
    code = (alpha < 0).astype(np.int64) * 2 + (beta < 0)
    c = np.bincount(code, minlength=4)
    return Tally(tuple(int(x) for x in c))


def estimate_range(model: LhvModel, a, b, start: int, stop: int,
                   rng: RandomSource, block: int = MC_BLOCK) -> Tally:
    """Tally of trials with global indices ``start <= i < stop``."""
    a = model.setting(a)
    b = model.setting(b)
    total = Tally()
    i = start
    while i < stop:
        k = i // block
        lo, hi = k * block, (k + 1) * block
        hidden = model.sample(rng, (k,), block)
        alpha = model.alice(hidden, a)
        beta = model.bob(hidden, b)
        s, e = i - lo, min(stop, hi) - lo
        total = total + _tally(alpha[s:e], beta[s:e])
        i = lo + e
    return total


def estimate(model: LhvModel, a, b, samples: int, rng: RandomSource,
             shards: int = 1, threads: int = 1, block: int = MC_BLOCK) -> Estimate:
    """Monte Carlo estimate of joint correlation and both marginals.

    The result depends only on ``(model, a, b, samples, rng, block)``;
    ``shards`` and ``threads`` change how the work is split, not the
    tallies.
    """
    samples = int(samples)
    if samples < 2:
        raise InvalidArgument("need at least two samples")
    if shards < 1 or threads < 1:
        raise InvalidArgument("shards and threads must be positive")
    edges = [samples * s // shards for s in range(shards + 1)]
    jobs = [(edges[s], edges[s + 1]) for s in range(shards) if edges[s + 1] > edges[s]]

    def run(job):
        return estimate_range(model, a, b, job[0], job[1], rng, block)

    if threads > 1 and len(jobs) > 1:
        with ThreadPoolExecutor(max_workers=threads) as ex:
            parts = list(ex.map(run, jobs))
    else:
        parts = [run(j) for j in jobs]
    total = Tally()
    for part in parts:
        total = total + part
    return Estimate.from_tally(total, rng.seed)
