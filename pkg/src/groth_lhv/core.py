"""Foundational numeric types: unit vectors, seeded random streams, helpers.

All objects here are immutable. Arrays handed out by :class:`UnitVector`
are read-only views, so instances can be shared freely between workers.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .constants import OPERATOR_TOL, STRUCT_TOL
from .errors import InvalidArgument

__all__ = [
    "UnitVector",
    "RandomSource",
    "sample_sphere",
    "gram_dot",
    "as_real_matrix",
    "as_hermitian",
]


class UnitVector:
    """Real vector of Euclidean norm one.

    Parameters
    ----------
    components : array_like
        Real components. They are rescaled to unit norm when
        ``normalize`` is true; otherwise the norm must already be one
        within ``STRUCT_TOL``.
    normalize : bool
        Rescale the input. A zero vector is rejected either way.
    """

    __slots__ = ("_v",)

    def __init__(self, components, normalize: bool = False):
        v = np.array(components, dtype=float).reshape(-1)
        if v.size == 0:
            raise InvalidArgument("unit vector needs at least one component")
        if not np.all(np.isfinite(v)):
            raise InvalidArgument("unit vector components must be finite")
        norm = np.linalg.norm(v)
        if normalize:
            if norm == 0.0:
                raise InvalidArgument("cannot normalize the zero vector")
            v = v / norm
        elif abs(norm - 1.0) > STRUCT_TOL:
            raise InvalidArgument(f"vector norm {norm!r} is not 1")
        v.setflags(write=False)
        self._v = v

    @classmethod
    def basis(cls, dim: int, k: int) -> "UnitVector":
        e = np.zeros(dim)
        e[k] = 1.0
        return cls(e)

    @property
    def dim(self) -> int:
        return self._v.size

    @property
    def components(self) -> np.ndarray:
        return self._v

    def __array__(self, dtype=None, copy=None):
        return self._v if dtype is None else self._v.astype(dtype)

    def __len__(self):
        return self._v.size

    def __neg__(self):
        return UnitVector(-self._v)

    def __eq__(self, other):
        if not isinstance(other, UnitVector):
            return NotImplemented
        return self.dim == other.dim and bool(np.array_equal(self._v, other._v))

    def __hash__(self):
        return hash(self._v.tobytes())

    def __repr__(self):
        return f"UnitVector({self._v.tolist()})"

    def tolist(self):
        return self._v.tolist()


def _unit_array(x, dim: int | None = None) -> np.ndarray:
    """Coerce a UnitVector or array-like to a float array of unit norm."""
    if isinstance(x, UnitVector):
        v = x.components
    else:
        v = UnitVector(x).components
    if dim is not None and v.size != dim:
        raise InvalidArgument(f"expected a {dim}-dimensional unit vector, got {v.size}")
    return v


@dataclass(frozen=True)
class RandomSource:
    """Seed plus stream id; a value, not a stateful generator.

    Streams are derived with :class:`numpy.random.SeedSequence` and drive
    the counter-based Philox bit generator, so a given ``(seed, stream,
    key...)`` always yields the same sample sequence.
    """

    seed: int
    stream: int = 0

    def __post_init__(self):
        if not 0 <= int(self.seed) < 2**64:
            raise InvalidArgument("seed must be a 64-bit unsigned integer")
        if int(self.stream) < 0:
            raise InvalidArgument("stream id must be nonnegative")

    def fork(self, stream: int) -> "RandomSource":
        return RandomSource(self.seed, stream)

    def seed_sequence(self, *key: int) -> np.random.SeedSequence:
        return np.random.SeedSequence(entropy=int(self.seed),
                                      spawn_key=(int(self.stream),) + tuple(int(k) for k in key))

    def generator(self, *key: int) -> np.random.Generator:
        """Fresh generator for this stream, optionally sub-keyed."""
        return np.random.Generator(np.random.Philox(self.seed_sequence(*key)))


def sample_sphere(rng: RandomSource, dim: int, size: int | None = None):
    """Uniform draw(s) from the unit sphere S^(dim-1).

    Gaussian vectors are normalized; with ``size=None`` a single
    :class:`UnitVector` is returned, otherwise an array of shape
    ``(size, dim)`` whose rows are unit vectors.
    """
    if dim < 1:
        raise InvalidArgument("sphere dimension must be >= 1")
    gen = rng.generator() if isinstance(rng, RandomSource) else rng
    n = 1 if size is None else int(size)
    x = gen.standard_normal((n, dim))
    norms = np.linalg.norm(x, axis=1)
    # measure-zero event, but keep the norm invariant unconditional
    while np.any(norms == 0.0):
        bad = norms == 0.0
        x[bad] = gen.standard_normal((int(bad.sum()), dim))
        norms = np.linalg.norm(x, axis=1)
    x /= norms[:, None]
    if size is None:
        return UnitVector(x[0])
    return x


def gram_dot(u, v) -> float:
    """Dot product of two unit vectors of equal dimension."""
    a = u.components if isinstance(u, UnitVector) else np.asarray(u, dtype=float)
    b = v.components if isinstance(v, UnitVector) else np.asarray(v, dtype=float)
    if a.shape != b.shape:
        raise InvalidArgument(f"dimension mismatch: {a.size} vs {b.size}")
    return float(a @ b)


def as_real_matrix(M) -> np.ndarray:
    """Validated 2-d float array (the package's RealMatrix)."""
    A = np.array(M, dtype=float)
    if A.ndim != 2 or A.shape[0] == 0 or A.shape[1] == 0:
        raise InvalidArgument("expected a non-empty 2-d real matrix")
    if not np.all(np.isfinite(A)):
        raise InvalidArgument("matrix entries must be finite")
    return A


def as_hermitian(H, tol: float = STRUCT_TOL) -> np.ndarray:
    """Validated square complex array equal to its conjugate transpose."""
    A = np.array(H, dtype=complex)
    if A.ndim != 2 or A.shape[0] != A.shape[1] or A.shape[0] == 0:
        raise InvalidArgument("expected a square matrix")
    if np.max(np.abs(A - A.conj().T)) > tol:
        raise InvalidArgument("operator is not Hermitian")
    return A


def is_identity(A: np.ndarray, tol: float = OPERATOR_TOL) -> bool:
    return bool(np.max(np.abs(A - np.eye(A.shape[0]))) <= tol)
