"""Points of projective space, affine charts and projective transformations."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .config import TOL
from .errors import ChartViolation, SingularTransform


def _frozen(a) -> np.ndarray:
    a = np.array(a, dtype=float)
    a.setflags(write=False)
    return a


def canonical(v, zero_tol: float = 1e-12) -> np.ndarray:
    """Unit-norm representative of a homogeneous vector, first nonzero entry positive."""
    v = np.asarray(v, dtype=float)
    n = np.linalg.norm(v)
    if not np.isfinite(n) or n == 0.0:
        raise ValueError("homogeneous coordinates must be finite and nonzero")
    v = v / n
    nz = np.flatnonzero(np.abs(v) > zero_tol)
    if v[nz[0]] < 0:
        v = -v
    return v


def canonical_rows(V, zero_tol: float = 1e-12) -> np.ndarray:
    """Row-wise version of :func:`canonical` for an (n, d+1) array."""
    V = np.asarray(V, dtype=float)
    V = V / np.linalg.norm(V, axis=1, keepdims=True)
    mask = np.abs(V) > zero_tol
    first = np.argmax(mask, axis=1)
    signs = np.sign(V[np.arange(len(V)), first])
    return V * signs[:, None]


@dataclass(frozen=True, eq=False)
class ProjPoint:
    """A point of P(V) stored through its canonical representative."""

    coords: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "coords", _frozen(canonical(self.coords)))

    @property
    def dim(self) -> int:
        return len(self.coords) - 1

    def close_to(self, other: "ProjPoint", tol: float = TOL.equality) -> bool:
        return bool(np.max(np.abs(self.coords - other.coords)) <= tol)

    def __eq__(self, other):
        if not isinstance(other, ProjPoint):
            return NotImplemented
        return self.coords.shape == other.coords.shape and self.close_to(other)

    def __hash__(self):
        return hash(tuple(np.round(self.coords / TOL.equality).astype(np.int64)))

    def __repr__(self):
        return "ProjPoint[" + ":".join(f"{c:.6g}" for c in self.coords) + "]"


def _kernel_basis(covector: np.ndarray) -> np.ndarray:
    """Orthonormal basis of ker(covector), built by Gram-Schmidt on e_0, e_1, ...

    For covector = e_last this is exactly the first d standard vectors.
    """
    n = len(covector)
    u = covector / np.linalg.norm(covector)
    basis = []
    for k in range(n):
        v = np.zeros(n)
        v[k] = 1.0
        v = v - u * (u @ v)
        for b in basis:
            v = v - b * (b @ v)
        nv = np.linalg.norm(v)
        if nv > 1e-8:
            basis.append(v / nv)
        if len(basis) == n - 1:
            break
    return np.column_stack(basis)


@dataclass(frozen=True, eq=False)
class AffineChart:
    """The affine chart {covector > 0}, identified with R^d.

    Chart coordinates of a homogeneous vector X are ``E.T @ X / l(X)`` where the
    columns of E form an orthonormal basis of ker(l); Euclidean distances in chart
    coordinates are therefore distances inside the hyperplane l = 1.
    """

    covector: np.ndarray
    basis: np.ndarray = field(init=False, repr=False)
    origin: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        cov = np.array(self.covector, dtype=float)
        if cov.ndim != 1 or len(cov) < 2 or not np.any(cov):
            raise ValueError("chart covector must be a nonzero vector of length >= 2")
        object.__setattr__(self, "covector", _frozen(cov))
        object.__setattr__(self, "basis", _frozen(_kernel_basis(cov)))
        object.__setattr__(self, "origin", _frozen(cov / (cov @ cov)))

    @classmethod
    def standard(cls, d: int) -> "AffineChart":
        cov = np.zeros(d + 1)
        cov[-1] = 1.0
        return cls(cov)

    @property
    def dim(self) -> int:
        return len(self.covector) - 1

    def to_chart(self, X, tol: float = 1e-14) -> np.ndarray:
        """Chart coordinates of homogeneous vector(s) X (shape (d+1,) or (n, d+1))."""
        X = np.asarray(X, dtype=float)
        lx = X @ self.covector
        scale = np.linalg.norm(X, axis=-1)
        if np.any(np.abs(lx) <= tol * scale):
            raise ChartViolation("point lies on the hyperplane at infinity of the chart")
        return (X @ self.basis) / lx[..., None] if X.ndim == 2 else (X @ self.basis) / lx

    def from_chart(self, s) -> np.ndarray:
        """Homogeneous lift with covector value 1."""
        s = np.asarray(s, dtype=float)
        return self.origin + s @ self.basis.T

    def point(self, s) -> ProjPoint:
        return ProjPoint(self.from_chart(s))

    def same_as(self, other: "AffineChart") -> bool:
        a = self.covector / np.linalg.norm(self.covector)
        b = other.covector / np.linalg.norm(other.covector)
        return bool(np.allclose(a, b, atol=1e-12))

    def to_list(self) -> list:
        return [float(c) for c in self.covector]


def normalize_matrix(M) -> np.ndarray:
    """Scale a matrix so that max |entry| = 1 and the first clearly nonzero entry is positive."""
    M = np.asarray(M, dtype=float)
    m = np.max(np.abs(M))
    if not np.isfinite(m) or m == 0.0:
        raise SingularTransform("zero or non-finite matrix")
    M = M / m
    flat = M.ravel()
    first = flat[np.flatnonzero(np.abs(flat) > TOL.equality)[0]]
    return M if first > 0 else -M


@dataclass(frozen=True, eq=False)
class ProjTransform:
    """An element of PGL(V): a matrix up to nonzero scale.

    ``label`` is a word over generator letters (lowercase letters for generators,
    uppercase for their inverses); the empty word is the identity.
    """

    matrix: np.ndarray
    label: str = ""
    check: bool = field(default=True, repr=False)

    def __post_init__(self):
        M = normalize_matrix(self.matrix)
        if M.ndim != 2 or M.shape[0] != M.shape[1]:
            raise SingularTransform("transform must be a square matrix")
        if self.check:
            if abs(np.linalg.det(M)) <= 1e-12 or np.linalg.cond(M) > 1e12:
                raise SingularTransform("matrix is singular or too ill-conditioned")
        object.__setattr__(self, "matrix", _frozen(M))

    @classmethod
    def identity(cls, n: int) -> "ProjTransform":
        return cls(np.eye(n))

    @property
    def size(self) -> int:
        return self.matrix.shape[0]

    def __matmul__(self, other: "ProjTransform") -> "ProjTransform":
        return ProjTransform(self.matrix @ other.matrix, self.label + other.label, check=False)

    def inverse(self, label: str | None = None) -> "ProjTransform":
        if label is None:
            label = self.label[::-1].swapcase()
        return ProjTransform(np.linalg.inv(self.matrix), label, check=False)

    def apply(self, p: ProjPoint) -> ProjPoint:
        return ProjPoint(self.matrix @ p.coords)

    def key(self, quantum: float = TOL.equality) -> bytes:
        """Hash key of the normalized matrix rounded to ``quantum``."""
        return np.round(self.matrix / quantum).astype(np.int64).tobytes()

    def same_as(self, other: "ProjTransform", tol: float = TOL.equality) -> bool:
        return bool(np.max(np.abs(self.matrix - other.matrix)) <= tol)

    def __repr__(self):
        return f"ProjTransform({self.label or 'e'})"
