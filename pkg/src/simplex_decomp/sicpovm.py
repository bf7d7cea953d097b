"""SIC-POVMs: exact registry, numerical fiducial search, Bloch simplexes.

A SIC-POVM in dimension N is a set of N^2 unit vectors whose squared
overlaps are all 1/(N+1).  All sets handled here are covariant under the
Weyl-Heisenberg displacement group: the full set is the displacement orbit
of a single fiducial vector.  The Bloch directions of the N^2 projectors
form a regular N^2-simplex, which is what the decomposition machinery
consumes.

The search minimizes the squared-overlap residuals directly with a
Gauss-Newton least-squares solver; the frame potential (quartic overlap
sum) is exposed as the certifying objective, with known global minimum
(N^2-1)/(N+1)^2 attained exactly on SIC fiducials.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.optimize import least_squares

from .blochspace import su_generators
from .errors import DimensionMismatchError, NotAFiducialError
from .serialize import dumps
from .simplex import DEFAULT_TOL as SIMPLEX_EXACT_TOL
from .simplex import OPTIMIZED_TOL as SIMPLEX_OPTIMIZED_TOL
from .simplex import RegularSimplex

EXACT_REGISTRY = "exact-registry"
OPTIMIZED = "optimized"

# Overlap-deviation acceptance per provenance class.
EXACT_TOL = 1e-12
OPTIMIZED_TOL = 1e-8


@dataclass(frozen=True)
class Provenance:
    """Where a fiducial came from: closed form or a seeded search."""

    kind: str
    seed: int | None = None
    iterations: int | None = None
    residual: float | None = None


@dataclass(frozen=True, eq=False)
class Fiducial:
    """Unit vector whose displacement orbit is (or should be) a SIC-POVM."""

    dim: int
    vector: np.ndarray
    provenance: Provenance

    def __post_init__(self):
        v = np.array(np.asarray(self.vector, dtype=complex))
        if v.shape != (self.dim,):
            raise DimensionMismatchError(
                f"fiducial vector has shape {v.shape}, expected ({self.dim},)")
        norm = np.linalg.norm(v)
        if abs(norm - 1.0) > 1e-12:
            raise ValueError(f"fiducial vector norm {norm} is not 1 within 1e-12")
        v.setflags(write=False)
        object.__setattr__(self, "vector", v)

    @property
    def is_exact(self) -> bool:
        return self.provenance.kind == EXACT_REGISTRY


@dataclass(frozen=True, eq=False)
class SicPovm:
    """N^2 equiangular unit vectors plus their Bloch-direction simplex."""

    dim: int
    states: np.ndarray
    bloch: RegularSimplex
    tol: float

    def __post_init__(self):
        s = np.array(np.asarray(self.states, dtype=complex))
        s.setflags(write=False)
        object.__setattr__(self, "states", s)


@dataclass(frozen=True)
class FiducialSearchFailure:
    """Search outcome when the residual tolerance was not reached."""

    dim: int
    seed: int
    iterations: int
    best_residual: float


@lru_cache(maxsize=None)
def wh_displacements(dimension: int) -> np.ndarray:
    """Weyl-Heisenberg displacements D_jk = X^j Z^k, shape (N^2, N, N).

    X is the cyclic shift, Z the clock matrix with phases exp(2 pi i j / N);
    ordering is lexicographic in (j, k) so the identity comes first.
    """
    n = dimension
    if n < 2:
        raise DimensionMismatchError(f"dimension must be >= 2, got {n}")
    omega = np.exp(2j * np.pi / n)
    x = np.zeros((n, n), dtype=complex)
    x[(np.arange(n) + 1) % n, np.arange(n)] = 1.0
    z = np.diag(omega ** np.arange(n))
    xp = [np.linalg.matrix_power(x, j) for j in range(n)]
    zp = [np.linalg.matrix_power(z, k) for k in range(n)]
    out = np.array([xp[j] @ zp[k] for j in range(n) for k in range(n)])
    out.setflags(write=False)
    return out


def frame_potential_minimum(dimension: int) -> float:
    """Global minimum (N^2-1)/(N+1)^2 of :func:`frame_potential`."""
    n = dimension
    return (n * n - 1.0) / (n + 1.0) ** 2


def frame_potential(f: Fiducial) -> float:
    """Quartic overlap sum over all non-identity displacements.

    Non-negative, bounded below by ``frame_potential_minimum``; the bound is
    attained exactly when the displacement orbit of the vector is a SIC.
    """
    d = wh_displacements(f.dim)[1:]
    c = np.einsum("i,dij,j->d", f.vector.conj(), d, f.vector)
    return float(np.sum(np.abs(c) ** 4))


def max_overlap_deviation(f: Fiducial) -> float:
    """Worst deviation of the orbit's squared overlaps from equiangularity."""
    n = f.dim
    states = np.einsum("dij,j->di", wh_displacements(n), f.vector)
    overlaps = np.abs(states.conj() @ states.T) ** 2
    target = (n * np.eye(n * n) + 1.0) / (n + 1.0)
    return float(np.abs(overlaps - target).max())


def sic_from_fiducial(f: Fiducial, tol: float | None = None) -> SicPovm:
    """Displacement orbit of a fiducial, checked for equiangularity.

    ``tol`` bounds the allowed deviation of every squared overlap from
    (N delta_ij + 1)/(N + 1); it defaults to the provenance class of the
    fiducial (1e-12 exact, 1e-8 optimized).  The returned Bloch simplex
    holds the unit Bloch directions of the N^2 projectors and carries the
    matching tolerance class.
    """
    n = f.dim
    if tol is None:
        tol = EXACT_TOL if f.is_exact else OPTIMIZED_TOL
    states = np.einsum("dij,j->di", wh_displacements(n), f.vector)
    overlaps = np.abs(states.conj() @ states.T) ** 2
    target = (n * np.eye(n * n) + 1.0) / (n + 1.0)
    max_dev = float(np.abs(overlaps - target).max())
    if max_dev > tol:
        raise NotAFiducialError(
            f"displacement orbit is not equiangular: worst squared-overlap "
            f"deviation {max_dev:.3e} exceeds {tol:.1e}", max_deviation=max_dev)
    gens = su_generators(n)
    projectors = np.einsum("di,dj->dij", states, states.conj())
    coords = np.einsum("dij,mji->dm", projectors, gens.matrices).real
    directions = coords / np.linalg.norm(coords, axis=1, keepdims=True)
    simplex_tol = SIMPLEX_EXACT_TOL if f.is_exact else SIMPLEX_OPTIMIZED_TOL
    bloch = RegularSimplex(ambient_dim=n * n - 1, vertices=directions, tol=simplex_tol)
    return SicPovm(dim=n, states=states, bloch=bloch, tol=tol)


def _overlap_residuals(dimension: int):
    """Residual vector f_d = |<psi|D_d|psi>|^2 - 1/(N+1) and its Jacobian.

    The parameter vector stacks real and imaginary parts of the (not
    necessarily normalized) fiducial; normalization happens inside, so the
    problem is smooth and unconstrained.  The squared residual norm equals
    the frame-potential excess identically, but the residual form lets the
    solver converge to overlap deviations near machine precision instead of
    stalling at the square root of it.
    """
    n = dimension
    displ = wh_displacements(n)[1:]
    displ_h = displ.conj().transpose(0, 2, 1)
    target = 1.0 / (n + 1.0)

    def unpack(x):
        return x[:n] + 1j * x[n:]

    def fun(x):
        z = unpack(x)
        u = np.real(np.vdot(z, z))
        c = np.einsum("i,dij,j->d", z.conj(), displ, z) / u
        return np.abs(c) ** 2 - target

    def jac(x):
        z = unpack(x)
        u = np.real(np.vdot(z, z))
        dz = np.einsum("dij,j->di", displ, z)
        dhz = np.einsum("dij,j->di", displ_h, z)
        c = (z.conj() @ dz.T) / u
        g = (c.conj()[:, None] * (dz - c[:, None] * z[None, :])
             + c[:, None] * (dhz - c.conj()[:, None] * z[None, :])) / u
        return np.hstack([2.0 * g.real, 2.0 * g.imag])

    return fun, jac


def find_fiducial(dimension: int, seed: int = 0, max_iters: int = 2000,
                  tol: float = 1e-10) -> Fiducial | FiducialSearchFailure:
    """Search for a SIC fiducial from one seeded random start.

    Deterministic given (dimension, seed).  Succeeds when the residual
    (frame-potential excess over its global minimum) drops to ``tol`` or
    below; otherwise returns a :class:`FiducialSearchFailure` carrying the
    best residual reached.  Multi-start searches are the caller's loop over
    seeds.
    """
    n = dimension
    if n < 2:
        raise DimensionMismatchError(f"dimension must be >= 2, got {n}")
    rng = np.random.default_rng(seed)
    x0 = rng.standard_normal(2 * n)
    fun, jac = _overlap_residuals(n)
    res = least_squares(fun, x0, jac=jac, method="trf",
                        xtol=3e-16, ftol=3e-16, gtol=3e-16, max_nfev=max_iters)
    residual = max(float(np.sum(res.fun ** 2)), 0.0)
    if residual > tol:
        return FiducialSearchFailure(dim=n, seed=seed, iterations=int(res.nfev),
                                     best_residual=residual)
    z = res.x[:n] + 1j * res.x[n:]
    z = z / np.linalg.norm(z)
    return Fiducial(dim=n, vector=z,
                    provenance=Provenance(kind=OPTIMIZED, seed=seed,
                                          iterations=int(res.nfev), residual=residual))


def _registry_fiducial(dimension: int) -> Fiducial | None:
    if dimension == 2:
        # Bloch direction (1,1,1)/sqrt(3): the qubit tetrahedron apex.
        c = 1.0 / np.sqrt(3.0)
        v = np.array([np.sqrt((1.0 + c) / 2.0),
                      np.exp(1j * np.pi / 4.0) * np.sqrt((1.0 - c) / 2.0)])
        return Fiducial(dim=2, vector=v, provenance=Provenance(kind=EXACT_REGISTRY))
    if dimension == 3:
        v = np.array([0.0, 1.0, -1.0], dtype=complex) / np.sqrt(2.0)
        return Fiducial(dim=3, vector=v, provenance=Provenance(kind=EXACT_REGISTRY))
    return None


def known_fiducial(dimension: int, cache_path: str | os.PathLike | None = None
                   ) -> Fiducial | None:
    """Registry fiducial (exact, N in {2, 3}) or a cached optimized one.

    Returns None when neither source covers the dimension.  Cached entries
    are *not* trusted: they are revalidated by :func:`sic_from_fiducial` at
    first use, so a corrupt cache surfaces as a failed equiangularity check,
    not as a silent wrong answer.
    """
    exact = _registry_fiducial(dimension)
    if exact is not None:
        return exact
    if cache_path is not None and os.path.exists(cache_path):
        data = load_fiducial_cache(cache_path)
        if data.dim == dimension:
            return data
    return None


def load_fiducial_cache(path: str | os.PathLike) -> Fiducial:
    """Read a fiducial from its JSON cache file."""
    with open(path, "r", encoding="utf-8") as fh:
        data = json.load(fh)
    vector = np.array([complex(re, im) for re, im in data["vector"]])
    return Fiducial(dim=int(data["N"]), vector=vector,
                    provenance=Provenance(kind=OPTIMIZED, seed=int(data["seed"]),
                                          residual=float(data["residual"])))


def save_fiducial_cache(path: str | os.PathLike, f: Fiducial) -> None:
    """Write a fiducial to its JSON cache file (17-significant-digit floats)."""
    payload = {
        "N": f.dim,
        "vector": [[z.real, z.imag] for z in f.vector],
        "residual": float(f.provenance.residual or 0.0),
        "seed": int(f.provenance.seed or 0),
    }
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(dumps(payload))
        fh.write("\n")


def solvable_dimensions() -> list[int]:
    """Dimensions with known definite SIC solutions (exact or numerical)."""
    return list(range(2, 25)) + [28, 30, 31, 35, 37, 39, 43, 48, 124,
                                 143, 147, 168, 172, 195, 199, 228, 259, 323]
