"""Product decompositions of Werner and isotropic states over simplexes.

Given any regular N^2-simplex of unit vectors a_i in Bloch space, the
trace-one Hermitian factors

    R_i(r) = id/N + (r/2) a_i . L ,   S_i(s) = id/N + (s/2) a_i . L

reproduce the tau-parameterized Werner state as the uniform product mixture
sum_i (1/N^2) R_i (x) S_i whenever r s = tau (isotropic: transpose the
second factor).  The factors need not be positive; they all are exactly
when both r and s lie in the closed positivity interval along pure
directions, which requires the simplex to come from a SIC-POVM and tau to
lie in the separable interval [-2/N, 2(N-1)/N].  Then every point of the
hyperbola r s = tau with admissible r yields an explicit separable
decomposition.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .blochspace import PSD_TOL, DensityMatrix, psd_radius_bounds, su_generators
from .errors import (DimensionMismatchError, InadmissibleRadiusError,
                     NotSeparableError, ParameterRangeError,
                     SicUnavailableError, SimplexStructureError)
from .sicpovm import EXACT_TOL, SicPovm, known_fiducial, sic_from_fiducial
from .simplex import RegularSimplex, verify_simplex
from .states import (StateKind, classify_isotropic, classify_werner,
                     convert_params, isotropic_density, werner_density)

# Slack for radius membership at interval endpoints; a radius admitted this
# far outside still yields factor eigenvalues within the PSD tolerance.
ADMISSIBLE_ATOL = 1e-9

_DEGENERATE_LEN = 1e-12


@dataclass(frozen=True, eq=False)
class Decomposition:
    """Uniform product mixture over a regular simplex with r s = tau.

    ``factors_r`` and ``factors_s`` stack the N^2 left and right factors;
    the mixture weight of every pair is 1/N^2.
    """

    kind: StateKind
    dim: int
    tau: float
    r: float
    s: float
    simplex: RegularSimplex
    factors_r: np.ndarray
    factors_s: np.ndarray

    def __post_init__(self):
        if abs(self.r * self.s - self.tau) > 1e-12:
            raise ParameterRangeError(
                f"r*s = {self.r * self.s} does not match tau = {self.tau}")
        for name in ("factors_r", "factors_s"):
            a = np.array(getattr(self, name))
            a.setflags(write=False)
            object.__setattr__(self, name, a)

    @property
    def n_factors(self) -> int:
        return self.factors_r.shape[0]

    @property
    def weights(self) -> np.ndarray:
        return np.full(self.n_factors, 1.0 / self.n_factors)


@dataclass(frozen=True)
class VerificationReport:
    """Reconstruction error against the closed form plus factor positivity."""

    reconstruction_error: float
    min_eig_r: float
    min_eig_s: float
    all_factors_psd: bool
    separable_certificate: bool


def _simplex_operators(s: RegularSimplex, dim: int) -> np.ndarray:
    """Stack of a_i . L for every vertex, shape (N^2, N, N)."""
    gens = su_generators(dim)
    return np.einsum("im,mjk->ijk", s.vertices, gens.matrices)


def decompose(kind, dim: int, tau: float, r: float,
              simplex: RegularSimplex) -> Decomposition:
    """Build the product mixture over an arbitrary regular N^2-simplex.

    Valid for every tau in the family range; the resulting factors are not
    required to be positive semidefinite.  ``s`` is derived as tau/r (and
    set to 0 when tau is 0, where any r works).
    """
    kind = StateKind.parse(kind)
    convert_params(kind, dim, "tau", tau)
    if simplex.ambient_dim != dim * dim - 1:
        raise DimensionMismatchError(
            f"simplex ambient dimension {simplex.ambient_dim} != N^2-1 = {dim * dim - 1}")
    report = verify_simplex(simplex)  # raises on wrong vertex count
    if not report.ok:
        raise SimplexStructureError(
            f"simplex fails verification (norm dev {report.max_norm_dev:.3e}, "
            f"dot dev {report.max_dot_dev:.3e} at tol {simplex.tol:.1e})")
    tau = float(tau)
    r = float(r)
    if tau == 0.0:
        s = 0.0
    elif r == 0.0:
        raise ParameterRangeError(f"r = 0 cannot realize tau = {tau} on the contour r*s = tau")
    else:
        s = tau / r
    ops = _simplex_operators(simplex, dim)
    eye = np.eye(dim, dtype=complex)
    factors_r = eye / dim + (r / 2.0) * ops
    factors_s = eye / dim + (s / 2.0) * ops
    return Decomposition(kind=kind, dim=dim, tau=tau, r=r, s=s, simplex=simplex,
                         factors_r=factors_r, factors_s=factors_s)


def reconstruct(d: Decomposition) -> DensityMatrix:
    """Explicit weighted Kronecker sum of the factor pairs.

    Deliberately kept as the term-by-term sum (no closed form) so it can
    serve as an independent oracle against the state constructors.
    """
    n2 = d.dim * d.dim
    out = np.zeros((n2, n2), dtype=complex)
    for i in range(d.n_factors):
        right = d.factors_s[i].T if d.kind is StateKind.ISOTROPIC else d.factors_s[i]
        out += np.kron(d.factors_r[i], right)
    return DensityMatrix(out / d.n_factors)


def _separable_range(dim: int) -> tuple[float, float]:
    return (-2.0 / dim, 2.0 * (dim - 1.0) / dim)


def _refuse_not_separable(dim: int, tau: float):
    lo, hi = _separable_range(dim)
    hint = ""
    cls = None
    if tau < lo:
        wmin = -2.0 * (dim + 1.0) / dim
        if tau >= wmin - 1e-12:
            cls = classify_werner(dim, max(tau, wmin))
            hint = f"; as a Werner state it is {cls.name}"
    elif tau > hi:
        imax = 2.0 * (dim * dim - 1.0) / dim
        if tau <= imax + 1e-12:
            cls = classify_isotropic(dim, min(tau, imax))
            hint = f"; as an isotropic state it is {cls.name}"
    raise NotSeparableError(
        f"tau = {tau} is outside the separable interval [{lo}, {hi}]{hint}",
        classification=cls)


def admissible_r_interval(dim: int, tau: float) -> list[tuple[float, float]]:
    """Closed intervals of r with both r and s = tau/r in the PSD interval.

    Returned in ascending order (negative branch first when present).  For
    tau = 0 the whole PSD interval is admissible.  Degenerate branches
    collapse to single points at the separable-interval endpoints.
    """
    lo, hi = _separable_range(dim)
    tau = float(tau)
    if not (lo - 1e-12 <= tau <= hi + 1e-12):
        _refuse_not_separable(dim, tau)
    neg_min, r_max = psd_radius_bounds(dim)
    if tau == 0.0:
        return [(neg_min, r_max)]
    intervals = []
    if tau > 0.0:
        if tau <= neg_min * neg_min + 1e-15:
            intervals.append((neg_min, tau / neg_min))
        intervals.append((tau / r_max, r_max))
    else:
        intervals.append((neg_min, tau / r_max))
        intervals.append((tau / neg_min, r_max))
    out = []
    for a, b in intervals:
        if a > b:
            if a - b > 1e-12:
                continue
            a = b = 0.5 * (a + b)
        out.append((a, b))
    return out


def _nearest_admissible(r: float, intervals) -> float:
    best = None
    for a, b in intervals:
        c = min(max(r, a), b)
        if best is None or abs(c - r) < abs(best - r):
            best = c
    return best


def _contains(r: float, intervals, atol: float = ADMISSIBLE_ATOL) -> bool:
    return any(a - atol <= r <= b + atol for a, b in intervals)


def _auto_sic(dim: int) -> SicPovm:
    fid = known_fiducial(dim)
    if fid is None:
        raise SicUnavailableError(
            f"no SIC-POVM registered for N = {dim}; run find_fiducial "
            f"(or pass a cached fiducial) and supply the result")
    return sic_from_fiducial(fid)


def separable_decompose(kind, dim: int, tau: float, r: float,
                        sic: SicPovm | None = None) -> Decomposition:
    """Explicit separable decomposition over a SIC Bloch simplex.

    Requires tau in the separable interval and r in the admissible set, so
    every factor is positive semidefinite by construction.  With ``sic``
    omitted, the exact registry (N = 2, 3) is used.
    """
    kind = StateKind.parse(kind)
    if sic is None:
        sic = _auto_sic(dim)
    if sic.dim != dim:
        raise DimensionMismatchError(f"SIC dimension {sic.dim} != requested {dim}")
    intervals = admissible_r_interval(dim, tau)
    if not _contains(r, intervals):
        nearest = _nearest_admissible(r, intervals)
        raise InadmissibleRadiusError(
            f"r = {r} leaves the admissible set {intervals} for tau = {tau}; "
            f"nearest admissible value is {nearest}", nearest=nearest,
            intervals=intervals)
    return decompose(kind, dim, tau, r, sic.bloch)


def verify_decomposition(d: Decomposition, target_tol: float = 1e-10
                         ) -> VerificationReport:
    """Compare the Kronecker reconstruction with the closed-form state.

    The closed form is built through the swap-operator (Werner) or
    maximally-entangled-projector (isotropic) formula, a code path disjoint
    from the Bloch sums used here, so agreement is a genuine two-route
    check.  The separable certificate also demands every factor be PSD.
    """
    params = convert_params(d.kind, d.dim, "tau", d.tau)
    if d.kind is StateKind.WERNER:
        closed = werner_density(d.dim, phi=params.phi)
    else:
        closed = isotropic_density(d.dim, eta=params.eta)
    rec = reconstruct(d)
    err = float(np.abs(rec.entries - closed.entries).max())
    herm_r = 0.5 * (d.factors_r + d.factors_r.conj().transpose(0, 2, 1))
    herm_s = 0.5 * (d.factors_s + d.factors_s.conj().transpose(0, 2, 1))
    min_eig_r = float(np.linalg.eigvalsh(herm_r)[:, 0].min())
    min_eig_s = float(np.linalg.eigvalsh(herm_s)[:, 0].min())
    all_psd = min_eig_r >= -PSD_TOL and min_eig_s >= -PSD_TOL
    return VerificationReport(
        reconstruction_error=err, min_eig_r=min_eig_r, min_eig_s=min_eig_s,
        all_factors_psd=all_psd,
        separable_certificate=bool(all_psd and err <= target_tol))


def contour_sample(kind, dim: int, tau: float, k: int,
                   sic: SicPovm | None = None,
                   target_tol: float | None = None) -> list[Decomposition]:
    """k certified decompositions sampled uniformly along the r-contour.

    Samples are uniform in r across the admissible branches.  When the
    admissible set degenerates to isolated points (tau at an endpoint of
    the separable interval), the unique solutions are returned -- possibly
    fewer than k -- and a multiplicity note is emitted as a warning.
    """
    kind = StateKind.parse(kind)
    if k < 1:
        raise ParameterRangeError(f"sample count must be >= 1, got {k}")
    if sic is None:
        sic = _auto_sic(dim)
    if target_tol is None:
        target_tol = 1e-10 if sic.tol <= EXACT_TOL else 1e-7
    intervals = admissible_r_interval(dim, tau)
    assert intervals, "admissible set cannot be empty inside the separable interval"
    lengths = [b - a for a, b in intervals]
    total = sum(lengths)
    if total <= _DEGENERATE_LEN:
        points = sorted({0.5 * (a + b) for a, b in intervals})
        warnings.warn(
            f"contour r*s = {tau} is degenerate: only {len(points)} "
            f"decomposition(s) exist at r in {points} (requested {k})",
            stacklevel=2)
        radii = points[:k]
    else:
        positions = [0.5 * total] if k == 1 else list(np.linspace(0.0, total, k))
        radii = []
        for t in positions:
            rem = t
            for idx, ((a, b), ln) in enumerate(zip(intervals, lengths)):
                if rem <= ln + 1e-15 or idx == len(intervals) - 1:
                    radii.append(min(a + rem, b))
                    break
                rem -= ln
    out = []
    for r in radii:
        d = decompose(kind, dim, tau, r, sic.bloch)
        report = verify_decomposition(d, target_tol=target_tol)
        assert report.separable_certificate, (
            f"certificate failed at r = {r}: {report}")
        out.append(d)
    return out
