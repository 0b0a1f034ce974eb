"""Finite positive damping measures and their atomic quadratures.

A measure is described declaratively (point mass, weighted polyline,
middle-interval Cantor measure, product, inward boundary flow, volume
density, or weighted sum) and then reduced by :func:`atomize` to a finite
weighted point set -- the only representation the assembly layer ever
sees.  Ball-mass statistics, scaling-exponent fits, and the dimension /
admissibility formulas quantify how singular a measure is and whether it
multiplies the energy space boundedly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, NamedTuple, Sequence, Union

import numpy as np

from .errors import (
    DegenerateFit,
    DomainError,
    NegativeWeight,
    OutwardFlow,
    ResolutionOverflow,
    ZeroMass,
)

__all__ = [
    "DiracPoint",
    "Hypersurface",
    "Cantor",
    "Product",
    "Flow",
    "Density",
    "Sum",
    "MeasureSpec",
    "AtomSet",
    "ScalingFit",
    "CantorDimension",
    "AdmissibilityResult",
    "make_measure",
    "atomize",
    "ball_mass",
    "scaling_exponent_fit",
    "cantor_dimension",
    "admissibility_check",
    "cantor_endpoints",
    "suggested_centers",
    "suggested_radii",
    "measure_to_dict",
    "measure_from_dict",
]

MAX_ATOMS = 1 << 21

# 2-point Gauss-Legendre nodes on [0, 1]
_GAUSS2 = (0.5 - 0.5 / math.sqrt(3.0), 0.5 + 0.5 / math.sqrt(3.0))


def _point(p) -> tuple:
    if np.isscalar(p):
        return (float(p),)
    return tuple(float(c) for c in p)


def _points(ps) -> tuple:
    return tuple(_point(p) for p in ps)


# ---------------------------------------------------------------------------
# measure descriptions
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class DiracPoint:
    """Point mass ``weight * delta_location``."""

    location: tuple
    weight: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "location", _point(self.location))
        object.__setattr__(self, "weight", float(self.weight))

    def ambient_dim(self) -> int:
        return len(self.location)

    def support_dim(self) -> float:
        return 0.0

    def total_mass(self) -> float:
        return self.weight


@dataclass(frozen=True)
class Hypersurface:
    """Weighted arclength measure on a polyline.

    ``density[i]`` is the (constant) weight of the segment from
    ``vertices[i]`` to ``vertices[i+1]``; the measure is ``h * dsigma``.
    """

    vertices: tuple
    density: tuple

    def __post_init__(self):
        object.__setattr__(self, "vertices", _points(self.vertices))
        object.__setattr__(self, "density", tuple(float(h) for h in self.density))
        if len(self.vertices) < 2:
            raise ValueError("polyline needs at least two vertices")
        if len(self.density) != len(self.vertices) - 1:
            raise ValueError("need one density sample per segment")

    def segment_lengths(self) -> np.ndarray:
        v = np.asarray(self.vertices, float)
        return np.linalg.norm(np.diff(v, axis=0), axis=1)

    def ambient_dim(self) -> int:
        return len(self.vertices[0])

    def support_dim(self) -> float:
        return 1.0

    def total_mass(self) -> float:
        return float(np.dot(self.density, self.segment_lengths()))


@dataclass(frozen=True)
class Cantor:
    """Self-similar measure on the middle-``theta`` Cantor set.

    At each stage the open middle fraction ``theta`` of every interval is
    removed; mass splits equally between the two children.  The unit-
    interval construction is mapped affinely onto the ``embedding``
    segment (any ambient dimension).
    """

    theta: float
    depth: int
    embedding: tuple
    mass: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "theta", float(self.theta))
        object.__setattr__(self, "depth", int(self.depth))
        object.__setattr__(self, "embedding", _points(self.embedding))
        object.__setattr__(self, "mass", float(self.mass))
        if len(self.embedding) != 2:
            raise ValueError("embedding is a (start, end) segment")
        if self.depth < 1:
            raise ValueError("depth must be a positive integer")

    def ambient_dim(self) -> int:
        return len(self.embedding[0])

    def support_dim(self) -> float:
        return cantor_dimension(self.theta).alpha

    def total_mass(self) -> float:
        return self.mass


@dataclass(frozen=True)
class Product:
    """Product measure; atom coordinates of the factors are concatenated."""

    left: "MeasureSpec"
    right: "MeasureSpec"

    def ambient_dim(self) -> int:
        return self.left.ambient_dim() + self.right.ambient_dim()

    def support_dim(self) -> float:
        return self.left.support_dim() + self.right.support_dim()

    def total_mass(self) -> float:
        return self.left.total_mass() * self.right.total_mass()


@dataclass(frozen=True)
class Flow:
    """Boundary measure of an open polygon under an inward field.

    Differentiating the indicator of the polygon along a vector field
    that points into it yields the positive measure ``(-X . nu) dsigma``
    on the boundary, with ``nu`` the outward unit normal.  The field is
    sampled once per edge.
    """

    polygon: tuple
    field: tuple

    def __post_init__(self):
        object.__setattr__(self, "polygon", _points(self.polygon))
        object.__setattr__(self, "field", _points(self.field))
        if len(self.polygon) < 3:
            raise ValueError("polygon needs at least three vertices")
        if any(len(p) != 2 for p in self.polygon):
            raise ValueError("flow measures live in two dimensions")
        if len(self.field) != len(self.polygon):
            raise ValueError("need one field sample per edge")

    def edges(self) -> np.ndarray:
        v = np.asarray(self.polygon, float)
        return np.stack([v, np.roll(v, -1, axis=0)], axis=1)  # (ne, 2, 2)

    def edge_densities(self) -> np.ndarray:
        """Per-edge inward flux ``-X . nu`` (positive iff the field enters)."""
        e = self.edges()
        tang = e[:, 1] - e[:, 0]
        lengths = np.linalg.norm(tang, axis=1)
        if np.any(lengths == 0.0):
            raise ValueError("polygon has a zero-length edge")
        # signed area fixes the orientation so nu is always outward
        v = np.asarray(self.polygon, float)
        area2 = float(np.sum(v[:, 0] * np.roll(v[:, 1], -1) - np.roll(v[:, 0], -1) * v[:, 1]))
        if area2 == 0.0:
            raise ValueError("polygon encloses zero area")
        orient = 1.0 if area2 > 0.0 else -1.0
        normals = orient * np.column_stack([tang[:, 1], -tang[:, 0]]) / lengths[:, None]
        X = np.asarray(self.field, float)
        return -np.sum(X * normals, axis=1)

    def edge_lengths(self) -> np.ndarray:
        e = self.edges()
        return np.linalg.norm(e[:, 1] - e[:, 0], axis=1)

    def ambient_dim(self) -> int:
        return 2

    def support_dim(self) -> float:
        return 1.0

    def total_mass(self) -> float:
        return float(np.dot(self.edge_densities(), self.edge_lengths()))


@dataclass(frozen=True)
class Density:
    """Absolutely continuous measure ``a(x) dV`` on a box.

    ``coefficient`` may be a nonnegative constant, a callable evaluated at
    quadrature points, or a grid of cell samples (piecewise constant).
    Only constants and sample grids survive JSON round-trips.
    """

    bounds: tuple
    coefficient: Union[float, Callable, tuple] = 1.0

    def __post_init__(self):
        bounds = tuple((float(a), float(b)) for a, b in self.bounds)
        object.__setattr__(self, "bounds", bounds)
        if len(bounds) not in (1, 2):
            raise ValueError("density bounds must be 1D or 2D")
        coef = self.coefficient
        if callable(coef):
            pass
        elif np.isscalar(coef):
            coef = float(coef)
        else:
            grid = np.asarray(coef, float)
            if grid.ndim != len(bounds):
                raise ValueError("sample grid rank must match the bounds")
            if grid.ndim == 1:
                coef = tuple(float(v) for v in grid)
            else:
                coef = tuple(tuple(float(v) for v in row) for row in grid)
        object.__setattr__(self, "coefficient", coef)

    def ambient_dim(self) -> int:
        return len(self.bounds)

    def support_dim(self) -> float:
        return float(len(self.bounds))

    def volume(self) -> float:
        return float(np.prod([b - a for a, b in self.bounds]))

    def _eval(self, pts: np.ndarray) -> np.ndarray:
        coef = self.coefficient
        if callable(coef):
            return np.array([float(coef(p)) for p in pts])
        if np.isscalar(coef):
            return np.full(len(pts), float(coef))
        grid = np.asarray(coef, float)  # (mx,) in 1D, (mx, my) in 2D
        idx = []
        for axis, (a, b) in enumerate(self.bounds):
            m = grid.shape[axis]
            u = (pts[:, axis] - a) / (b - a)
            idx.append(np.clip((u * m).astype(int), 0, m - 1))
        return grid[tuple(idx)]

    def total_mass(self) -> float:
        if np.isscalar(self.coefficient) and not callable(self.coefficient):
            return float(self.coefficient) * self.volume()
        # quadrature estimate at a fixed reference resolution
        return float(atomize(self, 64, _validate=False).total_mass)


@dataclass(frozen=True)
class Sum:
    """Nonnegative combination ``sum_i coeff_i * mu_i`` of measures."""

    terms: tuple  # of (coeff, MeasureSpec)

    def __post_init__(self):
        terms = tuple((float(c), m) for c, m in self.terms)
        object.__setattr__(self, "terms", terms)
        if not terms:
            raise ValueError("sum needs at least one term")
        dims = {m.ambient_dim() for _, m in terms}
        if len(dims) != 1:
            raise ValueError("sum terms live in different ambient dimensions")

    def ambient_dim(self) -> int:
        return self.terms[0][1].ambient_dim()

    def support_dim(self) -> float:
        return max(m.support_dim() for c, m in self.terms if c > 0)

    def total_mass(self) -> float:
        return float(sum(c * m.total_mass() for c, m in self.terms))


MeasureSpec = Union[DiracPoint, Hypersurface, Cantor, Product, Flow, Density, Sum]


# ---------------------------------------------------------------------------
# validation
# ---------------------------------------------------------------------------

def make_measure(spec: MeasureSpec) -> MeasureSpec:
    """Validate a measure description and return it.

    Checks positivity of every weight/density/coefficient, the open-range
    condition on Cantor ``theta``, the strict inward-flux condition on
    flow measures, and that the total mass is positive.  Derived metadata
    is available on the returned spec via ``ambient_dim()``,
    ``support_dim()``, and ``total_mass()``.
    """
    _validate(spec)
    if spec.total_mass() <= 0.0:
        raise ZeroMass(f"measure has zero total mass: {spec!r}")
    return spec


def _validate(spec) -> None:
    if isinstance(spec, DiracPoint):
        if spec.weight < 0.0:
            raise NegativeWeight(f"Dirac weight {spec.weight} < 0")
    elif isinstance(spec, Hypersurface):
        if min(spec.density) < 0.0:
            raise NegativeWeight("hypersurface density has a negative sample")
        if np.any(spec.segment_lengths() == 0.0):
            raise ValueError("polyline has a zero-length segment")
    elif isinstance(spec, Cantor):
        if not 0.0 < spec.theta < 1.0:
            raise DomainError(f"Cantor theta must lie in (0, 1), got {spec.theta}")
        if spec.mass < 0.0:
            raise NegativeWeight(f"Cantor mass {spec.mass} < 0")
    elif isinstance(spec, Product):
        _validate(spec.left)
        _validate(spec.right)
    elif isinstance(spec, Flow):
        dens = spec.edge_densities()
        bad = np.nonzero(dens <= 0.0)[0]
        if bad.size:
            raise OutwardFlow(
                f"flow field is not strictly inward on edges {bad.tolist()} "
                f"(-X.nu = {dens[bad].tolist()})"
            )
    elif isinstance(spec, Density):
        coef = spec.coefficient
        if callable(coef):
            probe = atomize(spec, 8, _validate=False)
            if np.any(probe.weights < 0.0):
                raise NegativeWeight("density coefficient is negative somewhere")
        elif np.isscalar(coef):
            if coef < 0.0:
                raise NegativeWeight(f"density coefficient {coef} < 0")
        else:
            if np.min(np.asarray(coef, float)) < 0.0:
                raise NegativeWeight("density sample grid has a negative entry")
    elif isinstance(spec, Sum):
        for c, m in spec.terms:
            if c < 0.0:
                raise NegativeWeight(f"sum coefficient {c} < 0")
            _validate(m)
    else:
        raise TypeError(f"not a measure spec: {spec!r}")


# ---------------------------------------------------------------------------
# atomization
# ---------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class AtomSet:
    """Finite quadrature { (p_k, w_k) } realizing a measure.

    ``total_mass`` is the exact accumulated weight; refining
    ``resolution`` improves how well pairings against smooth functions
    approximate the underlying integral.
    """

    points: np.ndarray   # (n, dim)
    weights: np.ndarray  # (n,)
    resolution: int

    def __post_init__(self):
        pts = np.atleast_2d(np.asarray(self.points, float))
        wts = np.asarray(self.weights, float).ravel()
        if pts.shape[0] != wts.shape[0]:
            raise ValueError("points and weights disagree in length")
        pts.flags.writeable = False
        wts.flags.writeable = False
        object.__setattr__(self, "points", pts)
        object.__setattr__(self, "weights", wts)

    def __len__(self) -> int:
        return self.points.shape[0]

    @property
    def dim(self) -> int:
        return self.points.shape[1]

    @property
    def total_mass(self) -> float:
        return float(self.weights.sum())

    @staticmethod
    def empty(dim: int, resolution: int = 1) -> "AtomSet":
        return AtomSet(np.zeros((0, dim)), np.zeros(0), resolution)


def _atom_count(spec, resolution: int) -> int:
    if isinstance(spec, DiracPoint):
        return 1
    if isinstance(spec, Hypersurface):
        return 2 * resolution * (len(spec.vertices) - 1)
    if isinstance(spec, Cantor):
        return 1 << spec.depth
    if isinstance(spec, Product):
        return _atom_count(spec.left, resolution) * _atom_count(spec.right, resolution)
    if isinstance(spec, Flow):
        return 2 * resolution * len(spec.polygon)
    if isinstance(spec, Density):
        return resolution ** spec.ambient_dim()
    if isinstance(spec, Sum):
        return sum(_atom_count(m, resolution) for _, m in spec.terms)
    raise TypeError(f"not a measure spec: {spec!r}")


def _segment_gauss(p: np.ndarray, q: np.ndarray, density: float, resolution: int):
    """2-point Gauss atoms on ``resolution`` equal pieces of segment pq."""
    breaks = np.linspace(0.0, 1.0, resolution + 1)
    t = np.concatenate([breaks[:-1] + (breaks[1:] - breaks[:-1]) * g for g in _GAUSS2])
    t.sort()
    pts = p[None, :] + t[:, None] * (q - p)[None, :]
    seg_len = float(np.linalg.norm(q - p))
    wts = np.full(t.size, density * seg_len / t.size)
    return pts, wts


def _cantor_lefts(theta: float, depth: int):
    """Left endpoints and common length of the depth-``depth`` intervals on [0,1]."""
    s = (1.0 - theta) / 2.0
    lefts = np.array([0.0])
    length = 1.0
    for _ in range(depth):
        lefts = np.concatenate([lefts, lefts + length * (1.0 - s)])
        length *= s
    lefts.sort()
    return lefts, length


def atomize(spec: MeasureSpec, resolution: int, max_atoms: int = MAX_ATOMS,
            _validate: bool = True) -> AtomSet:
    """Reduce a measure to a finite weighted point set.

    Point masses map to single atoms; polyline and flow measures use a
    per-segment Gauss rule with ``resolution`` subdivisions; the Cantor
    measure places one atom of weight ``mass * 2**-depth`` at the midpoint
    of each depth-``depth`` construction interval (exact at dyadic
    scales); densities use a midpoint rule on a ``resolution``-per-axis
    grid; products and sums combine their factors' atoms.
    """
    if resolution < 1:
        raise ValueError("resolution must be a positive integer")
    if _validate:
        make_measure(spec)
    est = _atom_count(spec, resolution)
    if est > max_atoms:
        raise ResolutionOverflow(f"{est} atoms would exceed the cap of {max_atoms}")
    pts, wts = _atomize(spec, resolution)
    return AtomSet(pts, wts, resolution)


def _atomize(spec, resolution: int):
    if isinstance(spec, DiracPoint):
        return np.array([spec.location]), np.array([spec.weight])

    if isinstance(spec, Hypersurface):
        verts = np.asarray(spec.vertices, float)
        chunks = [
            _segment_gauss(verts[i], verts[i + 1], spec.density[i], resolution)
            for i in range(len(verts) - 1)
        ]
        return (np.concatenate([c[0] for c in chunks]),
                np.concatenate([c[1] for c in chunks]))

    if isinstance(spec, Cantor):
        lefts, length = _cantor_lefts(spec.theta, spec.depth)
        mids = lefts + 0.5 * length
        start = np.asarray(spec.embedding[0], float)
        end = np.asarray(spec.embedding[1], float)
        pts = start[None, :] + mids[:, None] * (end - start)[None, :]
        wts = np.full(mids.size, spec.mass / mids.size)
        return pts, wts

    if isinstance(spec, Product):
        lp, lw = _atomize(spec.left, resolution)
        rp, rw = _atomize(spec.right, resolution)
        nl, nr = len(lw), len(rw)
        pts = np.hstack([np.repeat(lp, nr, axis=0), np.tile(rp, (nl, 1))])
        wts = np.repeat(lw, nr) * np.tile(rw, nl)
        return pts, wts

    if isinstance(spec, Flow):
        edges = spec.edges()
        dens = spec.edge_densities()
        chunks = [
            _segment_gauss(edges[i, 0], edges[i, 1], dens[i], resolution)
            for i in range(len(edges))
        ]
        return (np.concatenate([c[0] for c in chunks]),
                np.concatenate([c[1] for c in chunks]))

    if isinstance(spec, Density):
        axes = [np.linspace(a, b, resolution + 1) for a, b in spec.bounds]
        mids = [0.5 * (ax[:-1] + ax[1:]) for ax in axes]
        cell = np.prod([(b - a) / resolution for a, b in spec.bounds])
        if len(mids) == 1:
            pts = mids[0][:, None]
        else:
            gx, gy = np.meshgrid(mids[0], mids[1], indexing="ij")
            pts = np.column_stack([gx.ravel(), gy.ravel()])
        wts = spec._eval(pts) * cell
        return pts, wts

    if isinstance(spec, Sum):
        chunks = []
        for c, m in spec.terms:
            p, w = _atomize(m, resolution)
            chunks.append((p, c * w))
        return (np.concatenate([c[0] for c in chunks]),
                np.concatenate([c[1] for c in chunks]))

    raise TypeError(f"not a measure spec: {spec!r}")


def cantor_endpoints(spec: Cantor, depth: int | None = None) -> np.ndarray:
    """Endpoints of the construction intervals, mapped into the embedding.

    These realize the extremal ball-mass growth of the self-similar
    measure and are the natural centers for scaling fits.
    """
    d = min(spec.depth, depth if depth is not None else 5)
    lefts, length = _cantor_lefts(spec.theta, d)
    u = np.concatenate([lefts, lefts + length])
    u = np.unique(u)
    start = np.asarray(spec.embedding[0], float)
    end = np.asarray(spec.embedding[1], float)
    return start[None, :] + u[:, None] * (end - start)[None, :]


# ---------------------------------------------------------------------------
# ball-mass diagnostics
# ---------------------------------------------------------------------------

def ball_mass(atoms: AtomSet, center, radius: float) -> float:
    """Total weight of atoms within Euclidean distance ``radius`` of ``center``."""
    if radius <= 0.0:
        raise ValueError("radius must be positive")
    c = np.asarray(_point(center), float)
    d2 = np.sum((atoms.points - c[None, :]) ** 2, axis=1)
    return float(atoms.weights[d2 <= radius * radius].sum())


@dataclass(frozen=True, eq=False)
class ScalingFit:
    """Power-law envelope ``mass(B_r) <= A_hat * r**alpha_hat`` over the samples."""

    alpha_hat: float
    A_hat: float
    radii: np.ndarray
    masses: np.ndarray


def scaling_exponent_fit(atoms: AtomSet, centers, radii) -> ScalingFit:
    """Fit the ball-mass growth exponent of an atomized measure.

    For each radius the mass is maximized over the given centers (a
    computable stand-in for the supremum over all points); the exponent
    is the least-squares slope of log max-mass against log radius, and
    the constant is lifted so the power law bounds every sample.
    """
    cs = np.atleast_2d(np.asarray([_point(c) for c in centers], float))
    rs = np.asarray(sorted(set(float(r) for r in radii)), float)
    if rs.size < 2:
        raise ValueError("need at least two distinct radii")
    if np.any(rs <= 0.0):
        raise ValueError("radii must be positive")
    if len(atoms) == 0:
        raise DegenerateFit("no atoms to fit")

    # pairwise distances once; each radius is then a threshold query
    diff = atoms.points[None, :, :] - cs[:, None, :]
    d2 = np.sum(diff * diff, axis=2)  # (ncenters, natoms)
    masses = np.empty(rs.size)
    for i, r in enumerate(rs):
        inside = d2 <= r * r
        masses[i] = float(np.max(inside @ atoms.weights))

    keep = masses > 0.0
    if keep.sum() < 2:
        raise DegenerateFit("ball masses vanish on the sampled radii")
    rk, mk = rs[keep], masses[keep]
    slope, logA = np.polyfit(np.log(rk), np.log(mk), 1)
    alpha = float(slope)
    # envelope constant: smallest A with m_i <= A r_i^alpha for all samples
    A = float(np.max(mk / rk ** alpha))
    return ScalingFit(alpha_hat=alpha, A_hat=A, radii=rk, masses=mk)


def suggested_centers(spec: MeasureSpec, atoms: AtomSet, max_centers: int = 128,
                      n_uniform: int = 17) -> np.ndarray:
    """Deterministic center set for scaling fits.

    Cantor measures use construction endpoints (plus uniform samples on
    the embedding); anything else uses a strided atom subsample plus a
    uniform grid over the atom bounding box.
    """
    if isinstance(spec, Cantor):
        ends = cantor_endpoints(spec)
        start = np.asarray(spec.embedding[0], float)
        end = np.asarray(spec.embedding[1], float)
        u = np.linspace(0.0, 1.0, n_uniform)
        extra = start[None, :] + u[:, None] * (end - start)[None, :]
        pts = np.vstack([ends, extra])
    elif isinstance(spec, Product):
        lc = suggested_centers(spec.left, atomize(spec.left, atoms.resolution),
                               max_centers=16, n_uniform=5)
        rc = suggested_centers(spec.right, atomize(spec.right, atoms.resolution),
                               max_centers=16, n_uniform=5)
        pts = np.hstack([np.repeat(lc, len(rc), axis=0), np.tile(rc, (len(lc), 1))])
    else:
        stride = max(1, len(atoms) // max(1, max_centers // 2))
        sub = atoms.points[::stride]
        lo = atoms.points.min(axis=0)
        hi = atoms.points.max(axis=0)
        if atoms.dim == 1:
            grid = np.linspace(lo[0], hi[0], n_uniform)[:, None]
        else:
            g = [np.linspace(lo[k], hi[k], max(2, int(round(n_uniform ** (1 / atoms.dim)))))
                 for k in range(atoms.dim)]
            mesh = np.meshgrid(*g, indexing="ij")
            grid = np.column_stack([m.ravel() for m in mesh])
        pts = np.vstack([sub, grid])
    if len(pts) > max_centers:
        stride = int(np.ceil(len(pts) / max_centers))
        pts = pts[::stride]
    return pts


def suggested_radii(atoms: AtomSet, count: int = 9) -> np.ndarray:
    """Log-spaced radii between a small fraction of the diameter and a quarter of it."""
    lo = atoms.points.min(axis=0)
    hi = atoms.points.max(axis=0)
    diam = float(np.linalg.norm(hi - lo))
    if diam == 0.0:
        diam = 1.0
    return np.geomspace(diam * 10 ** -3.5, diam / 4.0, count)


# ---------------------------------------------------------------------------
# dimension and admissibility formulas
# ---------------------------------------------------------------------------

class CantorDimension(NamedTuple):
    alpha: float
    b: float
    gamma_alpha: float


def cantor_dimension(theta: float) -> CantorDimension:
    """Similarity dimension data of the middle-``theta`` Cantor set.

    Returns ``alpha = log 2 / log b`` with ``b = 2 / (1 - theta)``,
    together with the normalizing constant
    ``gamma_alpha = pi**(alpha/2) * 2**-alpha / Gamma(alpha/2 + 1)`` of
    the corresponding alpha-dimensional Hausdorff measure.  The constant
    is reported for reference only; the decay machinery is invariant
    under positive rescaling of the measure.
    """
    if not 0.0 < theta < 1.0:
        raise DomainError(f"theta must lie in (0, 1), got {theta}")
    b = 2.0 / (1.0 - theta)
    alpha = math.log(2.0) / math.log(b)
    gamma = math.pi ** (alpha / 2.0) * 2.0 ** (-alpha) / math.gamma(alpha / 2.0 + 1.0)
    return CantorDimension(alpha=alpha, b=b, gamma_alpha=gamma)


class AdmissibilityResult(NamedTuple):
    admissible: bool
    margin: float
    threshold: float


def admissibility_check(n: int, alpha: float) -> AdmissibilityResult:
    """Does a ball-mass exponent ``alpha`` admit bounded damping in dimension n?

    The sufficient condition is ``alpha > (n - 1) - 1/(n - 1)``; in
    particular any positive exponent works for n = 2.  For product
    measures pass the sum of the factor exponents.
    """
    n = int(n)
    if n < 2:
        raise ValueError("ambient dimension must be at least 2")
    threshold = (n - 1) - 1.0 / (n - 1)
    margin = alpha - threshold
    return AdmissibilityResult(admissible=margin > 0.0, margin=margin,
                               threshold=threshold)


# ---------------------------------------------------------------------------
# JSON round-trip
# ---------------------------------------------------------------------------

def measure_to_dict(spec: MeasureSpec) -> dict:
    """Serialize a measure description to a JSON-ready dict."""
    if isinstance(spec, DiracPoint):
        return {"variant": "dirac", "location": list(spec.location),
                "weight": spec.weight}
    if isinstance(spec, Hypersurface):
        return {"variant": "hypersurface",
                "vertices": [list(v) for v in spec.vertices],
                "density": list(spec.density)}
    if isinstance(spec, Cantor):
        return {"variant": "cantor", "theta": spec.theta, "depth": spec.depth,
                "embedding": [list(p) for p in spec.embedding], "mass": spec.mass}
    if isinstance(spec, Product):
        return {"variant": "product", "left": measure_to_dict(spec.left),
                "right": measure_to_dict(spec.right)}
    if isinstance(spec, Flow):
        return {"variant": "flow", "polygon": [list(p) for p in spec.polygon],
                "field": [list(x) for x in spec.field]}
    if isinstance(spec, Density):
        coef = spec.coefficient
        if callable(coef):
            raise ValueError("callable density coefficients do not serialize")
        doc = {"variant": "density", "bounds": [list(b) for b in spec.bounds]}
        if np.isscalar(coef):
            doc["value"] = float(coef)
        elif spec.ambient_dim() == 1:
            doc["samples"] = list(coef)
        else:
            doc["samples"] = [list(row) for row in coef]
        return doc
    if isinstance(spec, Sum):
        return {"variant": "sum",
                "terms": [{"coeff": c, "measure": measure_to_dict(m)}
                          for c, m in spec.terms]}
    raise TypeError(f"not a measure spec: {spec!r}")


def measure_from_dict(doc: dict) -> MeasureSpec:
    """Rebuild a measure description from its JSON dict."""
    variant = doc.get("variant")
    if variant == "dirac":
        return DiracPoint(tuple(doc["location"]), doc.get("weight", 1.0))
    if variant == "hypersurface":
        return Hypersurface(tuple(map(tuple, doc["vertices"])),
                            tuple(doc["density"]))
    if variant == "cantor":
        return Cantor(doc["theta"], doc["depth"],
                      tuple(map(tuple, doc["embedding"])), doc.get("mass", 1.0))
    if variant == "product":
        return Product(measure_from_dict(doc["left"]),
                       measure_from_dict(doc["right"]))
    if variant == "flow":
        return Flow(tuple(map(tuple, doc["polygon"])),
                    tuple(map(tuple, doc["field"])))
    if variant == "density":
        bounds = tuple(map(tuple, doc["bounds"]))
        if "samples" in doc:
            return Density(bounds, doc["samples"])
        return Density(bounds, float(doc.get("value", 1.0)))
    if variant == "sum":
        return Sum(tuple((t["coeff"], measure_from_dict(t["measure"]))
                         for t in doc["terms"]))
    raise ValueError(f"unknown measure variant: {variant!r}")
