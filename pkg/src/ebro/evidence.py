"""Interval evidence structures and the exact cumulative Belief/Plausibility
computation.

An uncertain parameter is described by a set of intervals with positive
masses summing to one.  The joint structure over several parameters is the
Cartesian product of the per-parameter intervals; each product cell (focal
element) carries the product of the member masses.  For sampling and
optimization the focal elements are packed, width-proportionally per
coordinate, into the unit hypercube so that every unit-cube point lies in
exactly one cell.
"""

from __future__ import annotations

import itertools
import logging
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

log = logging.getLogger(__name__)

MASS_TOL = 1e-9


class InvalidSpaceError(ValueError):
    """An uncertain-space declaration violates its invariants."""


class ModelEvaluationError(RuntimeError):
    """A system model failed to evaluate; carries the offending point."""

    def __init__(self, message: str, d=None, u=None):
        super().__init__(message)
        self.d = d
        self.u = u


@dataclass(frozen=True)
class UncertainVariable:
    """One uncertain parameter: intervals with belief masses.

    Intervals may overlap and may be disconnected.  Each mass must be
    positive and the masses must sum to one (within ``MASS_TOL``).
    """

    name: str
    intervals: tuple[tuple[float, float], ...]
    bpa: tuple[float, ...]

    def __init__(self, name: str, intervals: Iterable, bpa: Iterable[float]):
        object.__setattr__(self, "name", str(name))
        object.__setattr__(
            self, "intervals", tuple((float(a), float(b)) for a, b in intervals)
        )
        object.__setattr__(self, "bpa", tuple(float(m) for m in bpa))
        self._validate()

    def _validate(self):
        if not self.intervals:
            raise InvalidSpaceError(f"variable {self.name!r} has no intervals")
        if len(self.intervals) != len(self.bpa):
            raise InvalidSpaceError(
                f"variable {self.name!r}: {len(self.intervals)} intervals "
                f"but {len(self.bpa)} masses"
            )
        for lo, hi in self.intervals:
            if not (lo < hi):
                raise InvalidSpaceError(
                    f"variable {self.name!r}: interval [{lo}, {hi}] is not lower < upper"
                )
        if any(m <= 0 for m in self.bpa):
            raise InvalidSpaceError(f"variable {self.name!r}: masses must be > 0")
        total = sum(self.bpa)
        if abs(total - 1.0) > MASS_TOL:
            raise InvalidSpaceError(
                f"variable {self.name!r}: masses sum to {total!r}, not 1"
            )

    @property
    def n_intervals(self) -> int:
        return len(self.intervals)

    @property
    def widths(self) -> tuple[float, ...]:
        return tuple(hi - lo for lo, hi in self.intervals)


@dataclass(frozen=True)
class UncertainSpace:
    """Ordered collection of uncertain variables (the joint frame)."""

    variables: tuple[UncertainVariable, ...]

    def __init__(self, variables: Iterable[UncertainVariable]):
        object.__setattr__(self, "variables", tuple(variables))
        if not self.variables:
            raise InvalidSpaceError("uncertain space has no variables")
        # Product measure: per-variable masses already sum to 1, so the
        # total over all focal elements is their product.
        total = 1.0
        for v in self.variables:
            total *= sum(v.bpa)
        if abs(total - 1.0) > MASS_TOL:
            raise InvalidSpaceError(f"total focal mass {total!r} differs from 1")

    @property
    def dimension(self) -> int:
        return len(self.variables)

    @property
    def n_focal_elements(self) -> int:
        n = 1
        for v in self.variables:
            n *= v.n_intervals
        return n

    def names(self) -> list[str]:
        return [v.name for v in self.variables]


@dataclass(frozen=True)
class FocalElement:
    """A product cell: one interval per variable, mass = product of masses."""

    index: tuple[int, ...]
    bounds: tuple[tuple[float, float], ...]
    bpa: float


@dataclass(frozen=True)
class Proposition:
    """The event "budget <= threshold"; ties (f == nu) are inside the set."""

    threshold: float

    def contains(self, value: float) -> bool:
        return value <= self.threshold


def build_focal_elements(space: UncertainSpace) -> list[FocalElement]:
    """All product focal elements in lexicographic index order."""
    if not isinstance(space, UncertainSpace):
        raise InvalidSpaceError("expected an UncertainSpace")
    elements = []
    ranges = [range(v.n_intervals) for v in space.variables]
    for index in itertools.product(*ranges):
        bounds = tuple(space.variables[i].intervals[k] for i, k in enumerate(index))
        mass = 1.0
        for i, k in enumerate(index):
            mass *= space.variables[i].bpa[k]
        elements.append(FocalElement(index=index, bounds=bounds, bpa=mass))
    return elements


class UnitHypercubeMap:
    """Width-proportional packing of each variable's intervals into [0, 1].

    Per coordinate, cell k of the unit axis has width
    ``width(interval k) / sum(widths)``; cells are concatenated in interval
    list order, so overlapping physical intervals occupy disjoint unit
    cells.  The map restricted to any cell is affine and strictly
    increasing; cell membership uses half-open cells ``[b_k, b_{k+1})``
    with the last cell closed, which makes the mapping total and
    deterministic on [0, 1]^n.
    """

    def __init__(self, space: UncertainSpace):
        self.space = space
        self.boundaries: list[np.ndarray] = []
        for v in space.variables:
            w = np.array(v.widths, dtype=float)
            b = np.concatenate(([0.0], np.cumsum(w) / w.sum()))
            b[-1] = 1.0  # guard cumulative rounding
            if np.any(np.diff(b) <= 0):
                raise InvalidSpaceError(
                    f"variable {v.name!r}: degenerate unit cell widths"
                )
            self.boundaries.append(b)

        n = space.dimension
        kmax = max(v.n_intervals for v in space.variables)
        self.n_cells = np.array([v.n_intervals for v in space.variables])
        # Padded matrices for vectorized cell lookup / affine evaluation.
        self._bmat = np.full((n, kmax + 1), np.inf)
        self._blo = np.zeros((n, kmax))
        self._phys_lo = np.zeros((n, kmax))
        self._scale = np.ones((n, kmax))  # physical width / unit width
        for i, v in enumerate(space.variables):
            k = v.n_intervals
            b = self.boundaries[i]
            self._bmat[i, : k + 1] = b
            self._blo[i, :k] = b[:-1]
            lo = np.array([iv[0] for iv in v.intervals])
            hi = np.array([iv[1] for iv in v.intervals])
            self._phys_lo[i, :k] = lo
            self._scale[i, :k] = (hi - lo) / np.diff(b)
        self._rows = np.arange(n)

    @property
    def dimension(self) -> int:
        return self.space.dimension

    def locate(self, x: np.ndarray) -> np.ndarray:
        """Cell index per coordinate for a unit-cube point."""
        x = np.asarray(x, dtype=float)
        cells = (x[:, None] >= self._bmat).sum(axis=1) - 1
        return np.minimum(cells, self.n_cells - 1)

    def cell_physical(self, x: np.ndarray, cells: np.ndarray) -> np.ndarray:
        """Affine image of x through the given cells (no membership check)."""
        x = np.asarray(x, dtype=float)
        return self._phys_lo[self._rows, cells] + (
            x - self._blo[self._rows, cells]
        ) * self._scale[self._rows, cells]

    def to_physical(self, x: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        """Map a unit-cube point to physical space.

        Returns ``(u, cells)`` where ``cells`` identifies the focal element
        whose closure contains ``u``.  Raises ``ValueError`` outside [0,1]^n.
        """
        x = np.asarray(x, dtype=float)
        if x.shape != (self.dimension,):
            raise ValueError(f"point has shape {x.shape}, expected ({self.dimension},)")
        if np.any(x < 0.0) or np.any(x > 1.0):
            raise ValueError(f"point {x!r} outside the unit hypercube")
        cells = self.locate(x)
        return self.cell_physical(x, cells), cells

    def to_unit(self, u: np.ndarray, cells: np.ndarray) -> np.ndarray:
        """Inverse affine map given the cell (round-trips to_physical)."""
        u = np.asarray(u, dtype=float)
        return self._blo[self._rows, cells] + (
            u - self._phys_lo[self._rows, cells]
        ) / self._scale[self._rows, cells]

    def cell_unit_bounds(self, cells_lo: np.ndarray, cells_hi: np.ndarray):
        """Unit-cube bounds of the box covering cells [lo, hi) per coordinate."""
        lo = np.array([self.boundaries[i][k] for i, k in enumerate(cells_lo)])
        hi = np.array([self.boundaries[i][k] for i, k in enumerate(cells_hi)])
        return lo, hi


def build_unit_map(space: UncertainSpace) -> UnitHypercubeMap:
    return UnitHypercubeMap(space)


def bel_from_complement(pl_not_a: float) -> float:
    """Belief of a proposition from the plausibility of its complement."""
    return 1.0 - pl_not_a


def exact_bel_pl(
    model,
    d: Sequence[float],
    space: UncertainSpace,
    thresholds: Sequence[float],
    optimizer=None,
    count_only: bool = False,
):
    """Exact cumulative Bel/Pl at the given thresholds for a fixed design.

    Runs one global maximization and one global minimization of
    ``f(d, .)`` over every focal element (2 * N optimizations).  For a
    threshold nu, Bel is the mass of elements whose maximum is <= nu and
    Pl the mass of those whose minimum is <= nu; Bel is produced through
    the complement identity so Bel(nu) = 1 - Pl(not A)(nu) holds by
    construction.

    With ``count_only`` the focal accounting is returned without running
    any optimization (all curve values are NaN).
    """
    from .curves import BeliefCurve, CurvePoint
    from .optimize import GlobalSearchConfig, global_optimize

    elements = build_focal_elements(space)
    counts = {
        "focal_elements": len(elements),
        "optimizations": 2 * len(elements),
        "model_evaluations": 0,
    }
    if count_only:
        points = [CurvePoint(float(nu), float("nan"), float("nan")) for nu in thresholds]
        return BeliefCurve(points=points, counts=counts)

    d = np.asarray(d, dtype=float)
    cfg = optimizer if optimizer is not None else GlobalSearchConfig()

    def objective(u):
        try:
            return model.fn(d, u)
        except Exception as exc:  # noqa: BLE001 - report the offending point
            raise ModelEvaluationError(str(exc), d=d, u=u) from exc

    evals = 0
    mins = np.empty(len(elements))
    maxs = np.empty(len(elements))
    masses = np.array([e.bpa for e in elements])
    for j, element in enumerate(elements):
        budget = cfg.resolved_budget(space.dimension, role="inner")
        for sense, store in (("max", maxs), ("min", mins)):
            seed = np.random.SeedSequence(
                [cfg.seed & 0xFFFFFFFF, j, 0 if sense == "max" else 1]
            )
            res = global_optimize(
                objective,
                element.bounds,
                cfg,
                sense=sense,
                rng=np.random.default_rng(seed),
                budget=budget,
            )
            store[j] = res.f
            evals += res.evaluations
    counts["model_evaluations"] = evals

    points = []
    for nu in thresholds:
        nu = float(nu)
        pl_not_a = float(masses[maxs > nu].sum())
        pl_a = float(masses[mins <= nu].sum())
        points.append(CurvePoint(nu=nu, bel=bel_from_complement(pl_not_a), pl=pl_a))
    curve = BeliefCurve(points=points, counts=counts)
    curve.validate()
    return curve
