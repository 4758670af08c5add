"""Cumulative Belief/Plausibility curve container shared by the exact and
approximated computation paths."""

from __future__ import annotations

from dataclasses import dataclass, field


@dataclass(frozen=True)
class CurvePoint:
    """One (threshold, Bel, Pl) sample with its error budget.

    ``bel_err``/``pl_err`` bound the distance to the unapproximated value
    (discarded mass plus mass decided from unverified archive samples).
    ``exact`` marks points the tree was explicitly refined at, as opposed
    to intermediate points read off a coarse box set.
    """

    nu: float
    bel: float
    pl: float
    bel_err: float = 0.0
    pl_err: float = 0.0
    exact: bool = True


@dataclass
class BeliefCurve:
    """Monotone sequence of cumulative Belief/Plausibility points.

    ``counts`` carries provenance of the run that produced the curve
    (model evaluations, optimizations, boxes filtered, archive decisions).
    """

    points: list[CurvePoint] = field(default_factory=list)
    counts: dict[str, float] = field(default_factory=dict)

    def __post_init__(self):
        self.points = sorted(self.points, key=lambda p: p.nu)

    def validate(self, tol: float = 1e-9) -> None:
        """Check ordering, monotonicity, 0 <= Bel <= Pl <= 1 and error signs."""
        prev = None
        for p in self.points:
            if not (-tol <= p.bel <= 1.0 + tol and -tol <= p.pl <= 1.0 + tol):
                raise ValueError(f"curve value outside [0,1] at nu={p.nu}")
            if p.bel > p.pl + tol:
                raise ValueError(f"Bel > Pl at nu={p.nu}")
            if p.bel_err < 0 or p.pl_err < 0:
                raise ValueError(f"negative error budget at nu={p.nu}")
            if prev is not None:
                if p.nu < prev.nu:
                    raise ValueError("points not sorted by threshold")
                if p.bel < prev.bel - tol or p.pl < prev.pl - tol:
                    raise ValueError(f"curve not nondecreasing at nu={p.nu}")
            prev = p

    def bel_at(self, nu: float) -> float:
        """Step-curve lookup: Bel at the largest recorded threshold <= nu."""
        best = 0.0
        for p in self.points:
            if p.nu <= nu:
                best = p.bel
            else:
                break
        return best

    def pl_at(self, nu: float) -> float:
        best = 0.0
        for p in self.points:
            if p.nu <= nu:
                best = p.pl
            else:
                break
        return best

    @property
    def nus(self) -> list[float]:
        return [p.nu for p in self.points]

    def rows(self) -> list[tuple]:
        """CSV-ready rows: (nu, bel, pl, bel_err, pl_err, exact)."""
        return [(p.nu, p.bel, p.pl, p.bel_err, p.pl_err, int(p.exact)) for p in self.points]
