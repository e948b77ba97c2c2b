"""Finite quasimetric measure spaces: structural constants and canonical balls.

A space is a finite point set carrying a symmetric distance matrix and
strictly positive point masses.  Balls are open: ``y`` belongs to ``B(x, r)``
iff ``dist[x, y] < r``.  Membership changes only when the radius crosses one
of the finitely many distances from the center, so per center the canonical
radii (the positive distance values, plus one radius past the maximum) realize
every achievable member set exactly once.  Every supremum "over all balls" in
this package is therefore an exact maximum over the canonical family.

Structural constants profiled here:

* ``kappa``  -- smallest constant with d(x,y) <= kappa*(d(x,z)+d(z,y));
* ``c_mu``   -- smallest doubling constant, sup of mu(B(x,2r))/mu(B(x,r));
* ``d_mu``   -- doubling order log2(c_mu);
* ``engulf`` -- kappa*(2*kappa+1); two intersecting balls with r(B1) <= r(B2)
  satisfy B1 subset-of engulf*B2.

The doubling supremum over *all* real radii is attained at the canonical
radii: the measure of B(x, r) is a left-continuous step function of r whose
jumps sit at distance values, and candidates at half-breakpoints are dominated
by candidates at the next distance value.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InputError

__all__ = [
    "Ball",
    "SpaceProfile",
    "QuasiMetricSpace",
    "BallTable",
    "build_space",
    "space_profile",
    "canonical_radii",
    "enumerate_balls",
    "ball_table",
    "ball_members",
    "ball_mask",
    "dilate_ball",
    "whole_space_ball",
    "check_engulfing",
    "check_dilation_bounds",
]


@dataclass(frozen=True)
class Ball:
    """Open ball: center index plus numeric radius (> 0)."""

    center: int
    radius: float


@dataclass(frozen=True)
class SpaceProfile:
    kappa: float
    c_mu: float
    d_mu: float
    engulf: float


class QuasiMetricSpace:
    """Finite point set with distance matrix ``dist`` and masses ``mass``.

    Invariants checked on construction: dist is square, symmetric, zero
    exactly on the diagonal, nonnegative and finite; mass is strictly
    positive and finite.  Atoms (points with large mass) are fine; an empty
    point set is not.
    """

    def __init__(self, dist, mass):
        dist = np.asarray(dist, dtype=float)
        mass = np.asarray(mass, dtype=float)
        if dist.ndim != 2 or dist.shape[0] != dist.shape[1]:
            raise InputError(f"distance matrix must be square, got shape {dist.shape}")
        n = dist.shape[0]
        if n == 0:
            raise InputError("empty space: at least one point required")
        if mass.shape != (n,):
            raise InputError(
                f"dimension mismatch: {n} points but mass vector of shape {mass.shape}"
            )
        if not np.all(np.isfinite(dist)):
            i, j = np.argwhere(~np.isfinite(dist))[0]
            raise InputError(f"non-finite distance at ({i}, {j})")
        if not np.all(np.isfinite(mass)):
            i = int(np.argwhere(~np.isfinite(mass))[0][0])
            raise InputError(f"non-finite mass at index {i}")
        neg = np.argwhere(dist < 0)
        if neg.size:
            i, j = neg[0]
            raise InputError(f"negative distance at ({i}, {j})")
        asym = np.argwhere(dist != dist.T)
        if asym.size:
            i, j = asym[0]
            raise InputError(f"asymmetric distance at ({i}, {j})")
        if np.any(np.diag(dist) != 0):
            i = int(np.argwhere(np.diag(dist) != 0)[0][0])
            raise InputError(f"nonzero self-distance at index {i}")
        off = dist + np.eye(n)
        zero = np.argwhere(off == 0)
        if zero.size:
            i, j = zero[0]
            raise InputError(f"zero off-diagonal distance at ({i}, {j})")
        bad = np.argwhere(mass <= 0)
        if bad.size:
            i = int(bad[0][0])
            raise InputError(f"nonpositive mass at index {i}")
        self.dist = dist
        self.mass = mass
        self._table = None  # lazy BallTable cache

    @property
    def n(self) -> int:
        return self.dist.shape[0]

    @property
    def total_mass(self) -> float:
        return float(self.mass.sum())

    def __repr__(self):  # pragma: no cover
        return f"QuasiMetricSpace(n={self.n}, total_mass={self.total_mass:g})"


def _grid_coordinates(shape):
    if len(shape) == 1:
        return np.arange(shape[0], dtype=float)[:, None]
    if len(shape) == 2:
        ii, jj = np.meshgrid(np.arange(shape[0]), np.arange(shape[1]), indexing="ij")
        return np.stack([ii.ravel(), jj.ravel()], axis=1).astype(float)
    raise InputError(f"grid shape must have 1 or 2 entries, got {shape}")


_METRIC_ORDERS = {"l1": 1, "l2": 2, "linf": np.inf}


def build_space(spec: dict) -> QuasiMetricSpace:
    """Build a validated space from a specification dict.

    ``{"type": "explicit", "dist": [[...]], "mass": [...]}`` or
    ``{"type": "grid", "shape": [n] | [n, m], "metric": "l1"|"l2"|"linf",
    "mass": "uniform" | [...]}``.
    """
    if not isinstance(spec, dict):
        raise InputError("space spec must be a JSON object")
    kind = spec.get("type")
    if kind == "explicit":
        if "dist" not in spec or "mass" not in spec:
            raise InputError("explicit space spec requires fields 'dist' and 'mass'")
        return QuasiMetricSpace(spec["dist"], spec["mass"])
    if kind == "grid":
        shape = spec.get("shape")
        if not isinstance(shape, (list, tuple)) or not shape:
            raise InputError("grid space spec requires a nonempty 'shape' list")
        coords = _grid_coordinates(tuple(int(s) for s in shape))
        metric = spec.get("metric", "l1")
        if metric not in _METRIC_ORDERS:
            raise InputError(f"unknown metric {metric!r}; expected l1, l2 or linf")
        diff = coords[:, None, :] - coords[None, :, :]
        dist = np.linalg.norm(diff, ord=_METRIC_ORDERS[metric], axis=2)
        mass = spec.get("mass", "uniform")
        if isinstance(mass, str):
            if mass != "uniform":
                raise InputError(f"unknown mass descriptor {mass!r}")
            mass = np.ones(coords.shape[0])
        return QuasiMetricSpace(dist, mass)
    raise InputError(f"unknown space type {kind!r}; expected 'grid' or 'explicit'")


def canonical_radii(space: QuasiMetricSpace, center: int) -> np.ndarray:
    """Radii realizing every achievable member set centered at ``center``.

    Positive distinct distances from the center (the smallest realizes the
    singleton), plus 2*max distance for the full set.  A one-point space gets
    the single radius 1.
    """
    row = space.dist[center]
    pos = np.unique(row[row > 0])
    if pos.size == 0:
        return np.array([1.0])
    return np.append(pos, 2.0 * pos[-1])


def space_profile(space: QuasiMetricSpace) -> SpaceProfile:
    """Profile kappa, the doubling constant and order, and the engulfing factor."""
    dist = space.dist
    n = space.n
    if n < 2:
        kappa = 1.0
    else:
        # ratio[x, y, z] = d(x,y) / (d(x,z) + d(z,y)); denominator vanishes
        # only when x == z == y, excluded by the x != y mask.
        denom = dist[:, None, :] + dist.T[None, :, :]  # [x, y, z]
        numer = dist[:, :, None]
        offdiag = ~np.eye(n, dtype=bool)
        with np.errstate(divide="ignore", invalid="ignore"):
            ratio = np.where(offdiag[:, :, None], numer / denom, 0.0)
        kappa = max(1.0, float(np.nanmax(ratio)))
    c_mu = 1.0
    for x in range(n):
        radii = canonical_radii(space, x)
        inner = (dist[x][None, :] < radii[:, None]) @ space.mass
        outer = (dist[x][None, :] < 2.0 * radii[:, None]) @ space.mass
        c_mu = max(c_mu, float(np.max(outer / inner)))
    return SpaceProfile(
        kappa=kappa,
        c_mu=c_mu,
        d_mu=float(np.log2(c_mu)),
        engulf=kappa * (2.0 * kappa + 1.0),
    )


def ball_mask(space: QuasiMetricSpace, ball: Ball) -> np.ndarray:
    if ball.radius <= 0:
        raise InputError(f"ball radius must be positive, got {ball.radius}")
    return space.dist[ball.center] < ball.radius


def ball_members(space: QuasiMetricSpace, ball: Ball) -> np.ndarray:
    """Sorted indices of the open ball; always contains the center."""
    return np.nonzero(ball_mask(space, ball))[0]


def enumerate_balls(space: QuasiMetricSpace) -> list[Ball]:
    """One ball per distinct achievable member set, per center.

    Member sets strictly grow along the sorted canonical radii, so no
    deduplication is needed.  Order: by center, then by radius.
    """
    balls = []
    for x in range(space.n):
        for r in canonical_radii(space, x):
            balls.append(Ball(center=x, radius=float(r)))
    return balls


class BallTable:
    """Dense view of the canonical ball family for vectorized sweeps.

    ``member[b, y]`` is the membership matrix, ``mu[b]`` the ball measures,
    ``weighted[b, y] = member * mass`` the row weights used by averages.
    """

    def __init__(self, space: QuasiMetricSpace):
        self.space = space
        self.balls = enumerate_balls(space)
        centers = np.array([b.center for b in self.balls])
        radii = np.array([b.radius for b in self.balls])
        self.centers = centers
        self.radii = radii
        self.member = space.dist[centers] < radii[:, None]
        self.weighted = self.member * space.mass[None, :]
        self.mu = self.weighted.sum(axis=1)

    @property
    def m(self) -> int:
        return len(self.balls)

    def averages(self, f: np.ndarray) -> np.ndarray:
        """Ball averages (1/mu(B)) * sum_B f dmu for all canonical balls."""
        return (self.weighted @ f) / self.mu

    def point_max(self, per_ball: np.ndarray) -> np.ndarray:
        """max over balls containing each point of a per-ball quantity."""
        masked = np.where(self.member, per_ball[:, None], -np.inf)
        return masked.max(axis=0)


def ball_table(space: QuasiMetricSpace) -> BallTable:
    if space._table is None:
        space._table = BallTable(space)
    return space._table


def dilate_ball(ball: Ball, lam: float) -> Ball:
    """Same center, radius scaled by lam >= 1."""
    if lam < 1:
        raise InputError(f"dilation factor must be >= 1, got {lam}")
    return Ball(center=ball.center, radius=ball.radius * lam)


def whole_space_ball(space: QuasiMetricSpace) -> Ball:
    """The canonical ball at center 0 whose member set is the whole space."""
    return Ball(center=0, radius=float(canonical_radii(space, 0)[-1]))


def check_engulfing(space: QuasiMetricSpace, profile: SpaceProfile) -> list[tuple[Ball, Ball]]:
    """Exhaustively verify the engulfing containment over canonical ball pairs.

    For every pair with nonempty intersection and r(B1) <= r(B2) asserts
    members(B1) subset-of members(engulf * B2).  A nonempty return value
    signals a profiling bug, not bad user input.
    """
    tbl = ball_table(space)
    inter = (tbl.member.astype(float) @ tbl.member.T.astype(float)) > 0
    violations = []
    for j in range(tbl.m):
        target = space.dist[tbl.centers[j]] < profile.engulf * tbl.radii[j]
        eligible = inter[:, j] & (tbl.radii <= tbl.radii[j])
        escaped = tbl.member[eligible] & ~target[None, :]
        if escaped.any():
            for i in np.nonzero(eligible)[0]:
                if (tbl.member[i] & ~target).any():
                    violations.append((tbl.balls[i], tbl.balls[j]))
    return violations


def check_dilation_bounds(
    space: QuasiMetricSpace,
    profile: SpaceProfile,
    lambdas,
    rel_headroom: float = 1e-12,
) -> list[dict]:
    """Verify mu(lam*B) <= (2*lam)**d_mu * mu(B) over all canonical balls.

    ``rel_headroom`` absorbs rounding in the transcendental bound; the
    inequality itself is exact given the profiled doubling constant.
    """
    tbl = ball_table(space)
    violations = []
    for lam in lambdas:
        if lam <= 1:
            continue
        dil = space.dist[tbl.centers] < (lam * tbl.radii)[:, None]
        mu_dil = dil @ space.mass
        bound = (2.0 * lam) ** profile.d_mu * tbl.mu
        bad = mu_dil > bound * (1.0 + rel_headroom)
        for i in np.nonzero(bad)[0]:
            violations.append(
                {
                    "ball": tbl.balls[i],
                    "lambda": float(lam),
                    "mu_dilated": float(mu_dil[i]),
                    "bound": float(bound[i]),
                }
            )
    return violations
