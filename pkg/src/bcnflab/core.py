"""Piecewise-linear normal form map and its pointwise primitives.

The map acts on the plane and is affine on each closed half-plane bounded by
the switching line x = 0:

    (x, y) -> (tau*x + y + 1, -delta*x)

with (tau, delta) = (tau_L, delta_L) for x < 0 and (tau_R, delta_R) for
x >= 0.  Both pieces agree on the switching line, so the map is continuous.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Literal, NamedTuple

import numpy as np

from .errors import ComplexEigenvaluesError, DegenerateParameterError

__all__ = [
    "SIGMA_TOL",
    "Side",
    "Point",
    "Params",
    "EigenData",
    "FixedPoints",
    "Orbit",
    "apply",
    "apply_inverse",
    "apply_many",
    "apply_inverse_many",
    "jacobian",
    "eigen",
    "eigen_pair",
    "fixed_points",
    "orbit",
]

# Points with |x| at or below this are reported as sitting on the switching
# line in itineraries.  The map itself never uses it: apply() takes the right
# piece for x >= 0 exactly.
SIGMA_TOL = 1e-12

Side = Literal["L", "R"]


class Point(NamedTuple):
    x: float
    y: float


@dataclass(frozen=True)
class Params:
    """One parameter point (tau_L, delta_L, tau_R, delta_R)."""

    tau_L: float
    delta_L: float
    tau_R: float
    delta_R: float

    def __post_init__(self) -> None:
        for name in ("tau_L", "delta_L", "tau_R", "delta_R"):
            v = getattr(self, name)
            if not math.isfinite(v):
                raise ValueError(f"{name} must be finite, got {v!r}")

    def astuple(self) -> tuple[float, float, float, float]:
        return (self.tau_L, self.delta_L, self.tau_R, self.delta_R)

    def side(self, which: Side) -> tuple[float, float]:
        """Trace and determinant of the requested half-map."""
        if which == "L":
            return (self.tau_L, self.delta_L)
        if which == "R":
            return (self.tau_R, self.delta_R)
        raise ValueError(f"side must be 'L' or 'R', got {which!r}")


@dataclass(frozen=True)
class EigenData:
    """Eigenvalues of one half-map Jacobian, labelled by magnitude.

    ``slope_u`` and ``slope_s`` are the dy/dx slopes of the corresponding
    eigendirections of the companion matrix [[tau, 1], [-delta, 0]]; the
    direction for eigenvalue lam is spanned by (1, lam - tau).
    """

    lambda_u: float
    lambda_s: float
    slope_u: float
    slope_s: float


@dataclass(frozen=True)
class FixedPoints:
    X: Point  # admissible fixed point of the right piece
    Y: Point  # admissible fixed point of the left piece


@dataclass(frozen=True)
class Orbit:
    points: np.ndarray  # shape (k, 2), starts at the seed
    itinerary: str  # one letter from {L, R, Σ} per step taken
    diverged: bool


def apply(params: Params, p: tuple[float, float]) -> Point:
    """One forward step.  The right piece is used for x >= 0."""
    x, y = p
    if x >= 0.0:
        tau, delta = params.tau_R, params.delta_R
    else:
        tau, delta = params.tau_L, params.delta_L
    return Point(tau * x + y + 1.0, -delta * x)


def apply_inverse(params: Params, p: tuple[float, float]) -> Point:
    """One backward step.

    The pre-image half-plane is forced by the sign of y: the forward step
    sends x to -delta*x with delta > 0, so y > 0 can only come from the left
    piece and y < 0 from the right piece.  y = 0 pulls back onto x = 0.
    """
    x, y = p
    if y > 0.0:
        tau, delta = params.tau_L, params.delta_L
    else:
        tau, delta = params.tau_R, params.delta_R
    if delta == 0.0:
        raise DegenerateParameterError("inverse undefined for delta = 0")
    xp = -y / delta
    return Point(xp, x - tau * xp - 1.0)


def apply_many(params: Params, pts: np.ndarray) -> np.ndarray:
    """Vectorised :func:`apply` on an (n, 2) array."""
    pts = np.asarray(pts, dtype=float)
    right = pts[:, 0] >= 0.0
    tau = np.where(right, params.tau_R, params.tau_L)
    delta = np.where(right, params.delta_R, params.delta_L)
    out = np.empty_like(pts)
    out[:, 0] = tau * pts[:, 0] + pts[:, 1] + 1.0
    out[:, 1] = -delta * pts[:, 0]
    return out


def apply_inverse_many(params: Params, pts: np.ndarray) -> np.ndarray:
    """Vectorised :func:`apply_inverse` on an (n, 2) array."""
    if params.delta_L == 0.0 or params.delta_R == 0.0:
        raise DegenerateParameterError("inverse undefined for delta = 0")
    pts = np.asarray(pts, dtype=float)
    left = pts[:, 1] > 0.0
    tau = np.where(left, params.tau_L, params.tau_R)
    delta = np.where(left, params.delta_L, params.delta_R)
    out = np.empty_like(pts)
    out[:, 0] = -pts[:, 1] / delta
    out[:, 1] = pts[:, 0] - tau * out[:, 0] - 1.0
    return out


def jacobian(params: Params, side: Side) -> np.ndarray:
    tau, delta = params.side(side)
    return np.array([[tau, 1.0], [-delta, 0.0]])


def eigen_pair(tau: float, delta: float) -> EigenData:
    """Eigen-structure of [[tau, 1], [-delta, 0]] for a raw (tau, delta) pair.

    Uses the stable quadratic formula: the larger-magnitude root is computed
    first and the other recovered as delta over it, which avoids cancellation
    when the roots are far apart.
    """
    disc = tau * tau - 4.0 * delta
    if disc <= 0.0:
        raise ComplexEigenvaluesError(
            f"discriminant {disc!r} <= 0 for (tau, delta) = ({tau!r}, {delta!r})"
        )
    root = math.sqrt(disc)
    big = 0.5 * (tau + root) if tau >= 0.0 else 0.5 * (tau - root)
    small = delta / big
    # slope of the eigendirection for lam is lam - tau = -lam_other
    return EigenData(lambda_u=big, lambda_s=small, slope_u=-small, slope_s=-big)


def eigen(params: Params, side: Side) -> EigenData:
    tau, delta = params.side(side)
    return eigen_pair(tau, delta)


def fixed_points(params: Params) -> FixedPoints:
    """Closed-form fixed points of the two pieces.

    X is the fixed point of the right piece and sits in x >= 0 whenever the
    right piece is admissible; Y belongs to the left piece and sits in x < 0.
    """
    den_R = params.delta_R + 1.0 - params.tau_R
    den_L = params.tau_L - params.delta_L - 1.0
    if den_R == 0.0:
        raise DegenerateParameterError("right fixed point undefined: delta_R + 1 - tau_R = 0")
    if den_L == 0.0:
        raise DegenerateParameterError("left fixed point undefined: tau_L - delta_L - 1 = 0")
    X = Point(1.0 / den_R, -params.delta_R / den_R)
    Y = Point(-1.0 / den_L, params.delta_L / den_L)
    return FixedPoints(X=X, Y=Y)


def _letter(x: float) -> str:
    if abs(x) <= SIGMA_TOL:
        return "Σ"
    return "R" if x > 0.0 else "L"


def orbit(
    params: Params,
    p: tuple[float, float],
    n: int,
    escape_radius: float = 1e9,
) -> Orbit:
    """Forward orbit of length up to n steps with per-step itinerary.

    The itinerary letter for step i is the half-plane of the point being
    mapped (Σ when |x| <= SIGMA_TOL).  Iteration stops early, with the
    diverged flag set, once the orbit norm exceeds ``escape_radius``.
    """
    if n < 0:
        raise ValueError(f"n must be >= 0, got {n}")
    tl, dl, tr, dr = params.astuple()
    x, y = float(p[0]), float(p[1])
    pts = np.empty((n + 1, 2))
    pts[0] = (x, y)
    letters: list[str] = []
    diverged = False
    k = 0
    r2 = escape_radius * escape_radius
    for k in range(1, n + 1):
        if x * x + y * y > r2:
            diverged = True
            k -= 1
            break
        letters.append(_letter(x))
        if x >= 0.0:
            x, y = tr * x + y + 1.0, -dr * x
        else:
            x, y = tl * x + y + 1.0, -dl * x
        pts[k] = (x, y)
    if x * x + y * y > r2:
        diverged = True
    return Orbit(points=pts[: k + 1].copy(), itinerary="".join(letters), diverged=diverged)
