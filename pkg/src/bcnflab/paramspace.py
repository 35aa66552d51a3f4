"""Parameter-region calculus: saddle region, renormalisation, chaos indices.

The saddle region requires, with strict inequalities,

    tau_L > delta_L + 1,   delta_L > 0,   tau_R < -(delta_R + 1),   delta_R > 0,

which makes both fixed points admissible saddles.  Within it the scalar
``phi`` separates the parameter set on which the trapping-region and
expanding-cone arguments work (phi > 0) from the rest, and the quadratic
renormalisation operator relates consecutive attractor-doubling windows.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

from .core import Params, eigen_pair
from .errors import OutsidePhiError

__all__ = [
    "TAU_R_FLOOR",
    "DEFAULT_N_MAX",
    "RegionClass",
    "TheoremFlags",
    "SliceQuantities",
    "in_phi",
    "phi",
    "renormalise",
    "classify_region",
    "region_code",
    "chaos_indices",
    "slice_quantities",
    "sample_phi",
    "sample_phi_byg",
    "find_region_point",
]

# Lower edge of the tau_R window used by samplers, sweeps and root brackets.
TAU_R_FLOOR = -5.0

# Renormalisation squares the traces, so double precision runs out after a
# dozen steps; deeper windows are far below resolvable size anyway.
DEFAULT_N_MAX = 12


@dataclass(frozen=True)
class RegionClass:
    in_Phi: bool
    in_Phi_BYG: bool
    rn_index: int | None
    # phi along the renormalisation orbit, phi_values[n] = phi(g^n(xi)).
    # A trailing -inf marks the point where plain doubles overflowed.
    phi_values: tuple[float, ...]


@dataclass(frozen=True)
class TheoremFlags:
    J1: float
    J2: float
    sum_stable: float
    thm1_applies: bool
    thm2_applies: bool


@dataclass(frozen=True)
class SliceQuantities:
    lambda_star: float  # largest root of -dR*l^2 + (1 - dL)*l + dR = 0
    tau_L_corner: float  # lambda_star + delta_L / lambda_star
    m_crit: float  # lambda_L^s + 2*tau_L / (lambda_L^u^2 - 1)


def in_phi(params: Params) -> bool:
    """Strict membership test for the saddle parameter region."""
    return not phi_violations(params)


def phi_violations(params: Params) -> list[str]:
    """The saddle-region inequalities this point breaks, as readable strings.

    Empty exactly when the point lies in the region; error messages use the
    list to say which condition failed instead of a bare rejection.
    """
    out = []
    if not params.delta_L > 0.0:
        out.append(f"delta_L > 0 (delta_L = {params.delta_L:g})")
    if not params.delta_R > 0.0:
        out.append(f"delta_R > 0 (delta_R = {params.delta_R:g})")
    if not params.tau_L > params.delta_L + 1.0:
        out.append(f"tau_L > delta_L + 1 (tau_L = {params.tau_L:g})")
    if not params.tau_R < -(params.delta_R + 1.0):
        out.append(f"tau_R < -(delta_R + 1) (tau_R = {params.tau_R:g})")
    return out


def phi(params: Params) -> float:
    """Scalar whose positivity delimits the robust-chaos parameter set."""
    tl, dl, tr, dr = params.astuple()
    lu = eigen_pair(tl, dl).lambda_u
    return dr - (tr + dl + dr - (1.0 + tr) * lu) * lu


def renormalise(params: Params) -> Params:
    """One application of the quadratic renormalisation operator."""
    tl, dl, tr, dr = params.astuple()
    return Params(
        tau_L=tr * tr - 2.0 * dr,
        delta_L=dr * dr,
        tau_R=tl * tr - dl - dr,
        delta_R=dl * dr,
    )


def _phi_chain(params: Params, length: int) -> list[float]:
    """phi(g^n) for n = 0..length-1, truncated with -inf once doubles give out.

    Along renormalisation orbits the traces square each generation, so the
    eventual overflow happens while phi is already hugely negative; reporting
    -inf keeps the exact comparisons below meaningful.
    """
    values: list[float] = []
    current = params
    for _ in range(length):
        try:
            v = phi(current)
        except (OverflowError, ValueError):
            v = -math.inf
        if math.isnan(v):
            v = -math.inf
        values.append(v)
        if v == -math.inf:
            break
        try:
            current = renormalise(current)
        except (OverflowError, ValueError):
            break
        if not all(map(math.isfinite, current.astuple())):
            break
    return values


def classify_region(params: Params, n_max: int = DEFAULT_N_MAX) -> RegionClass:
    """Locate a parameter point among the attractor-doubling windows.

    The n-th window asks for phi(g^n) > 0 and phi(g^(n+1)) <= 0, compared
    exactly; the search stops at ``n_max``.  Points outside the saddle region
    short-circuit with empty phi values.
    """
    if n_max < 0:
        raise ValueError(f"n_max must be >= 0, got {n_max}")
    if not in_phi(params):
        return RegionClass(in_Phi=False, in_Phi_BYG=False, rn_index=None, phi_values=())
    values = _phi_chain(params, n_max + 2)
    rn = None
    for n in range(min(n_max + 1, len(values) - 1)):
        if values[n] > 0.0 and values[n + 1] <= 0.0:
            rn = n
            break
    return RegionClass(
        in_Phi=True,
        in_Phi_BYG=values[0] > 0.0,
        rn_index=rn,
        phi_values=tuple(values),
    )


def region_code(rc: RegionClass) -> str:
    """Compact label used in sweep output rows."""
    if not rc.in_Phi:
        return "outside"
    if rc.rn_index is not None:
        return f"R{rc.rn_index}"
    return "unresolved"


def chaos_indices(params: Params) -> TheoremFlags:
    """Sufficient-condition indices for one- and two-sided expansion.

    J1 > 1 certifies expansion of the forward cone field, J2 < 1 the
    contraction budget of the inverse one; either combines with phi > 0 into
    a robust-chaos certificate, and J2 < 1 additionally gives density of the
    unstable manifold in the attractor.
    """
    if not in_phi(params):
        raise OutsidePhiError(f"chaos indices need the saddle region, got {params}")
    eL = eigen_pair(params.tau_L, params.delta_L)
    eR = eigen_pair(params.tau_R, params.delta_R)
    lLu, lLs = eL.lambda_u, eL.lambda_s
    aRu, aRs = abs(eR.lambda_u), abs(eR.lambda_s)
    J1 = lLu * aRu * aRu / (lLu + aRu)
    J2 = max(lLs, math.sqrt(2.0) * lLs / (lLs + 1.0)) + max(
        aRs, math.sqrt(2.0) * aRs / (aRs + 1.0)
    )
    sum_stable = lLs + aRs
    byg = phi(params) > 0.0
    return TheoremFlags(
        J1=J1,
        J2=J2,
        sum_stable=sum_stable,
        thm1_applies=byg and J1 > 1.0 and sum_stable < 1.0,
        thm2_applies=byg and J1 > 1.0 and J2 < 1.0,
    )


def slice_quantities(delta_L: float, delta_R: float, tau_L: float) -> SliceQuantities:
    """Slice landmarks for a (tau_L, tau_R) plane at fixed deltas.

    ``tau_L_corner`` is where the phi = 0 boundary meets tau_R = -(delta_R+1);
    ``m_crit`` is the largest slope whose image under the left cone map stays
    to the right of the contracting eigendirection, evaluated at ``tau_L``.
    """
    if delta_L <= 0.0 or delta_R <= 0.0:
        raise ValueError("slice quantities need positive deltas")
    # roots of -dR l^2 + (1-dL) l + dR: product is -1, so pair the stable
    # quadratic formula with a reciprocal instead of subtracting like terms
    b = 1.0 - delta_L
    disc = b * b + 4.0 * delta_R * delta_R
    q = 0.5 * (b + math.copysign(math.sqrt(disc), b)) if b != 0.0 else math.sqrt(disc) * 0.5
    r1 = q / delta_R
    r2 = -1.0 / r1
    lam_star = max(r1, r2)
    eL = eigen_pair(tau_L, delta_L)
    m_crit = eL.lambda_s + 2.0 * tau_L / (eL.lambda_u * eL.lambda_u - 1.0)
    return SliceQuantities(
        lambda_star=lam_star,
        tau_L_corner=lam_star + delta_L / lam_star,
        m_crit=m_crit,
    )


def sample_phi(rng, tau_L_span: float = 2.5) -> Params:
    """Draw one parameter point from the saddle region.

    deltas are uniform on (0, 1), tau_L uniform above its lower bound with
    the given span, tau_R uniform on (TAU_R_FLOOR, -(delta_R + 1)).
    """
    dl = rng.uniform(0.0, 1.0)
    dr = rng.uniform(0.0, 1.0)
    tl = rng.uniform(dl + 1.0, dl + 1.0 + tau_L_span)
    tr = rng.uniform(TAU_R_FLOOR, -(dr + 1.0))
    return Params(tl, dl, tr, dr)


def sample_phi_byg(rng, max_tries: int = 1000) -> Params:
    """Rejection-sample a point with phi > 0.

    tau_L is confined below the slice corner value, where the phi = 0
    boundary leaves the admissible window, and candidates with phi <= 0 are
    rejected.
    """
    for _ in range(max_tries):
        dl = rng.uniform(0.0, 1.0)
        dr = rng.uniform(0.0, 1.0)
        corner = slice_quantities(dl, dr, dl + 2.0).tau_L_corner
        tl = rng.uniform(dl + 1.0, corner)
        tr = rng.uniform(TAU_R_FLOOR, -(dr + 1.0))
        p = Params(tl, dl, tr, dr)
        if phi(p) > 0.0:
            return p
    raise RuntimeError(f"no phi > 0 sample found in {max_tries} tries")


def find_region_point(
    delta_L: float,
    delta_R: float,
    rn_index: int,
    *,
    grid: int = 101,
    tau_L_max: float | None = None,
    require_byg: bool = False,
    n_max: int = DEFAULT_N_MAX,
) -> Params | None:
    """Deterministically pick an interior point of one doubling window.

    Rasters the slice, collects cells whose classification matches
    ``rn_index`` (optionally also phi > 0), and returns the cell with the
    median raster index so the choice sits away from the window's edges.
    Returns None when the window does not meet the scanned slice.
    """
    if tau_L_max is None:
        tau_L_max = slice_quantities(delta_L, delta_R, delta_L + 2.0).tau_L_corner + 0.2
    tau_L_lo = delta_L + 1.0
    tau_R_hi = -(delta_R + 1.0)
    hits: list[Params] = []
    for i in range(1, grid + 1):
        tl = tau_L_lo + (tau_L_max - tau_L_lo) * i / (grid + 1)
        for j in range(1, grid + 1):
            tr = TAU_R_FLOOR + (tau_R_hi - TAU_R_FLOOR) * j / (grid + 1)
            p = Params(tl, delta_L, tr, delta_R)
            rc = classify_region(p, n_max=n_max)
            if rc.rn_index == rn_index and (rc.in_Phi_BYG or not require_byg):
                hits.append(p)
    if not hits:
        return None
    return hits[len(hits) // 2]
