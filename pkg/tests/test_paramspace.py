"""Region membership, the scalar boundary function and renormalisation.

Frozen reference values come from a numpy.roots oracle evaluated separately.
"""
import math

import numpy as np
import pytest

from bcnflab.core import Params
from bcnflab.errors import OutsidePhiError
from bcnflab.paramspace import (
    chaos_indices,
    classify_region,
    find_region_point,
    in_phi,
    phi,
    phi_violations,
    region_code,
    renormalise,
    sample_phi,
    sample_phi_byg,
    slice_quantities,
)

XI_A = Params(1.5, 0.2, -2.0, 0.5)

PHI_A = 0.42958405421207724
PHI_G_A = -13.067514421272204
J1_A = 1.2880055107601351
J2_A = 0.5026118950756038
SUM_STABLE_A = 0.4408134898738377
LAM_STAR = 2.08062484748657
TAU_L_CORNER = 2.176749816983884
M_CRIT_A = 3.7705854318360243


class TestMembership:
    def test_reference_point_inside(self):
        assert in_phi(XI_A)
        assert phi_violations(XI_A) == []

    def test_boundaries_are_strict(self):
        assert not in_phi(Params(1.2, 0.2, -2.0, 0.5))  # tau_L = delta_L + 1
        assert not in_phi(Params(1.5, 0.2, -1.5, 0.5))  # tau_R = -(delta_R + 1)
        assert not in_phi(Params(1.5, 0.0, -2.0, 0.5))  # delta_L = 0
        assert not in_phi(Params(1.5, 0.2, -2.0, 0.0))  # delta_R = 0

    def test_violations_name_the_inequality(self):
        broken = phi_violations(Params(1.0, 0.2, -1.0, 0.5))
        assert len(broken) == 2
        assert any("tau_L" in s for s in broken)
        assert any("tau_R" in s for s in broken)


class TestPhiAndRenormalisation:
    def test_phi_frozen_value(self):
        assert phi(XI_A) == pytest.approx(PHI_A, abs=1e-15)

    def test_renormalised_point_exact(self):
        g = renormalise(XI_A)
        assert g.astuple() == (3.0, 0.25, -3.7, 0.1)

    def test_phi_after_renormalisation(self):
        assert phi(renormalise(XI_A)) == pytest.approx(PHI_G_A, abs=1e-12)
        assert phi(renormalise(XI_A)) < 0.0

    def test_corner_point_is_fixed_exactly(self):
        corner = Params(1.0, 0.0, -1.0, 0.0)
        assert renormalise(corner).astuple() == corner.astuple()


class TestClassification:
    def test_reference_point_is_first_window(self):
        rc = classify_region(XI_A)
        assert rc.in_Phi and rc.in_Phi_BYG
        assert rc.rn_index == 0
        assert region_code(rc) == "R0"
        assert rc.phi_values[0] == pytest.approx(PHI_A, abs=1e-15)
        assert rc.phi_values[1] < 0.0

    def test_outside_point(self):
        rc = classify_region(Params(1.1, 0.2, -2.0, 0.5))
        assert not rc.in_Phi
        assert rc.rn_index is None
        assert rc.phi_values == ()
        assert region_code(rc) == "outside"

    def test_deeper_window_found_on_reference_slice(self):
        p = find_region_point(0.2, 0.5, 1)
        assert p is not None
        rc = classify_region(p)
        assert rc.rn_index == 1
        assert region_code(rc) == "R1"
        # the window definition: phi > 0 along the orbit until the index,
        # then non-positive
        assert rc.phi_values[0] > 0.0
        assert rc.phi_values[1] > 0.0
        assert rc.phi_values[2] <= 0.0

    def test_overflowing_orbit_is_truncated_not_fatal(self):
        big = Params(60.0, 0.5, -60.0, 0.5)
        rc = classify_region(big)
        assert rc.in_Phi
        assert rc.phi_values[-1] == -math.inf or len(rc.phi_values) == 14

    def test_n_max_validation(self):
        with pytest.raises(ValueError):
            classify_region(XI_A, n_max=-1)


class TestChaosIndices:
    def test_frozen_values(self):
        idx = chaos_indices(XI_A)
        assert idx.J1 == pytest.approx(J1_A, abs=1e-14)
        assert idx.J2 == pytest.approx(J2_A, abs=1e-14)
        assert idx.sum_stable == pytest.approx(SUM_STABLE_A, abs=1e-14)
        assert idx.thm1_applies
        assert idx.thm2_applies

    def test_outside_region_raises(self):
        with pytest.raises(OutsidePhiError):
            chaos_indices(Params(1.1, 0.2, -2.0, 0.5))


class TestSliceQuantities:
    def test_frozen_values(self):
        q = slice_quantities(0.2, 0.5, 1.5)
        assert q.lambda_star == pytest.approx(LAM_STAR, abs=1e-12)
        assert q.tau_L_corner == pytest.approx(TAU_L_CORNER, abs=1e-12)
        assert q.m_crit == pytest.approx(M_CRIT_A, abs=1e-12)

    def test_lambda_star_solves_its_quadratic(self):
        q = slice_quantities(0.2, 0.5, 1.5)
        lam = q.lambda_star
        assert -0.5 * lam * lam + 0.8 * lam + 0.5 == pytest.approx(0.0, abs=1e-12)

    def test_positive_deltas_required(self):
        with pytest.raises(ValueError):
            slice_quantities(0.0, 0.5, 1.5)


class TestSamplers:
    def test_sample_phi_membership(self):
        rng = np.random.default_rng(0)
        for _ in range(300):
            assert in_phi(sample_phi(rng))

    def test_sample_phi_byg_membership(self):
        rng = np.random.default_rng(1)
        for _ in range(200):
            p = sample_phi_byg(rng)
            assert in_phi(p)
            assert phi(p) > 0.0
