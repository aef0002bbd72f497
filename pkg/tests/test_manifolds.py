import numpy as np
import pytest
from hypothesis import given, strategies as st

from rosslerlab.errors import DegenerateTriangle, EmptyTrace, NotSaddleFocus
from rosslerlab.integrator import Termination
from rosslerlab.manifolds import (
    Branch, CriterionConfig, TrefoilConfig, attractor_criterion, barycentric_samples,
    certify_trapping, grow_stable_surface, hausdorff, icosphere, kneading_from_crossings,
    plane_patch, r2_flux, r2_threshold, repeller_membership, saddle_focus_frame, sb_flux,
    trace_separatrix, trefoil_defect, triangle_normals,
)
from rosslerlab.model import FixedPoint, Params, RosslerField
from rosslerlab.section import Partition
from rosslerlab.synthetic import InwardRadial, ParaboloidSaddle, PlantedHeteroclinic, radial_outflow

P0 = Params(0.2, 0.2, 5.7)


def test_saddle_focus_frame_is_invariant():
    fld = RosslerField(P0)
    for which in FixedPoint:
        loc, sp, v, basis = saddle_focus_frame(fld, which)
        J = fld.jacobian(loc)
        assert np.allclose(J @ v, sp.gamma * v, atol=1e-9)
        # the focus plane is J-invariant: J e_i has no component along the normal
        nrm = np.cross(*basis)
        for e in basis:
            assert abs((J @ e) @ nrm) < 1e-9 * np.linalg.norm(J @ e)
        assert basis[0] @ basis[1] == pytest.approx(0.0, abs=1e-12)


def test_not_saddle_focus():
    with pytest.raises(NotSaddleFocus):
        saddle_focus_frame(InwardRadial(), FixedPoint.IN)


def test_branch_labels():
    assert Branch("DeltaOut").fixed_point is FixedPoint.OUT and Branch.DELTA_IN.is_delta
    assert not Branch.GAMMA_OUT.is_delta


def test_rossler_separatrices():
    d = trace_separatrix(P0, Branch.DELTA_OUT, t_max=150.0, max_crossings=20)
    g = trace_separatrix(P0, Branch.GAMMA_OUT, t_max=150.0, max_crossings=20)
    assert d.sign == -g.sign
    # the departure from eps = 1e-6 is slow, then the branch winds round P_In
    assert len(d.crossings) >= 5 and all(abs(c.point[0] + 0.2 * c.point[1]) < 1e-10 for c in d.crossings)
    assert g.escaped


def test_planted_heteroclinic_separatrix():
    fld = PlantedHeteroclinic()
    d = trace_separatrix(fld, Branch.DELTA_OUT, t_max=60.0)
    assert d.termination is Termination.FIXED_POINT
    assert np.linalg.norm(d.crossings[0].point - [0.5, 0.0, 0.0]) < 1e-9


def test_kneading_from_crossings():
    part = Partition(0.0, 1)
    assert kneading_from_crossings([0.5, -0.5], part, 2).word == (1, 2)
    padded = kneading_from_crossings([-0.5], part, 4, converged_to_in=True)
    assert padded.word == (2, 1, 1, 1) and padded.truncated is None
    short = kneading_from_crossings([-0.5], part, 3)
    assert short.word == (2,) and short.truncated == "trace ended"
    with pytest.raises(EmptyTrace):
        kneading_from_crossings([], part, 3)
    assert kneading_from_crossings([], part, 0).word == ()


def test_paraboloid_front_hits_known_circle():
    fld = ParaboloidSaddle()
    g = grow_stable_surface(fld)
    hits = np.array([h.point for h in g.hits])
    r = np.hypot(hits[:, 0], hits[:, 1])
    assert np.allclose(hits[:, 2], -fld.b, atol=1e-9)
    assert np.allclose(r, fld.delta_radius(), rtol=1e-4)


def test_criterion_verdicts():
    v = attractor_criterion(ParaboloidSaddle())
    assert v.status == "SatisfiedBounded" and v.gap_max < v.gap_tol
    assert len(v.delta_polyline) == v.n_points
    e = attractor_criterion(radial_outflow(), CriterionConfig(R_max=20.0))
    assert e.status == "EscapedFront"


def test_criterion_budget_exhaustion_is_inconclusive():
    v = attractor_criterion(radial_outflow(), CriterionConfig(R_max=50.0, max_points=64))
    assert v.status == "Inconclusive"


def test_sb_flux_closed_form():
    assert sb_flux(P0) == pytest.approx(0.2 * 5.7)


def test_repeller_r2_example():
    # at x = -10 the R2 threshold is -12/15.9; z = -5 lies below it and the flux is positive
    assert r2_threshold(P0, -10.0) == pytest.approx(-12.0 / 15.9)
    assert r2_flux(P0, -10.0, -5.0) == pytest.approx(67.5)


def test_repeller_membership():
    inside = repeller_membership(P0, [-5.0, 10.0, -15.0])
    assert inside.in_region
    assert not repeller_membership(P0, [1.0, 1.0, 0.0]).in_region
    for q, n in zip(inside.face_points, ([1, 0.2, 0], [0, 1, 1], [0, 1, 0])):
        assert q @ np.array(n, float) == pytest.approx(1.2 if n == [0, 1, 0] else 0.0, abs=1e-12)


@given(st.floats(-20, 5.8), st.floats(-20, 20))
def test_r2_sign_rule(x, z):
    thr = r2_threshold(P0, x)
    if abs(z - thr) < 1e-9:
        return
    assert (r2_flux(P0, x, z) > 0) == (z < thr)


def test_trapping_certificates():
    sphere = icosphere(radius=2.0)
    assert certify_trapping(InwardRadial(), sphere).certified
    flipped = sphere[:, ::-1, :]
    assert not certify_trapping(InwardRadial(), flipped).certified
    # the plane z = -b is crossed upward at rate bc everywhere
    r = certify_trapping(P0, plane_patch(-0.2, half=5.0, normal_down=True))
    assert r.certified and r.max_flux == pytest.approx(-sb_flux(P0))
    assert certify_trapping(InwardRadial(), sphere, margin=10.0).certified is False


def test_triangle_checks():
    with pytest.raises(DegenerateTriangle):
        triangle_normals([[[0, 0, 0], [1, 0, 0], [2, 0, 0]]])
    n = triangle_normals(plane_patch(0.0, normal_down=False))
    assert np.allclose(n, [0, 0, 1])
    W = barycentric_samples(10)
    assert np.allclose(W.sum(axis=1), 1.0) and np.all(W >= 0)


def test_icosphere_outward():
    sph = icosphere(center=(1, 2, 3), radius=0.5, subdivisions=1)
    cent = sph.mean(axis=1) - np.array([1, 2, 3])
    assert np.all(np.einsum("ij,ij->i", triangle_normals(sph), cent) > 0)


def test_hausdorff():
    A = np.array([[0, 0, 0], [1, 0, 0]], float)
    B = np.array([[0, 0, 0], [1, 0.5, 0]], float)
    assert hausdorff(A, B) == pytest.approx(0.5)
    assert hausdorff(A, np.zeros((0, 3))) == np.inf


def test_trefoil_defect_planted():
    d = trefoil_defect(PlantedHeteroclinic(), TrefoilConfig(t_max=60.0, compute_coincide=False))
    assert d.d_hetero < 1e-6 and d.transverse_P0
