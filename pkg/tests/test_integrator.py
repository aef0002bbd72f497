import warnings

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from oracles import reference_flow
from rosslerlab.errors import TangencyWarning
from rosslerlab.geometry import Direction, EventSpec
from rosslerlab.integrator import (
    Crossing, NoEvent, Termination, Tolerance, advance_to_event, classify_boundedness,
    default_escape_radius, dopri_steps, integrate,
)
from rosslerlab.model import Params, RosslerField
from rosslerlab.synthetic import InwardRadial

P0 = Params(0.2, 0.2, 5.7)
# DOP853 at rtol=atol=1e-13 from (1, 1, 0) to t = 10
REF_T10 = np.array([-0.6542639363153954, -3.286521675188513, -0.03205594678352581])


def test_matches_frozen_reference():
    tr = integrate(P0, [1.0, 1.0, 0.0], (0.0, 10.0), Tolerance(1e-12, 1e-12))
    assert tr.termination is Termination.TIME_BUDGET
    assert np.linalg.norm(tr.final - REF_T10) < 1e-9


def test_reference_is_reproducible():
    assert np.linalg.norm(reference_flow(0.2, 0.2, 5.7, [1, 1, 0], 10.0) - REF_T10) < 1e-11


def test_tolerance_convergence():
    errs = [np.linalg.norm(integrate(P0, [1, 1, 0], (0, 10), Tolerance(t, t)).final - REF_T10)
            for t in (1e-6, 1e-8, 1e-10)]
    assert errs[0] > errs[1] > errs[2]
    assert errs[2] < 1e-7


def test_fixed_point_is_stationary():
    tr = integrate(P0, [0, 0, 0], (0, 50))
    assert np.all(tr.states == 0.0)


def test_long_run_is_finite():
    tr = integrate(P0, [1, 1, 0], (0, 100), Tolerance(1e-10, 1e-10))
    assert tr.termination is Termination.TIME_BUDGET and np.all(np.isfinite(tr.states))
    assert tr.t[-1] == 100.0


def test_dense_output_matches_steps():
    tr = integrate(P0, [1, 1, 0], (0, 5), Tolerance(1e-11, 1e-11))
    for t in (0.37, 1.9, 4.4):
        exact = integrate(P0, [1, 1, 0], (0, t), Tolerance(1e-12, 1e-12)).final
        assert np.linalg.norm(tr.dense(t) - exact) < 1e-8
    with pytest.raises(ValueError):
        tr.dense(6.0)


def test_generic_and_scalar_paths_agree():
    f = RosslerField(P0)
    fast = list(dopri_steps(f, np.array([1.0, 1.0, 0.0]), 0.0, 3.0, Tolerance(1e-9, 1e-9)))
    slow = list(dopri_steps(lambda s: f(s), np.array([1.0, 1.0, 0.0]), 0.0, 3.0, Tolerance(1e-9, 1e-9)))
    assert len(fast) == len(slow)
    assert np.allclose(fast[-1].y1, slow[-1].y1, rtol=1e-12, atol=1e-12)


def test_escape_radius_default():
    assert default_escape_radius(P0) == pytest.approx(1e3 * np.linalg.norm([5.66, -28.3, 28.3]))
    tr = integrate(P0, [1, 1, 0], (0, 100), r_esc=5.0)
    assert tr.termination is Termination.ESCAPED


def test_targets_stop_integration():
    tr = integrate(InwardRadial(), [1.0, 0, 0], (0, 100), targets=[np.zeros(3)])
    assert tr.termination is Termination.FIXED_POINT and tr.t[-1] < 100


@settings(max_examples=25, deadline=None)
@given(st.tuples(*(st.floats(-20, 20) for _ in range(3))))
def test_forward_backward_in_box(x0):
    # backward error grows like exp(|x - c| T) in z; keep T short on the box
    x0 = np.array(x0)
    T = 0.2
    fwd = integrate(P0, x0, (0, T), Tolerance(1e-10, 1e-10)).final
    back = integrate(P0, fwd, (T, 0), Tolerance(1e-10, 1e-10)).final
    assert np.linalg.norm(back - x0) < 1e-6


def test_event_on_section():
    f = RosslerField(P0)
    r = advance_to_event(P0, [1, 1, 0], f.section, 50.0)
    assert isinstance(r, Crossing)
    assert abs(r.point[0] + P0.a * r.point[1]) < 1e-10
    assert r.side == "U" and r.flux < 0
    # crossing flux matches the closed form x/a - z on Y
    assert r.flux == pytest.approx(r.point[0] / P0.a - r.point[2])


def test_event_time_converges():
    f = RosslerField(P0)
    t1 = advance_to_event(P0, [1, 1, 0], f.section, 50.0, Tolerance(1e-8, 1e-8)).time
    t2 = advance_to_event(P0, [1, 1, 0], f.section, 50.0, Tolerance(1e-9, 1e-9)).time
    assert abs(t1 - t2) < 10 * 1e-8


def test_no_event_from_fixed_point():
    f = RosslerField(P0)
    r = advance_to_event(P0, [0, 0, 0], f.section, 20.0)
    assert isinstance(r, NoEvent) and r.termination is Termination.TIME_BUDGET


def test_backward_event():
    f = RosslerField(P0)
    fwd = advance_to_event(P0, [1, 1, 0], f.section, 50.0)
    back = advance_to_event(P0, integrate(P0, fwd.point, (fwd.time, fwd.time + 0.3)).final,
                            f.section, -5.0, t0=fwd.time + 0.3)
    assert isinstance(back, Crossing)
    assert back.time == pytest.approx(fwd.time, abs=1e-8)


def test_direction_filter():
    ev_up = EventSpec(normal=np.array([0.0, 0.0, 1.0]), offset=-0.5, direction=Direction.UP)
    ev_down = EventSpec(normal=np.array([0.0, 0.0, 1.0]), offset=-0.5, direction=Direction.DOWN)
    # radial inflow from z = 2 only crosses z = 0.5 downward
    assert isinstance(advance_to_event(InwardRadial(), [0, 0, 2.0], ev_down, 10.0), Crossing)
    assert isinstance(advance_to_event(InwardRadial(), [0, 0, 2.0], ev_up, 10.0), NoEvent)


def test_tangency_warning():
    ev = EventSpec(normal=np.array([0.0, 0.0, 1.0]), offset=0.0, direction=Direction.BOTH)
    f = InwardRadial()
    from rosslerlab.integrator import make_crossing
    with warnings.catch_warnings(record=True) as w:
        warnings.simplefilter("always")
        c = make_crossing(f, ev, 0.0, np.array([1.0, 0.0, 0.0]))
    assert c.tangent and any(issubclass(x.category, TangencyWarning) for x in w)


def test_boundedness():
    assert classify_boundedness(P0, [1, 1, 0], 1000.0, r_esc=1e3).bounded
    assert classify_boundedness(P0, [0, 0, 0], 100.0).bounded
    # deep in the repelling region the backward orbit runs off
    v = classify_boundedness(P0, [-5.0, 10.0, -5.0], -50.0)
    assert not v.bounded and v.kind == "Escaped"
    with pytest.raises(ValueError):
        classify_boundedness(P0, [0, 0, 0], 0.0)


def test_tolerance_validation():
    with pytest.raises(ValueError):
        Tolerance(0.0, 1e-9)
