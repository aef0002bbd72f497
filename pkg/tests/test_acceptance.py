"""Acceptance suite: one test per criterion, each printing a PASS/FAIL line.

Run directly (``python3 tests/test_acceptance.py``) for the bare report, or
through pytest, which repeats the lines in the terminal summary.
"""

import time

import numpy as np
import pytest

from conftest import ACCEPTANCE_LINES
from oracles import doubling_itinerary, doubling_orbit, periodic_itineraries_by_scan
from rosslerlab.integrator import Tolerance, integrate
from rosslerlab.manifolds import (
    CriterionConfig, TrefoilConfig, attractor_criterion, face_normals, r1_flux, r2_flux,
    r2_threshold, r3_flux, sb_flux, trefoil_defect,
)
from rosslerlab.model import Params, check_assumptions, classify_fixed_point, eval_field, fixed_points
from rosslerlab.quadratic import (
    admissible, c_sup, code_point, find_orbit_with_itinerary, invariant_interval, kneading, pi_of_per,
)
from rosslerlab.section import ReturnMap, find_periodic_orbit, return_samples
from rosslerlab.symbols import SymbolSequence, periodic_words
from rosslerlab.synthetic import ParaboloidSaddle, PlantedHeteroclinic, radial_outflow

RNG_SEED = 20240611


def report(n, ok, detail):
    line = f"criterion {n:>2}: {'PASS' if ok else 'FAIL'}  {detail}"
    print(line)
    ACCEPTANCE_LINES.append(line)
    return ok


def random_params(rng, n):
    # the box a, b in (0, 1) with c capped at 10 around the classic values
    a = rng.uniform(0.0, 1.0, n)
    b = rng.uniform(0.0, 1.0, n)
    c = rng.uniform(1.0, 10.0, n)
    return [Params(*v) for v in zip(a, b, c)]


def test_c01_fixed_point_residuals():
    rng = np.random.default_rng(RNG_SEED)
    ps = random_params(rng, 1000)
    t0 = time.perf_counter()
    worst_in = worst_out = 0.0
    worst_p = None
    for p in ps:
        pin, pout = fixed_points(p)
        worst_in = max(worst_in, np.max(np.abs(eval_field(p, pin.location))))
        r = np.max(np.abs(eval_field(p, pout.location)))
        if r > worst_out:
            worst_out, worst_p = r, p
    dt = time.perf_counter() - t0
    ok = worst_in == 0.0 and worst_out < 1e-12 and dt < 1.0
    # rounding P_Out to doubles leaves |F_z| of order (c/a) ulp(c)
    floor = worst_p.c / worst_p.a * np.spacing(worst_p.c) / 2
    assert report(1, ok, f"max|F(P_In)|={worst_in:.1e} max|F(P_Out)|={worst_out:.1e} t={dt:.2f}s "
                         f"(worst a={worst_p.a:.4f} c={worst_p.c:.2f}, rounding floor ~{floor:.1e})")


def test_c02_spectral_residuals():
    rng = np.random.default_rng(RNG_SEED + 1)
    worst_res = worst_id = 0.0
    for p in random_params(rng, 1000):
        for which in ("In", "Out"):
            sp = classify_fixed_point(p, which)
            tr, m2, det = sp.char_poly
            lams = np.array(sp.eigenvalues, dtype=complex)
            for lam in lams:
                scale = abs(lam) ** 3 + abs(tr) * abs(lam) ** 2 + abs(m2) * abs(lam) + abs(det)
                res = abs(lam ** 3 - tr * lam ** 2 + m2 * lam - det) / scale
                worst_res = max(worst_res, res)
            l1, l2, l3 = lams
            ids = (
                abs(l1 + l2 + l3 - tr) / max(1.0, abs(tr)),
                abs(l1 * l2 + l1 * l3 + l2 * l3 - m2) / max(1.0, abs(m2)),
                abs(l1 * l2 * l3 - det) / max(1.0, abs(det)),
            )
            worst_id = max(worst_id, *ids)
    ok = worst_res < 1e-9 and worst_id < 1e-9
    assert report(2, ok, f"max rel char-poly residual={worst_res:.1e} max identity error={worst_id:.1e}")


def test_c03_sb_flux():
    rng = np.random.default_rng(RNG_SEED + 2)
    worst = 0.0
    for p in random_params(rng, 20):
        xy = rng.uniform(-10, 10, (500, 2))
        pts = np.column_stack([xy, np.full(500, -p.b)])
        flux = eval_field(p, pts) @ np.array([0.0, 0.0, 1.0])
        worst = max(worst, float(np.max(np.abs(flux - sb_flux(p)))))
    assert report(3, worst < 1e-12, f"max|F.e_z - bc| on z=-b over 1e4 points = {worst:.1e}")


def test_c04_repeller_faces():
    rng = np.random.default_rng(RNG_SEED + 3)
    worst = 0.0
    sign_bad = 0
    for p in random_params(rng, 10):
        n1, n2, n3 = face_normals(p)
        x = rng.uniform(-10, 10, 1000)
        z = rng.uniform(-10, 10, 1000)
        s1 = np.column_stack([x, -x / p.a, z])
        s2 = np.column_stack([x, -z, z])
        s3 = np.column_stack([x, np.full_like(x, p.b + 1), z])
        for pts, nrm, closed in ((s1, n1, r1_flux(p, x, z)), (s2, n2, r2_flux(p, x, z)),
                                 (s3, n3, r3_flux(p, x, z))):
            generic = eval_field(p, pts) @ nrm
            worst = max(worst, float(np.max(np.abs(generic - closed) / np.maximum(1.0, np.abs(generic)))))
        left = x < p.a + p.c
        pos = r2_flux(p, x, z) > 0
        below = z < r2_threshold(p, x)
        sign_bad += int(np.sum(pos[left] != below[left]))
    ok = worst < 1e-12 and sign_bad == 0
    assert report(4, ok, f"max face flux mismatch={worst:.1e} R2 sign-rule violations={sign_bad}")


def test_c05_quadratic_ground_truth():
    t0 = time.perf_counter()
    V = invariant_interval(-2.0)
    k = kneading(-2.0, 20).word.word
    c1 = c_sup(SymbolSequence.parse("(1)"))
    c2 = c_sup(SymbolSequence.parse("(2)"))
    c12 = c_sup(SymbolSequence.parse("(12)"))
    dt = time.perf_counter() - t0
    checks = {
        "V(-2)=[-2,2]": V.x2 == -2.0 and V.x1 == 2.0,
        "K(-2)=2,1^19": k == (2,) + (1,) * 19,
        "c_sup(1)=0.25": abs(c1 - 0.25) <= 1e-6,
        "c_sup(2)=0": abs(c2 - 0.0) <= 1e-6,
        "c_sup(12)=-0.75": abs(c12 + 0.75) <= 1e-6,
        "t<5s": dt < 5.0,
    }
    failed = [name for name, ok in checks.items() if not ok]
    detail = (f"c_sup(1)={c1:.9f} c_sup(2)={c2:.2e} c_sup(12)={c12:.9f} t={dt:.2f}s"
              + (f" failed: {', '.join(failed)}" if failed else ""))
    assert report(5, not failed, detail)


def test_c06_chebyshev_conjugacy():
    rng = np.random.default_rng(RNG_SEED + 5)
    bad_itin = bad_orbit = 0
    worst = 0.0
    tested = 0
    while tested < 100:
        k = int(rng.integers(1, 9))
        q = 2 ** k - 1
        m = int(rng.integers(0, q + 1))
        n = 2 * k
        ref = doubling_itinerary(m, q, n)
        if ref is None:
            continue
        tested += 1
        got = code_point(-2.0, 2 * np.cos(2 * np.pi * m / q), n).word
        bad_itin += got != tuple(ref)
        block = SymbolSequence.periodic(ref[:k])
        orbit = find_orbit_with_itinerary(-2.0, block)
        true_pts = np.array(doubling_orbit(m, q))
        err = max(float(np.min(np.abs(true_pts - x))) for x in orbit)
        err = max(err, max(float(np.min(np.abs(np.array(orbit) - y))) for y in true_pts))
        worst = max(worst, err)
        bad_orbit += err > 1e-9
    ok = bad_itin == 0 and bad_orbit == 0
    assert report(6, ok, f"{tested} angles: itinerary mismatches={bad_itin} orbit misses={bad_orbit} "
                         f"worst orbit error={worst:.1e}")


@pytest.mark.slow
def test_c07_admissibility_oracle():
    t0 = time.perf_counter()
    words = periodic_words(6)
    sups = {w: c_sup(w) for w in words}
    grid = np.linspace(-2.0, 0.25, 50)
    disagree = excluded = mono = compared = 0
    table = {w: [admissible(w, float(c)) for c in grid] for w in words}
    for w, row in table.items():
        mono += sum(1 for i in range(1, len(row)) if row[i] and not row[i - 1])
    for j, c in enumerate(grid):
        its = periodic_itineraries_by_scan(float(c), 6)
        for w in words:
            if abs(c - sups[w]) < 1e-6:
                excluded += 1
                continue
            compared += 1
            disagree += table[w][j] != (tuple(w.block) in its)
    dt = time.perf_counter() - t0
    ok = disagree == 0 and mono == 0 and dt < 60
    assert report(7, ok, f"{len(words)} words x 50 c: {compared} compared, {disagree} disagreements, "
                         f"{excluded} in boundary bands, monotonicity violations={mono}, t={dt:.1f}s")


@pytest.mark.slow
def test_c08_return_map_contract():
    p = Params(0.2, 0.2, 5.7)
    assert check_assumptions(p).all_ok
    rm = ReturnMap(p, tol=1e-10)
    S = return_samples(rm, [1.0, 1.0, 0.0], 500, 100)
    g = max(abs(c.point[0] + p.a * c.point[1]) for c in S)
    Q = np.array([c.point for c in S])
    orb = find_periodic_orbit(rm, 0.5 * (Q[-1] + Q[-2]), 1)
    back = rm.first(orb.points[0])
    reint = float(np.linalg.norm(back.point - orb.points[0]))
    dtime = abs(back.time - orb.return_times[0])
    rng = np.random.default_rng(RNG_SEED + 8)
    worst_rt = 0.0
    for s0 in Q[rng.choice(len(Q), 10, replace=False)]:
        # z contracts at rate ~|x - c|, so backward error grows like exp(10 T)
        fwd = integrate(p, s0, (0.0, 0.5), Tolerance(1e-10, 1e-10)).final
        bwd = integrate(p, fwd, (0.5, 0.0), Tolerance(1e-10, 1e-10)).final
        worst_rt = max(worst_rt, float(np.linalg.norm(bwd - s0)))
    ok = len(S) == 500 and g < 1e-10 and orb.residual < 1e-8 and reint < 1e-6 and dtime < 1e-6 \
        and worst_rt < 1e-6
    assert report(8, ok, f"{len(S)} crossings max|x+ay|={g:.1e}; period-1 residual={orb.residual:.1e} "
                         f"re-integration gap={reint:.1e}; round-trip(T=0.5) error={worst_rt:.1e}")


@pytest.mark.slow
def test_c09_pi_trend():
    ds = [pi_of_per(periodic_words(L)).d for L in range(1, 9)]
    viol = sum(1 for i in range(1, len(ds)) if ds[i] > ds[i - 1] + 1e-8)
    ok = viol == 0 and ds[-1] <= -1.98
    assert report(9, ok, "d(L)=" + ", ".join(f"{d:.5f}" for d in ds) + f" violations={viol}")


@pytest.mark.slow
def test_c10_synthetic_verdicts():
    par = ParaboloidSaddle()
    rad = radial_outflow()
    v_par = attractor_criterion(par)
    v_par2 = attractor_criterion(par, CriterionConfig(h_max=0.025))
    v_rad = attractor_criterion(rad, CriterionConfig(R_max=20.0))
    v_rad2 = attractor_criterion(rad, CriterionConfig(h_max=0.025, R_max=20.0))
    tre = trefoil_defect(PlantedHeteroclinic(), TrefoilConfig(compute_coincide=False))
    ok = (v_par.status == v_par2.status == "SatisfiedBounded"
          and v_rad.status == v_rad2.status == "EscapedFront"
          and tre.d_hetero < 1e-6)
    assert report(10, ok, f"paraboloid {v_par.status}/{v_par2.status}, radial {v_rad.status}/{v_rad2.status}, "
                          f"planted d_hetero={tre.d_hetero:.1e}")


if __name__ == "__main__":
    import sys

    fails = 0
    for name, fn in sorted(globals().items()):
        if name.startswith("test_c"):
            try:
                fn()
            except AssertionError:
                fails += 1
    sys.exit(1 if fails else 0)
