"""Attractor criterion on the synthetic fields, at h_max and h_max / 2."""

import time

from rosslerlab.manifolds import CriterionConfig, TrefoilConfig, attractor_criterion, trefoil_defect
from rosslerlab.synthetic import ParaboloidSaddle, PlantedHeteroclinic, radial_outflow


def main():
    cases = [("paraboloid", ParaboloidSaddle(), None), ("radial", radial_outflow(), 20.0)]
    for name, fld, R in cases:
        for h in (0.05, 0.025):
            t0 = time.perf_counter()
            v = attractor_criterion(fld, CriterionConfig(h_max=h, R_max=R))
            print(f"{name:>10} h_max={h:<6} {v.status:<17} gap={v.gap_max:.4f} "
                  f"points={v.n_points:<6} {time.perf_counter() - t0:.2f}s")
    par = ParaboloidSaddle()
    print(f"paraboloid delta radius (exact) = {par.delta_radius():.8f}")
    d = trefoil_defect(PlantedHeteroclinic(), TrefoilConfig(t_max=60.0))
    print(f"planted heteroclinic: d_hetero={d.d_hetero:.2e} d_coincide={d.d_coincide}")


if __name__ == "__main__":
    main()
