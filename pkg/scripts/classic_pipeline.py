"""Return map -> fold -> flow kneading -> Per(v) -> Pi(v) at one flow parameter.

Writes the crossings to CSV and prints a short summary. Defaults to the
classic chaotic parameters expressed in this package's coordinates.
"""

import argparse

import numpy as np

from rosslerlab import io
from rosslerlab.integrator import Tolerance
from rosslerlab.manifolds import flow_kneading
from rosslerlab.model import CLASSIC_CHAOTIC, Params, check_assumptions
from rosslerlab.quadratic import match_orbits, pi_of_per
from rosslerlab.section import ReturnMap, estimate_fold, estimate_per_v, return_samples


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--a", type=float, default=CLASSIC_CHAOTIC.a)
    ap.add_argument("--b", type=float, default=CLASSIC_CHAOTIC.b)
    ap.add_argument("--c", type=float, default=CLASSIC_CHAOTIC.c)
    ap.add_argument("--n", type=int, default=1000)
    ap.add_argument("--k-max", type=int, default=6)
    ap.add_argument("--tol", type=float, default=1e-9)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--csv", default="crossings.csv")
    args = ap.parse_args()

    p = Params(args.a, args.b, args.c)
    print("assumptions:", check_assumptions(p))
    rm = ReturnMap(p, tol=args.tol)
    seed = np.array([1.0, 1.0, 0.0]) + 1e-3 * np.random.default_rng(args.seed).standard_normal(3)
    S = return_samples(rm, seed, args.n, 100)
    io.write_csv(args.csv, io.CROSSING_HEADER, io.crossing_rows(S))
    part = estimate_fold(S)
    print(f"{len(S)} crossings -> {args.csv}; fold at x = {part.fold_x:.6f}")
    print("flow kneading:", flow_kneading(p, part, 12, tol=Tolerance(args.tol, args.tol)))
    entries = estimate_per_v(rm, args.n, args.k_max, part=part, seed=seed)
    per = [e.symbol for e in entries if e.symbol is not None]
    for e in entries:
        print(f"  k={e.orbit.k:<2} {str(e.symbol):>10}  residual={e.orbit.residual:.1e}")
    pi = pi_of_per(per)
    print(f"Pi(v) = {pi.d:.9f} (bound by {pi.binding_symbol})")
    rep = match_orbits(pi.d, [(e.symbol, e.orbit) for e in entries])
    print(f"matched {len(rep.matched)} orbit(s), unmatched: {[str(s) for s in rep.unmatched]}")


if __name__ == "__main__":
    main()
