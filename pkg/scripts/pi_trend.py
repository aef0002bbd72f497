"""d(L) = Pi(all periodic words of period <= L) for L = 1..L_max."""

import argparse
import time

from rosslerlab.quadratic import pi_of_per
from rosslerlab.symbols import periodic_words


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--max-len", type=int, default=8)
    ap.add_argument("--tol", type=float, default=1e-8)
    args = ap.parse_args()
    print(f"{'L':>2} {'#words':>7} {'d(L)':>14} {'binding':>12} {'sec':>6}")
    for L in range(1, args.max_len + 1):
        t0 = time.perf_counter()
        words = periodic_words(L)
        r = pi_of_per(words, args.tol)
        print(f"{L:>2} {len(words):>7} {r.d:>14.9f} {str(r.binding_symbol):>12} {time.perf_counter() - t0:>6.2f}")


if __name__ == "__main__":
    main()
