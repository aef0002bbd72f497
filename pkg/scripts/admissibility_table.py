"""c_sup for every periodic word up to a given period, sorted by c_sup."""

import argparse

from rosslerlab import io
from rosslerlab.quadratic import c_sup
from rosslerlab.symbols import periodic_words


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--max-len", type=int, default=6)
    ap.add_argument("--csv", default=None)
    args = ap.parse_args()
    rows = sorted(((str(w), c_sup(w)) for w in periodic_words(args.max_len)), key=lambda r: -r[1])
    for w, v in rows:
        print(f"{w:>10} {v:>14.9f}")
    if args.csv:
        io.write_csv(args.csv, ["word", "c_sup"], rows)


if __name__ == "__main__":
    main()
