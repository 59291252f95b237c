"""Write 'n cumulative bound' columns for one case, for plotting growth against its bound."""
import argparse
from pathlib import Path

from orbitiles.geodesics import IndexParams
from orbitiles.pipeline import run_pipeline


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--case", type=int, required=True)
    ap.add_argument("--order", type=int)
    ap.add_argument("--n-max", type=int, default=40)
    ap.add_argument("--n-seeds", type=int, default=10)
    ap.add_argument("--m", type=int, default=0)
    ap.add_argument("--out")
    args = ap.parse_args()
    rep = run_pipeline(args.case, args.n_max, IndexParams(m=args.m), range(args.n_seeds), args.order).report
    out = Path(args.out or f"results/growth_case{args.case}_m{args.m}.dat")
    out.parent.mkdir(parents=True, exist_ok=True)
    out.write_text(rep.plot_data())
    print(f"fitted degree {rep.fitted_degree:.3f} ({rep.kind} bound, verdict {rep.verdict}) -> {out}")


if __name__ == "__main__":
    main()
