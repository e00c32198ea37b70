"""Inner/outer distance ratios across shrinking scales.

Transverse branches keep the ratio bounded; tangent branches and cusps
make it blow up.  The branch criterion is printed alongside.
Run with ``python3 demos/lne_ladder.py``.
"""

from lipmult.poly import parse
from lipmult.lipgeom import lne_decide_plane_curve, lne_ratio

SCALES = (1e-1, 1e-2, 1e-3)
CURVES = ["y - x", "x*y", "x*y*(y-x)*(y-2*x)", "y^2 - x^3", "(y - x^2)*(y + x^2)", "x^3 - y^4"]


def main():
    print(f"{'curve':22s}" + "".join(f"{s:>12g}" for s in SCALES) + "   decision")
    for text in CURVES:
        f = parse(text, ["x", "y"])
        ratios = [lne_ratio(f, s).ratio for s in SCALES]
        verdict = lne_decide_plane_curve(f)
        print(f"{text:22s}" + "".join(f"{r:12.3f}" for r in ratios)
              + f"   {'LNE' if verdict.is_lne else 'not LNE'} ({verdict.reason})")


if __name__ == "__main__":
    main()
