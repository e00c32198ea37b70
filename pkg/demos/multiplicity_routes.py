"""Compare every multiplicity route on a few plane curves and one surface.

Run with ``python3 demos/multiplicity_routes.py``.
"""

from lipmult.poly import parse
from lipmult.branches import branches
from lipmult.multiplicity import growth_exponent, report

CURVES = {
    "cusp": ("x^3 - y^2", ["x", "y"]),
    "tacnode": ("(y - x^2)*(y + x^2)", ["x", "y"]),
    "E6": ("x^3 - y^4", ["x", "y"]),
    "Whitney t=3": ("x*y*(y-x)*(y-3*x)", ["x", "y"]),
    "Fermat cubic surface": ("x^3 + y^3 + z^3", ["x", "y", "z"]),
}


def main():
    for label, (text, names) in CURVES.items():
        f = parse(text, names)
        rep = report(f, density_samples=50_000)
        routes = rep.integer_routes()
        density = rep.density_route.estimate if rep.density_route else float("nan")
        print(f"{label:22s} {text:22s} integer routes {routes}")
        print(f"{'':22s} density {density:.4f}  growth exponent {growth_exponent(f):.4f}  "
              f"agree {rep.agree}")
        if f.nvars == 2:
            dec = branches(f)
            orders = [b.order for b in dec.branches]
            print(f"{'':22s} branch orders {orders}")


if __name__ == "__main__":
    main()
