"""Milnor numbers of isolated and non-isolated germs, then degree recovery from chi.

Run with ``python3 demos/milnor_randell.py``.
"""

from lipmult.poly import parse
from lipmult.milnor import milnor_number, randell_chi, recover_degree, transversal_milnor

XYZ = ["x", "y", "z"]


def main():
    for text, names in [("y^2 - x^3", ["x", "y"]), ("x^3 - y^4", ["x", "y"]),
                        ("x^3 + y^3 + z^3", XYZ), ("x^4 + y^4 + z^4", XYZ)]:
        res = milnor_number(parse(text, names))
        print(f"mu({text}) = {res.mu}   certified at truncation degree {res.truncation_degree}")

    f = parse("x*y*(x + y)", XYZ)
    mu_prime = transversal_milnor(f)
    chi = randell_chi(3, 2, mu_prime)
    print(f"\nmu'(xy(x+y)) = {mu_prime}, chi of the Milnor fibre = {chi}")
    print(f"degrees compatible with chi={chi}, n=2, mu'={mu_prime}: {sorted(recover_degree(chi, 2, mu_prime))}")

    print("\nchi(d, n=2, mu') table")
    print("d\\mu' " + "".join(f"{m:>6d}" for m in range(5)))
    for d in range(2, 7):
        print(f"{d:5d} " + "".join(f"{randell_chi(d, 2, m):6d}" for m in range(5)))


if __name__ == "__main__":
    main()
