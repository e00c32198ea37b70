"""Embedded catalogue of germs with independently known invariants."""

from __future__ import annotations

from dataclasses import dataclass, field

from .branches import branches, relative_multiplicities
from .cone import hypersurface_cone
from .lipgeom import lne_decide_plane_curve
from .milnor import milnor_number, randell_chi, transversal_milnor
from .multiplicity import DENSITY_TOLERANCE, growth_exponent, report
from .poly import Polynomial, parse
from .seeding import derive_seed

__all__ = ["CatalogEntry", "catalog", "get_entry", "run_entry", "export_catalog"]

GROWTH_TOLERANCE = 0.05


@dataclass(frozen=True)
class CatalogEntry:
    """A named germ, its expected invariants and how each value is known.

    Keys of ``expected``: ``mult`` (every integer multiplicity route),
    ``tangentLines``, ``branchOrders`` (sorted), ``lne``, ``milnor``,
    ``transversalMilnor``, ``chi``.  Growth exponent and density are always
    compared with ``mult``.
    """

    name: str
    polynomial: str
    variables: tuple[str, ...]
    expected: dict
    provenance: str
    note: str = ""

    def poly(self) -> Polynomial:
        return parse(self.polynomial, list(self.variables))

    def to_json(self) -> dict:
        return {"name": self.name, "polynomial": self.polynomial, "variables": list(self.variables),
                "expected": dict(self.expected), "provenance": self.provenance, "note": self.note}


XY = ("x", "y")
XYZ = ("x", "y", "z")


def _whitney(t: int) -> CatalogEntry:
    return CatalogEntry(
        f"whitney-t{t}", f"x*y*(y-x)*(y-{t}*x)", XY,
        {"mult": 4, "tangentLines": 4, "branchOrders": [1, 1, 1, 1], "lne": True, "milnor": 9},
        "four distinct lines through 0: order 4, each line its own smooth branch; "
        "homogeneous isolated quartic so mu = 3^2",
    )


_ENTRIES = (
    CatalogEntry("line", "y", XY,
                 {"mult": 1, "tangentLines": 1, "branchOrders": [1], "lne": True, "milnor": 0},
                 "a regular point: linear f has order 1 and no critical point"),
    CatalogEntry("cusp", "x^3 - y^2", XY,
                 {"mult": 2, "tangentLines": 1, "branchOrders": [2], "lne": False, "milnor": 2},
                 "order 2; the parametrisation (t^2, t^3) is one branch of order 2; "
                 "Jacobian ideal (x^2, y) leaves the basis {1, x}"),
    CatalogEntry("node", "x*y", XY,
                 {"mult": 2, "tangentLines": 2, "branchOrders": [1, 1], "lne": True, "milnor": 1},
                 "two transverse coordinate axes; Morse point"),
    CatalogEntry("tacnode", "(y - x^2)*(y + x^2)", XY,
                 {"mult": 2, "tangentLines": 1, "branchOrders": [1, 1], "lne": False, "milnor": 3},
                 "two smooth parabolas with the common tangent y = 0; "
                 "Jacobian ideal (x^3, y) leaves {1, x, x^2}"),
    CatalogEntry("e6", "x^3 - y^4", XY,
                 {"mult": 3, "tangentLines": 1, "branchOrders": [3], "lne": False, "milnor": 6},
                 "irreducible with parametrisation (t^4, t^3); mu = (3-1)(4-1)"),
    CatalogEntry("triple-point", "x^3 + y^3", XY,
                 {"mult": 3, "tangentLines": 3, "branchOrders": [1, 1, 1], "lne": True, "milnor": 4},
                 "three distinct lines; homogeneous isolated cubic so mu = 2^2"),
    _whitney(2),
    _whitney(3),
    _whitney(5),
    CatalogEntry("fermat-cubic-surface", "x^3 + y^3 + z^3", XYZ,
                 {"mult": 3, "milnor": 8, "chi": 9},
                 "homogeneous isolated cubic in 3 variables: mu = 2^3 and the Milnor fibre "
                 "has Euler characteristic 1 + mu",
                 "not C^1 smooth at 0; Lipschitz-regularity claims are outside computational scope"),
    CatalogEntry("three-planes", "x*y*(x + y)", XYZ,
                 {"mult": 3, "transversalMilnor": 4, "chi": -3},
                 "three planes through the z-axis: the transversal slice is the plane triple "
                 "point (mu 4); the Milnor fibre is (plane fibre) x C with chi = 1 - 4"),
    CatalogEntry("plane", "z", XYZ,
                 {"mult": 1, "milnor": 0},
                 "a smooth hypersurface: multiplicity 1"),
)


def catalog() -> list[CatalogEntry]:
    return list(_ENTRIES)


def get_entry(name: str) -> CatalogEntry:
    for e in _ENTRIES:
        if e.name == name:
            return e
    raise KeyError(f"no catalogue entry named {name!r}; known: {[e.name for e in _ENTRIES]}")


def export_catalog() -> list[dict]:
    return [e.to_json() for e in _ENTRIES]


@dataclass
class EntryResult:
    name: str
    computed: dict = field(default_factory=dict)
    matches: dict = field(default_factory=dict)
    notes: list[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return bool(self.matches) and all(self.matches.values())

    def to_json(self) -> dict:
        return {"name": self.name, "computed": self.computed, "matches": self.matches,
                "ok": self.ok, "notes": self.notes}


def run_entry(entry: CatalogEntry, seed: int = 0, density_samples: int = 100_000) -> EntryResult:
    """Recompute every expected invariant of ``entry`` and compare."""
    f = entry.poly()
    exp = entry.expected
    res = EntryResult(entry.name)
    plane = f.nvars == 2
    rep = report(f, seed=derive_seed(seed, "mult"), density_samples=density_samples)
    res.notes.extend(rep.notes)
    ints = rep.integer_routes()
    res.computed["mult"] = ints
    res.matches["mult"] = bool(ints) and all(v == exp["mult"] for v in ints.values())
    if plane:
        dens = rep.density_route.estimate if rep.density_route else None
        res.computed["density"] = dens
        res.matches["density"] = dens is not None and abs(dens - exp["mult"]) <= DENSITY_TOLERANCE
    g = growth_exponent(f, seed=derive_seed(seed, "growth"))
    res.computed["growth"] = g
    res.matches["growth"] = abs(g - exp["mult"]) <= GROWTH_TOLERANCE
    if "tangentLines" in exp:
        n = len(hypersurface_cone(f).lines)
        res.computed["tangentLines"] = n
        res.matches["tangentLines"] = n == exp["tangentLines"]
    if "branchOrders" in exp or "lne" in exp:
        dec = branches(f, seed=derive_seed(seed, "branches"))
        orders = sorted(b.order for b in dec.branches)
        res.computed["branchOrders"] = orders
        if "branchOrders" in exp:
            res.matches["branchOrders"] = orders == exp["branchOrders"]
        if "lne" in exp:
            verdict = lne_decide_plane_curve(f, decomposition=dec)
            res.computed["lne"] = verdict.is_lne
            res.matches["lne"] = verdict.is_lne == exp["lne"]
        rm = relative_multiplicities(f, decomposition=dec)
        res.matches["conservation"] = rm.total == int(f.ord0())
    if "milnor" in exp:
        mu = milnor_number(f).mu
        res.computed["milnor"] = mu
        res.matches["milnor"] = mu == exp["milnor"]
    if "transversalMilnor" in exp:
        mp = transversal_milnor(f, seed=derive_seed(seed, "transversal"))
        res.computed["transversalMilnor"] = mp
        res.matches["transversalMilnor"] = mp == exp["transversalMilnor"]
    if "chi" in exp:
        d = f.degree
        mp = res.computed.get("transversalMilnor", 0)
        chi = randell_chi(d, f.nvars - 1, mp)
        res.computed["chi"] = chi
        res.matches["chi"] = chi == exp["chi"]
    if rep.generic_line_route is None and f.nvars >= 2:
        res.notes.append("generic-line route missing")
    return res
