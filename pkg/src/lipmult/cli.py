"""Command-line front end.

Every subcommand prints one report.  With ``--json`` the report is a JSON
object ``{input, routes, agree, notes, seed, version}``; otherwise a short
text summary.  Exit codes: 0 success, 2 input error, 3 numeric
non-stabilisation (the report is still printed, with diagnostics).
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import dataclass, field
from typing import Sequence

from . import __version__
from .branches import (GenericityError, NotSquarefreeError, StabilizationError, branches,
                       relative_multiplicities)
from .catalog import catalog, export_catalog, get_entry, run_entry
from .cone import hypersurface_cone, secant_directions
from .jsonio import dumps, to_plain
from .lipgeom import lne_decide_plane_curve, lne_ratio
from .milnor import NotIsolatedError, milnor_number, randell_chi, recover_degree, transversal_milnor
from .multiplicity import ALL_ROUTES, DENSITY_RADII, DENSITY_SAMPLES, RouteError, mult_density, report
from .poly import ParseError, default_variables, format_poly, parse
from .seeding import derive_seed
from .uniroots import RootOnBoundaryError, TrackingError

__all__ = ["main", "run", "RunConfig", "build_parser"]

SCHEMA_VERSION = 1
NUMERIC_ERRORS = (RouteError, StabilizationError, GenericityError, TrackingError,
                  RootOnBoundaryError, NotIsolatedError, ArithmeticError)


class NumericFailure(Exception):
    """Raised by a handler that produced a report but did not stabilise."""


@dataclass
class RunConfig:
    """Parsed command line; every numeric knob has a default in :func:`build_parser`."""

    subcommand: str
    poly: str | None = None
    variables: list[str] | None = None
    seed: int = 0
    json: bool = False
    options: dict = field(default_factory=dict)


def _floats(text: str) -> list[float]:
    try:
        return [float(t) for t in text.split(",") if t.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers: {text!r}") from exc


def _names(text: str) -> list[str]:
    return [t.strip() for t in text.split(",") if t.strip()]


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=argparse.SUPPRESS,
                        help="master seed (default 0)")
    common.add_argument("--json", action="store_true", default=argparse.SUPPRESS,
                        help="emit a JSON report")
    common.add_argument("--vars", type=_names, default=argparse.SUPPRESS,
                        help="comma-separated variable names (default x,y[,z,...] by need)")

    p = argparse.ArgumentParser(prog="lipmult", parents=[common],
                                description="Multiplicity, tangent cones and Lipschitz geometry of germs at 0.")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="subcommand", required=True)

    def with_poly(name, help_text):
        sp = sub.add_parser(name, parents=[common], help=help_text)
        sp.add_argument("--poly", required=True, help="polynomial, e.g. 'x^3 - y^2'")
        return sp

    sp = with_poly("mult", "multiplicity by every applicable route")
    sp.add_argument("--routes", type=_names, default=list(ALL_ROUTES))
    sp.add_argument("--density-samples", type=int, default=DENSITY_SAMPLES)
    sp.add_argument("--density-radii", type=_floats, default=list(DENSITY_RADII))

    sp = with_poly("cone", "tangent cone and secant-direction clusters")
    sp.add_argument("--secant-scale", type=float, default=None,
                    help="also cluster secant directions at this scale")
    sp.add_argument("--secant-count", type=int, default=200)

    sp = with_poly("branches", "branch decomposition and relative multiplicities")
    sp.add_argument("--epsilon", type=float, default=None, help="fixed loop radius (default: ladder)")

    sp = with_poly("density", "Monte Carlo area density at 0")
    sp.add_argument("--radii", type=_floats, default=list(DENSITY_RADII))
    sp.add_argument("--samples", type=int, default=DENSITY_SAMPLES)

    sp = with_poly("milnor", "Milnor number, or transversal Milnor number with --transversal")
    sp.add_argument("--transversal", action="store_true")
    sp.add_argument("--line", type=_names, default=None,
                    help="exact direction of the singular line, e.g. 0,0,1")

    sp = sub.add_parser("randell", parents=[common], help="Euler characteristic of the Milnor fibre")
    sp.add_argument("--n", type=int, required=True, help="f maps C^(n+1) to C")
    sp.add_argument("--mu-prime", type=int, default=0)
    g = sp.add_mutually_exclusive_group(required=True)
    g.add_argument("--degree", type=int, help="compute chi for this degree")
    g.add_argument("--chi", type=int, help="recover the degrees with this chi")

    sp = with_poly("lne", "inner/outer distance ratios and the branch criterion")
    sp.add_argument("--scale-ladder", type=_floats, default=[1e-1, 1e-2, 1e-3])
    sp.add_argument("--samples", type=int, default=2000)

    sp = sub.add_parser("catalog", parents=[common], help="list, check or export the catalogue")
    sp.add_argument("--run-all", action="store_true")
    sp.add_argument("--name", default=None, help="run a single entry")
    sp.add_argument("--export", action="store_true", help="print the catalogue as JSON")
    sp.add_argument("--density-samples", type=int, default=DENSITY_SAMPLES)
    return p


def _config(ns: argparse.Namespace) -> RunConfig:
    opts = {k: v for k, v in vars(ns).items() if k not in ("subcommand", "poly", "vars", "seed", "json")}
    return RunConfig(ns.subcommand, getattr(ns, "poly", None), getattr(ns, "vars", None),
                     getattr(ns, "seed", 0), getattr(ns, "json", False), opts)


def _guess_variables(text: str) -> list[str]:
    import re

    used = set(re.findall(r"[A-Za-z_][A-Za-z_0-9]*", text)) - {"i"}
    for n in range(1, 9):
        names = default_variables(n)
        if used <= set(names) and (n >= 2 or used):
            return names if n >= 2 else default_variables(2)
    return sorted(used)


def _polynomial(cfg: RunConfig):
    names = cfg.variables or _guess_variables(cfg.poly)
    return parse(cfg.poly, names), names


# -- handlers: each returns (routes, agree, notes) ------------------------------------

def _h_mult(cfg, f):
    rep = report(f, cfg.options["routes"], cfg.seed, cfg.options["density_radii"],
                 cfg.options["density_samples"])
    if rep.notes and any(not n.endswith("skipped") for n in rep.notes):
        raise NumericFailure((rep.routes_json(), rep.agree, rep.notes))
    if not rep.agree:
        raise NumericFailure((rep.routes_json(), False, rep.notes + ["routes disagree"]))
    return rep.routes_json(), rep.agree, rep.notes


def _h_cone(cfg, f):
    cone = hypersurface_cone(f)
    routes = {"definingForm": format_poly(cone.defining_form, cfg.variables),
              "degree": cone.defining_form.degree,
              "lines": [ln.to_json() for ln in cone.lines]}
    notes = [] if f.nvars == 2 else ["lines are listed for plane curves only"]
    scale = cfg.options["secant_scale"]
    if scale is not None:
        sec = secant_directions(f, scale, cfg.options["secant_count"], derive_seed(cfg.seed, "secant"))
        routes["secant"] = {"scale": scale, "clusters": sec.cluster_count, "centers": sec.centers}
    return routes, None, notes


def _h_branches(cfg, f):
    dec = branches(f, cfg.options["epsilon"], cfg.seed)
    rm = relative_multiplicities(f, cfg.seed, dec)
    routes = {"decomposition": dec.to_json(), "relativeMultiplicities": rm.to_json(),
              "total": rm.total, "ord0": int(f.ord0())}
    notes = list(dec.notes) + list(rm.notes)
    ok = dec.conserved and rm.total == int(f.ord0())
    if not ok:
        raise NumericFailure((routes, False, notes + ["orders do not add up to ord0"]))
    return routes, True, notes


def _h_density(cfg, f):
    res = mult_density(f, cfg.options["radii"], cfg.options["samples"], cfg.seed)
    return {"density": res.to_json()}, None, []


def _h_milnor(cfg, f):
    if cfg.options["transversal"]:
        line = cfg.options["line"]
        line = None if line is None else [_exact_number(c) for c in line]
        return {"muPrime": transversal_milnor(f, line, cfg.seed)}, None, []
    return milnor_number(f).to_json(), None, []


def _exact_number(text: str):
    q = parse(text, ["t"])
    if q.degree > 0:
        raise ValueError(f"line coordinates must be numbers, got {text!r}")
    return q.constant_term()


def _h_randell(cfg):
    n, mp = cfg.options["n"], cfg.options["mu_prime"]
    if cfg.options["degree"] is not None:
        return {"chi": randell_chi(cfg.options["degree"], n, mp), "degrees": [cfg.options["degree"]]}, None, []
    chi = cfg.options["chi"]
    return {"chi": chi, "degrees": sorted(recover_degree(chi, n, mp))}, None, []


def _h_lne(cfg, f):
    ladder = cfg.options["scale_ladder"]
    ests = [lne_ratio(f, s, cfg.options["samples"], cfg.seed) for s in ladder]
    decision = lne_decide_plane_curve(f, cfg.seed)
    ratios = [e.ratio for e in ests]
    drift = (max(ratios) - min(ratios)) / min(ratios)
    routes = {"evidence": {"ladder": [e.to_json() for e in ests], "drift": drift},
              "decision": decision.to_json()}
    return routes, None, []


def _h_catalog(cfg):
    if cfg.options["export"]:
        return {"catalog": export_catalog()}, None, []
    entries = catalog()
    if cfg.options["name"]:
        entries = [get_entry(cfg.options["name"])]
    elif not cfg.options["run_all"]:
        return {"entries": [e.name for e in entries]}, None, []
    results = [run_entry(e, cfg.seed, cfg.options["density_samples"]) for e in entries]
    routes = {"results": [r.to_json() for r in results]}
    agree = all(r.ok for r in results)
    if not agree:
        bad = [r.name for r in results if not r.ok]
        raise NumericFailure((routes, False, [f"mismatch: {', '.join(bad)}"]))
    return routes, True, []


HANDLERS = {"mult": _h_mult, "cone": _h_cone, "branches": _h_branches, "density": _h_density,
            "milnor": _h_milnor, "lne": _h_lne}


def run(cfg: RunConfig, out=None) -> int:
    """Execute one configuration, print the report and return the exit code."""
    out = sys.stdout if out is None else out
    code = 0
    routes, agree, notes = {}, None, []
    inp = {"subcommand": cfg.subcommand, "options": cfg.options}
    try:
        if cfg.subcommand in HANDLERS:
            f, names = _polynomial(cfg)
            cfg.variables = names
            inp.update({"poly": format_poly(f, names), "vars": names})
            routes, agree, notes = HANDLERS[cfg.subcommand](cfg, f)
        elif cfg.subcommand == "randell":
            routes, agree, notes = _h_randell(cfg)
        elif cfg.subcommand == "catalog":
            routes, agree, notes = _h_catalog(cfg)
        else:
            raise ValueError(f"unknown subcommand {cfg.subcommand!r}")
    except NumericFailure as exc:
        routes, agree, notes = exc.args[0]
        code = 3
    except NUMERIC_ERRORS as exc:
        notes = [f"{type(exc).__name__}: {exc}"]
        code = 3
    except (ParseError, NotSquarefreeError, ValueError, KeyError, IndexError) as exc:
        notes = [f"{type(exc).__name__}: {exc}"]
        code = 2
    doc = {"input": inp, "routes": routes, "agree": agree, "notes": notes,
           "seed": cfg.seed, "version": SCHEMA_VERSION}
    if cfg.json:
        out.write(dumps(doc) + "\n")
    else:
        out.write(_text(doc) + "\n")
    return code


def _text(doc: dict) -> str:
    lines = [f"{doc['input']['subcommand']}: {doc['input'].get('poly', '')}".rstrip()]

    def walk(prefix, obj):
        if isinstance(obj, dict):
            for k, v in obj.items():
                walk(f"{prefix}.{k}" if prefix else k, v)
        elif isinstance(obj, list) and any(isinstance(v, (dict, list)) for v in obj) and len(obj) <= 20:
            for i, v in enumerate(obj):
                walk(f"{prefix}[{i}]", v)
        else:
            lines.append(f"  {prefix} = {dumps(obj, 0, digits=6).replace(chr(10), '')}")

    walk("", to_plain(doc["routes"]))
    if doc["agree"] is not None:
        lines.append(f"  agree = {str(doc['agree']).lower()}")
    for n in doc["notes"]:
        lines.append(f"  note: {n}")
    return "\n".join(lines)


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    ns = parser.parse_args(argv)
    return run(_config(ns))


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
