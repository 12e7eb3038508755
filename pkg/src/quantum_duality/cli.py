"""Command-line front end.

    quantum-duality trace --surface punctured_torus --coords 0,1/2,1/2
    quantum-duality dual --coords 0,1,1 --format latex
    quantum-duality product --l1 0,1,1 --l2 0,1,1 --format csv
    quantum-duality verify --curve 1L,2R --weight 2
    quantum-duality frobenius --coords 0,1,1 --root 3

Exit codes: 0 success, 2 unparsable input, 3 unmet domain precondition,
4 internal invariant violation (including a failed check).
"""
from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass
from typing import Sequence

from .duality import (StructureConstantTable, frobenius_check, i_hat_q, i_omega,
                      product_expand, verify_bundle)
from .errors import InternalParityViolation, ParseError, PeelFailure, QuantumDualityError
from .lamination import IntegralLamination, from_coords, lamination_from_curve, parse_coords
from .qtorus import QLaurent
from .surface import IdealTriangulation, load_surface

EXIT_OK, EXIT_PARSE, EXIT_DOMAIN, EXIT_INTERNAL = 0, 2, 3, 4

FORMATS = ("text", "json", "latex", "csv")


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise ParseError(message)


@dataclass(frozen=True)
class RunConfig:
    command: str
    surface: str
    coords: str | None = None
    curve: str | None = None
    weight: int = 1
    l1: str | None = None
    l2: str | None = None
    root: int | None = None
    fmt: str = "text"
    threads: int = 1
    classical: bool = False


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="quantum-duality", description=__doc__.split("\n\n")[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(p, lamination=True):
        p.add_argument("--surface", default="punctured_torus",
                       help="built-in name (punctured_torus, sphere_4) or path to a JSON file")
        if lamination:
            p.add_argument("--coords", help="comma-separated half-integer coordinates, e.g. 0,1/2,1/2")
            p.add_argument("--curve", help="curve word such as 1L,2R")
            p.add_argument("--weight", type=int, default=1, help="weight of --curve (default 1)")
        p.add_argument("--format", dest="fmt", choices=FORMATS, default="text")
        p.add_argument("--threads", type=int, default=1, help="threads for the state sum")

    p = sub.add_parser("trace", help="image in the w-level torus")
    common(p)
    p.add_argument("--classical", action="store_true", help="evaluate at w = 1")
    p = sub.add_parser("dual", help="image in the q-level torus")
    common(p)
    p = sub.add_parser("product", help="structure constants of a product")
    common(p, lamination=False)
    p.add_argument("--l1", required=True, help="coordinates of the left factor")
    p.add_argument("--l2", required=True, help="coordinates of the right factor")
    p = sub.add_parser("verify", help="run the per-lamination checks")
    common(p)
    p = sub.add_parser("frobenius", help="Frobenius identity at an odd root of unity")
    common(p)
    p.add_argument("--root", type=int, required=True, help="odd order N of the root of unity")
    return parser


def parse_config(argv: Sequence[str]) -> RunConfig:
    ns = build_parser().parse_args(list(argv))
    if ns.threads < 1:
        raise ParseError(f"bad --threads value {ns.threads}; expected a positive integer",
                         token=str(ns.threads))
    if ns.command != "product":
        if (ns.coords is None) == (ns.curve is None):
            raise ParseError("give exactly one of --coords and --curve")
    return RunConfig(
        command=ns.command, surface=ns.surface,
        coords=getattr(ns, "coords", None), curve=getattr(ns, "curve", None),
        weight=getattr(ns, "weight", 1), l1=getattr(ns, "l1", None), l2=getattr(ns, "l2", None),
        root=getattr(ns, "root", None), fmt=ns.fmt, threads=ns.threads,
        classical=getattr(ns, "classical", False),
    )


def _surface(spec: str) -> IdealTriangulation:
    try:
        return load_surface(spec)
    except FileNotFoundError:
        raise ParseError(f"surface {spec!r} is neither a built-in name nor a readable file",
                         token=spec) from None
    except json.JSONDecodeError as exc:
        raise ParseError(f"surface file {spec!r} is not valid JSON: {exc}", token=spec) from None


def _coords(T: IdealTriangulation, text: str) -> IntegralLamination:
    a = parse_coords(text)
    if len(a) != T.num_edges:
        raise ParseError(f"expected {T.num_edges} coordinates, got {len(a)} in {text!r}", token=text)
    return from_coords(T, a)


def _lamination(T: IdealTriangulation, cfg: RunConfig) -> IntegralLamination:
    if cfg.coords is not None:
        return _coords(T, cfg.coords)
    return lamination_from_curve(T, cfg.curve, cfg.weight)


# --- rendering -------------------------------------------------------------

def render_polynomial(f: QLaurent, fmt: str) -> str:
    if fmt == "json":
        return json.dumps(f.to_json(), sort_keys=True) + "\n"
    if fmt == "latex":
        return f.render_latex() + "\n"
    if fmt == "csv":
        head = ",".join(f"{f.symbol}{i + 1}" for i in range(f.n))
        lines = [f"{head},coefficient"]
        for p, c in f.items():
            lines.append(",".join(map(str, p)) + "," + c.render(f.scalar_name))
        return "\n".join(lines) + "\n"
    return f.render() + "\n"


def _lam_label(lam: IntegralLamination) -> str:
    return "(" + ",".join(str(x) for x in lam.coords()) + ")"


def render_table(table: StructureConstantTable, fmt: str) -> str:
    if fmt == "json":
        return json.dumps(table.to_json(), sort_keys=True) + "\n"
    if fmt == "csv":
        n = table.left.T.num_edges
        lines = [",".join(f"a{i + 1}" for i in range(n)) + ",coefficient,coefficient_at_q1"]
        for lam, c in table.rows:
            lines.append(",".join(str(x) for x in lam.coords()) + f",{c.render('q')},{c.at_one()}")
        return "\n".join(lines) + "\n"
    if fmt == "latex":
        parts = []
        for lam, c in table.rows:
            label = ",".join(str(x) for x in lam.coords())
            cs = c.render_latex("q")
            cs = "" if cs == "1" else (cs + " " if c.is_monomial() else f"\\left({cs}\\right) ")
            parts.append(f"{cs}\\hat{{I}}({label})")
        lhs = f"\\hat{{I}}{_lam_label(table.left)} \\hat{{I}}{_lam_label(table.right)}"
        return lhs + " = " + " + ".join(parts) + "\n"
    lines = [f"{_lam_label(table.left)} x {_lam_label(table.right)}: {len(table)} terms"]
    for lam, c in table.rows:
        lines.append(f"{_lam_label(lam)}\t{c.render('q')}")
    return "\n".join(lines) + "\n"


# --- commands --------------------------------------------------------------

def cmd_trace(cfg: RunConfig) -> tuple[str, int]:
    T = _surface(cfg.surface)
    f = i_omega(_lamination(T, cfg), threads=cfg.threads)
    if cfg.classical:
        f = f.classical_limit()
    return render_polynomial(f, cfg.fmt), EXIT_OK


def cmd_dual(cfg: RunConfig) -> tuple[str, int]:
    T = _surface(cfg.surface)
    f = i_hat_q(_lamination(T, cfg), threads=cfg.threads)
    return render_polynomial(f, cfg.fmt), EXIT_OK


def cmd_product(cfg: RunConfig) -> tuple[str, int]:
    T = _surface(cfg.surface)
    table = product_expand(_coords(T, cfg.l1), _coords(T, cfg.l2))
    return render_table(table, cfg.fmt), EXIT_OK


def cmd_verify(cfg: RunConfig) -> tuple[str, int]:
    T = _surface(cfg.surface)
    rep = verify_bundle(_lamination(T, cfg))
    if cfg.fmt == "json":
        text = rep.dumps()
    elif cfg.fmt == "csv":
        text = "check,passed,detail\n" + "".join(
            f"{name},{str(ok).lower()},{json.dumps(detail)}\n" for name, ok, detail in rep.checks)
    else:
        text = rep.to_text()
    return text, EXIT_OK if rep.passed else EXIT_INTERNAL


def cmd_frobenius(cfg: RunConfig) -> tuple[str, int]:
    T = _surface(cfg.surface)
    lam = _lamination(T, cfg)
    if cfg.root < 1 or cfg.root % 2 == 0:
        raise ParseError(f"bad --root value {cfg.root}; expected an odd positive integer",
                         token=str(cfg.root))
    ok = frobenius_check(lam, cfg.root)
    if cfg.fmt == "json":
        text = json.dumps({"coords": [str(x) for x in lam.coords()], "root": cfg.root,
                           "holds": ok}, sort_keys=True) + "\n"
    elif cfg.fmt == "csv":
        text = "coords,root,holds\n" + f"\"{','.join(str(x) for x in lam.coords())}\",{cfg.root},{str(ok).lower()}\n"
    else:
        text = ("true" if ok else "false") + "\n"
    return text, EXIT_OK if ok else EXIT_INTERNAL


COMMANDS = {
    "trace": cmd_trace,
    "dual": cmd_dual,
    "product": cmd_product,
    "verify": cmd_verify,
    "frobenius": cmd_frobenius,
}

_INTERNAL = (InternalParityViolation, PeelFailure)


def run(argv: Sequence[str], out=None, err=None) -> int:
    """Run one command; returns the exit code."""
    out = out if out is not None else sys.stdout
    err = err if err is not None else sys.stderr
    try:
        cfg = parse_config(argv)
        text, code = COMMANDS[cfg.command](cfg)
    except ParseError as exc:
        err.write(f"error: {exc}\n")
        return EXIT_PARSE
    except _INTERNAL as exc:
        err.write(f"internal error: {type(exc).__name__}: {exc}\n")
        return EXIT_INTERNAL
    except (QuantumDualityError, ValueError) as exc:
        err.write(f"error: {type(exc).__name__}: {exc}\n")
        return EXIT_DOMAIN
    except AssertionError as exc:
        err.write(f"internal error: {exc}\n")
        return EXIT_INTERNAL
    out.write(text)
    return code


def main(argv: Sequence[str] | None = None) -> int:
    return run(sys.argv[1:] if argv is None else argv)


if __name__ == "__main__":
    sys.exit(main())
