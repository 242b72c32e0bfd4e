"""Command-line driver.

File formats (UTF-8, ``#`` starts a comment):

Algebra file::

    name sl2
    dim 3
    basis e h f
    flags lie                 # optional: lie and/or associative, verified on load
    bracket h e = 2 e         # or: product x y = ...
    bracket e f = h
    product p p = 1/2*z^3 p - q

``bracket`` lines fill in the antisymmetric partner and declare a Lie
algebra; ``product`` lines give single products.  The two kinds cannot be
mixed.  Coefficients are ``p/q`` rationals, optionally times ``z^k`` where
z is the primitive root of unity of the session conductor; a parenthesised
sum such as ``(1 + z) e`` is also accepted.

Automorphism file (one block per sigma, in the order of ``--m``)::

    sigma omega
    row 0 0 -1
    row 0 -1 0
    row -1 0 0
    sigma id
    identity

Column j of the matrix holds the image of basis vector j.

Exit codes: 0 all checks pass, 1 a mathematical check failed or was
inconclusive, 2 input error.
"""

from __future__ import annotations

import argparse
import json
import math
import random
import re
import sys
import time
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

from .algcore import (AlgEndo, AlgebraError, FinAlg, SigmaError, centroid_basis, derivations_of_A,
                      is_central, is_perfect, load_algebra, validate_sigma_tuple)
from .descent import compare_with_multiloop
from .dermod import (DecompositionError, EtaError, HypothesisError, ad, decompose,
                     homothety_generators, loop_element_json, random_derivation, rho,
                     tensor_centroid_generators, verify_theorem, windowed_centroid)
from .exactla import CycNum, format_cyc, parse_cyc
from .laurent import LaurentDerivation, parse_poly_json
from .multiloop import EigenspaceError, InvariantError, LoopElement, Multiloop, Window

EXIT_PASS, EXIT_FAIL, EXIT_INPUT = 0, 1, 2


class SpecError(ValueError):
    """Malformed input file; the message carries file and line."""


# ---------------------------------------------------------------------------
# parsing
# ---------------------------------------------------------------------------

def _lines(text: str):
    for no, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if line:
            yield no, line


def _split_terms(rhs: str) -> list:
    """Split on top-level + and - (not inside parentheses or after ^ or /)."""
    terms, depth, cur = [], 0, ""
    for i, ch in enumerate(rhs):
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
        if ch in "+-" and depth == 0:
            prev = rhs[:i].rstrip()
            if prev and prev[-1] not in "^/*":
                terms.append(cur)
                cur = ""
        cur += ch
    terms.append(cur)
    return [t.strip() for t in terms if t.strip()]


def _parse_rhs(rhs: str, names: Sequence[str], m: int, where: str) -> dict:
    if rhs.strip() == "0":
        return {}
    out = {}
    for term in _split_terms(rhs):
        sign = ""
        while term and term[0] in "+-":
            sign = "-" if (term[0] == "-") != (sign == "-") else ""
            term = term[1:].strip()
        match = re.fullmatch(r"(.*?)[\s*]*([A-Za-z_][\w']*)", term)
        if not match:
            raise SpecError(f"{where}: cannot read term {term!r}")
        coeff_text, name = match.group(1).strip(), match.group(2)
        if name not in names:
            raise SpecError(f"{where}: unknown basis element {name!r}")
        if coeff_text.startswith("(") and coeff_text.endswith(")"):
            coeff_text = coeff_text[1:-1]
        try:
            c = parse_cyc(coeff_text, m) if coeff_text else CycNum.one(m)
        except ValueError as exc:
            raise SpecError(f"{where}: {exc}") from None
        if sign:
            c = -c
        out[name] = out[name] + c if name in out else c
    return out


def parse_algebra(text: str, m: int = 1, source: str = "<algebra>") -> FinAlg:
    desc = {"products": []}
    kind = None
    for no, line in _lines(text):
        where = f"{source}:{no}"
        head, _, rest = line.partition(" ")
        rest = rest.strip()
        if head == "name":
            desc["name"] = rest
        elif head == "dim":
            try:
                desc["dim"] = int(rest)
            except ValueError:
                raise SpecError(f"{where}: dim must be an integer, got {rest!r}") from None
        elif head == "basis":
            desc["basis"] = rest.split()
        elif head == "flags":
            desc["flags"] = rest.split()
        elif head in ("bracket", "product"):
            if "basis" not in desc:
                raise SpecError(f"{where}: {head} line before the basis line")
            if kind not in (None, head):
                raise SpecError(f"{where}: cannot mix bracket and product lines")
            kind = head
            lhs, eq, rhs = rest.partition("=")
            if not eq:
                raise SpecError(f"{where}: expected 'x y = ...'")
            factors = lhs.split()
            if len(factors) != 2:
                raise SpecError(f"{where}: left side must name two basis elements")
            for f in factors:
                if f not in desc["basis"]:
                    raise SpecError(f"{where}: unknown basis element {f!r}")
            desc["products"].append((factors[0], factors[1], _parse_rhs(rhs, desc["basis"], m, where)))
        else:
            raise SpecError(f"{where}: unknown keyword {head!r}")
    if "basis" not in desc:
        raise SpecError(f"{source}: no basis line")
    desc["kind"] = kind or "product"
    desc.setdefault("name", Path(source).stem)
    return load_algebra(desc, m)


def parse_sigmas(text: str, A: FinAlg, source: str = "<sigma>") -> list:
    """List of (name, AlgEndo) in file order."""
    blocks = []
    for no, line in _lines(text):
        where = f"{source}:{no}"
        head, _, rest = line.partition(" ")
        if head == "sigma":
            blocks.append([rest.strip() or f"sigma{len(blocks) + 1}", no, None, []])
        elif not blocks:
            raise SpecError(f"{where}: expected a 'sigma NAME' line first")
        elif head == "identity":
            blocks[-1][2] = "identity"
        elif head == "row":
            try:
                blocks[-1][3].append([parse_cyc(tok, A.m) for tok in rest.split()])
            except ValueError as exc:
                raise SpecError(f"{where}: {exc}") from None
            if len(blocks[-1][3][-1]) != A.dim:
                raise SpecError(f"{where}: row has {len(blocks[-1][3][-1])} entries, expected {A.dim}")
        else:
            raise SpecError(f"{where}: unknown keyword {head!r}")
    out = []
    for name, no, ident, rows in blocks:
        if ident and rows:
            raise SpecError(f"{source}:{no}: sigma {name} has both identity and rows")
        if ident:
            out.append((name, AlgEndo.identity(A)))
        elif len(rows) != A.dim:
            raise SpecError(f"{source}:{no}: sigma {name} has {len(rows)} rows, expected {A.dim}")
        else:
            out.append((name, AlgEndo.from_rows(A, rows)))
    if not out:
        raise SpecError(f"{source}: no sigma blocks")
    return out


def _int_list(text: str, what: str) -> tuple:
    try:
        vals = tuple(int(x) for x in text.split(","))
    except ValueError:
        raise SpecError(f"--{what} expects comma-separated integers, got {text!r}") from None
    return vals


# ---------------------------------------------------------------------------
# session
# ---------------------------------------------------------------------------

@dataclass
class Session:
    A: FinAlg
    moduli: tuple
    sigma_names: tuple
    L: Multiloop | None
    window: Window | None
    fixture: str
    seed: int

    @property
    def conductor(self) -> int:
        return self.A.m


def build_session(args, need_sigma=True, need_window=False) -> Session:
    moduli = _int_list(args.m, "m") if args.m else (1,)
    if any(x < 1 for x in moduli):
        raise SpecError("--m entries must be positive")
    conductor = math.lcm(*moduli)
    if not args.algebra:
        raise SpecError("--algebra is required")
    apath = Path(args.algebra)
    try:
        atext = apath.read_text(encoding="utf-8")
    except OSError as exc:
        raise SpecError(f"cannot read {apath}: {exc.strerror}") from None
    A = parse_algebra(atext, conductor, str(apath))
    names, L = (), None
    fixture = A.name
    if need_sigma:
        if args.sigma:
            spath = Path(args.sigma)
            try:
                stext = spath.read_text(encoding="utf-8")
            except OSError as exc:
                raise SpecError(f"cannot read {spath}: {exc.strerror}") from None
            pairs = parse_sigmas(stext, A, str(spath))
            fixture = f"{A.name}+{spath.stem}"
        else:
            pairs = [("id", AlgEndo.identity(A)) for _ in moduli]
        if len(pairs) != len(moduli):
            raise SpecError(f"{len(pairs)} automorphisms but --m gives {len(moduli)} orders")
        sigma = validate_sigma_tuple(A, [p[1] for p in pairs], moduli)
        names = tuple(p[0] for p in pairs)
        L = Multiloop(A, sigma)
    W = None
    if need_window or args.window:
        bounds = _int_list(args.window or "6", "window")
        if len(bounds) == 1 and len(moduli) > 1:
            bounds = bounds * len(moduli)
        if len(bounds) != len(moduli):
            raise SpecError(f"--window has {len(bounds)} entries, expected {len(moduli)}")
        core = None
        if args.core:
            core = _int_list(args.core, "core")
            if len(core) == 1 and len(bounds) > 1:
                core = core * len(bounds)
        try:
            W = Window.centered(bounds, core)
        except ValueError as exc:
            raise SpecError(str(exc)) from None
    return Session(A, moduli, names, L, W, fixture, args.seed)


# ---------------------------------------------------------------------------
# reports
# ---------------------------------------------------------------------------

def _deg(a) -> str:
    return ",".join(str(x) for x in a)


def _vec(v) -> list:
    return [format_cyc(x) for x in v]


def base_report(s: Session, command: str) -> dict:
    return {
        "command": command,
        "fixture": s.fixture,
        "moduli": list(s.moduli),
        "window": list(s.window.bounds) if s.window else None,
        "core": list(s.window.core_bounds) if s.window else None,
        "verdicts": {},
        "dimensions": {},
        "runtime": None,
    }


def dump_json(report: dict) -> str:
    return json.dumps(report, indent=2, sort_keys=True, ensure_ascii=False) + "\n"


def render_text(report: dict) -> str:
    lines = [f"{report['command']}: {report['fixture']}"]
    if report.get("window") is not None:
        lines.append(f"moduli {report['moduli']}  window {report['window']}  core {report['core']}")
    for k, v in report["verdicts"].items():
        lines.append(f"  {k:<12} {v}")
    for k, v in report.get("details", {}).items():
        if isinstance(v, dict):
            lines.append(f"{k}:")
            lines.extend(f"  {kk}: {vv}" for kk, vv in v.items())
        elif isinstance(v, list):
            lines.append(f"{k}: " + " ".join(str(x) for x in v))
        else:
            lines.append(f"{k}: {v}")
    for k, v in report.get("dimensions", {}).items():
        if v and all(isinstance(x, dict) for x in v.values()):
            cols = list(next(iter(v.values())))
            lines.append(f"{k}:  " + "  ".join(cols))
            lines.extend(f"  {kk:>8}  " + "  ".join(f"{row[c]:>{len(c)}}" for c in cols)
                         for kk, row in v.items())
        elif v:
            lines.append(f"{k}: " + "  ".join(f"{kk}:{vv}" for kk, vv in v.items()))
    for note in report.get("notes", []):
        lines.append(f"note: {note}")
    if report.get("message"):
        lines.append(report["message"])
    if report.get("runtime"):
        lines.append(f"runtime: {report['runtime']}")
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# commands
# ---------------------------------------------------------------------------

def cmd_check_algebra(args) -> tuple:
    s = build_session(args, need_sigma=False)
    A = s.A
    rep = base_report(s, "check-algebra")
    perfect, central = is_perfect(A), is_central(A)
    rep["verdicts"] = {"loaded": "PASS"}
    rep["details"] = {
        "dim": A.dim,
        "basis": list(A.basis_names),
        "lie": A.is_lie,
        "associative": A.is_associative,
        "perfect": perfect,
        "central": central,
        "centroid_dim": len(centroid_basis(A)),
        "derivation_dim": len(derivations_of_A(A)),
    }
    return rep, EXIT_PASS


def cmd_eigenspaces(args) -> tuple:
    s = build_session(args)
    rep = base_report(s, "eigenspaces")
    classes = s.L.decomp.classes
    rep["details"] = {"classes": {_deg(c): [_vec(v) for v in vs] for c, vs in sorted(classes.items())}}
    rep["dimensions"] = {"classes": {_deg(c): len(vs) for c, vs in sorted(classes.items())}}
    rep["verdicts"] = {"complete": "PASS" if s.L.decomp.total_dim() == s.A.dim else "FAIL"}
    return rep, EXIT_PASS if rep["verdicts"]["complete"] == "PASS" else EXIT_FAIL


def cmd_multiloop_table(args) -> tuple:
    s = build_session(args, need_window=True)
    L, W = s.L, s.window
    rep = base_report(s, "multiloop-table")
    rep["dimensions"] = {"components": {_deg(a): d for a, d in L.component_table(W).items()}}
    rep["details"] = {"bases": {_deg(a): [_vec(v) for v in L.eigenbasis(a)] for a in W.degrees()}}
    rep["verdicts"] = {"closed": "PASS"}
    # closure of the grading on window products
    for a in W.degrees():
        for b in W.degrees():
            for x in L.graded_component_basis(a):
                for y in L.graded_component_basis(b):
                    if not L.is_valid(L.multiply(x, y, check=False)):
                        rep["verdicts"]["closed"] = "FAIL"
    return rep, EXIT_PASS if rep["verdicts"]["closed"] == "PASS" else EXIT_FAIL


def cmd_descent_compare(args) -> tuple:
    s = build_session(args, need_window=True)
    rep = base_report(s, "descent-compare")
    cmp = compare_with_multiloop(s.A, s.L.sigma, s.window, s.L.decomp)
    rep["verdicts"] = {"descent": "PASS" if cmp.agree else "FAIL"}
    rep["dimensions"] = {"fixed_points": {_deg(a): d for a, d in cmp.fixed_dims.items()},
                         "eigenspaces": {_deg(a): d for a, d in cmp.eigen_dims.items()}}
    rep["message"] = cmp.message()
    return rep, EXIT_PASS if cmp.agree else EXIT_FAIL


def cmd_verify_centroid(args) -> tuple:
    s = build_session(args, need_window=True)
    L, W = s.L, s.window
    rep = base_report(s, "verify-centroid")
    untwisted = all(x == 1 for x in s.moduli)
    factory = tensor_centroid_generators if untwisted else homothety_generators
    res = windowed_centroid(L, W, generator_factory=factory)
    rep["verdicts"] = {"span": "PASS" if res.match else "FAIL",
                       "degrees": "PASS" if res.degrees_match else "FAIL"}
    rep["dimensions"] = {"shifts": {_deg(k): c.solved for k, c in res.comparisons.items()}}
    rep["details"] = {"generators": "Ctd(A) (x) monomials" if untwisted else "monomial homotheties",
                      "nonzero_shifts": [_deg(x) for x in res.shifts_found]}
    return rep, EXIT_PASS if res.passed else EXIT_FAIL


def cmd_verify_derivations(args) -> tuple:
    s = build_session(args, need_window=True)
    rep = base_report(s, "verify-derivations")
    try:
        tr = verify_theorem(s.L, s.window, seed=s.seed, samples=args.samples, fixture=s.fixture)
    except HypothesisError as exc:
        rep["verdicts"] = {"hypotheses": "FAIL"}
        rep["notes"] = [str(exc)]
        return rep, EXIT_FAIL
    body = tr.to_json(timing=False)
    rep["verdicts"] = body["verdicts"]
    rep["dimensions"] = body["dimensions"]
    rep["notes"] = body["notes"]
    rep["runtime_seconds"] = tr.runtime
    return rep, EXIT_PASS if tr.passed else EXIT_FAIL


def _parse_pair(data: dict, L: Multiloop):
    m = L.m
    z = LoopElement({tuple(int(x) for x in k.split(",")): tuple(parse_cyc(c, m) for c in v)
                     for k, v in data.get("z", {}).items()})
    d_raw = data.get("d")
    if d_raw is None:
        d = LaurentDerivation.zero(L.moduli, m)
    else:
        if len(d_raw) != L.n:
            raise SpecError(f"'d' needs {L.n} coefficient lists")
        d = LaurentDerivation([parse_poly_json(c, L.moduli, m) for c in d_raw])
    if not L.is_valid(z):
        raise SpecError("'z' is not an element of the multiloop algebra")
    if not d.is_derivation_of_R():
        raise SpecError("'d' must have integral exponents (numerators divisible by the moduli)")
    return z, d


def cmd_decompose(args) -> tuple:
    s = build_session(args, need_window=True)
    L, W = s.L, s.window
    rep = base_report(s, "decompose")
    if args.input:
        try:
            data = json.loads(Path(args.input).read_text(encoding="utf-8"))
        except (OSError, json.JSONDecodeError) as exc:
            raise SpecError(f"cannot read {args.input}: {exc}") from None
        try:
            z, d = _parse_pair(data, L)
        except (ValueError, KeyError, TypeError, AttributeError) as exc:
            if isinstance(exc, SpecError):
                raise
            raise SpecError(f"{args.input}: {exc}") from None
    else:
        rng = random.Random(s.seed)
        z = L.random_element(rng, W.core_degrees(), density=0.4)
        d = random_derivation(rng, L.moduli, L.m)
    delta = ad(L, z, W) + rho(L, d, W)
    try:
        res = decompose(delta)
    except (EtaError, DecompositionError) as exc:
        rep["verdicts"] = {"decomposition": "FAIL"}
        rep["notes"] = [str(exc)]
        return rep, EXIT_FAIL
    core_z = z.restrict([a for a in z.degrees() if a in set(W.core_shifts())])
    round_trip = res.derivation == d and res.inner == core_z
    rep["verdicts"] = {
        "residual": "PASS" if res.residual_zero else "FAIL",
        "unique": "PASS" if res.unique else "INCONCLUSIVE",
        "round_trip": "PASS" if round_trip else "FAIL",
    }
    rep["details"] = {
        "input": {"z": loop_element_json(z), "d": d.to_json()},
        "output": {"z": loop_element_json(res.inner), "d": res.derivation.to_json()},
    }
    ok = res.residual_zero and res.unique and round_trip
    return rep, EXIT_PASS if ok else EXIT_FAIL


COMMANDS = {
    "check-algebra": cmd_check_algebra,
    "eigenspaces": cmd_eigenspaces,
    "multiloop-table": cmd_multiloop_table,
    "descent-compare": cmd_descent_compare,
    "verify-centroid": cmd_verify_centroid,
    "verify-derivations": cmd_verify_derivations,
    "decompose": cmd_decompose,
}


def make_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="loomalg", description="Exact multiloop algebra computations.")
    sub = p.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        sp = sub.add_parser(name)
        sp.add_argument("--algebra", required=True, help="algebra file")
        sp.add_argument("--sigma", help="automorphism file (default: identity per variable)")
        sp.add_argument("--m", help="orders m_1,...,m_n (default 1)")
        sp.add_argument("--window", help="window bounds B, one value or comma-separated (default 6)")
        sp.add_argument("--core", help="core bounds C (default floor(B/2))")
        sp.add_argument("--format", choices=("text", "json"), default="text")
        sp.add_argument("--out", help="write the report here instead of stdout")
        sp.add_argument("--seed", type=int, default=0, help="seed for sampled checks")
        sp.add_argument("--no-timing", action="store_true", help="omit runtime for byte-stable reports")
        if name == "verify-derivations":
            sp.add_argument("--samples", type=int, default=20, help="random identity samples")
        if name == "decompose":
            sp.add_argument("--input", help="JSON file with 'z' and 'd' (default: random pair from --seed)")
    return p


def run_command(argv: Sequence[str] | None = None, stdout=None, stderr=None) -> tuple:
    """Run one command; return (exit code, report dict or None)."""
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    parser = make_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0), None
    t0 = time.perf_counter()
    try:
        report, code = COMMANDS[args.command](args)
    except (SpecError, AlgebraError, SigmaError, EigenspaceError) as exc:
        print(f"loomalg: input error: {exc}", file=stderr)
        triple = getattr(exc, "triple", None)
        if triple is not None:
            print(f"loomalg: offending basis indices {tuple(triple)}", file=stderr)
        return EXIT_INPUT, None
    except InvariantError as exc:
        print(f"loomalg: invariant violated: {exc}", file=stderr)
        return EXIT_FAIL, None
    elapsed = report.pop("runtime_seconds", None)
    if elapsed is None:
        elapsed = time.perf_counter() - t0
    report["runtime"] = None if args.no_timing else f"{elapsed:.3f}s"
    text = dump_json(report) if args.format == "json" else render_text(report)
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8")
    else:
        stdout.write(text)
    return code, report


def main(argv: Sequence[str] | None = None) -> int:
    code, _ = run_command(argv)
    return code


if __name__ == "__main__":
    sys.exit(main())
