"""Command line driver: ``novikov-fibring {check,sphere,primes,oracle,verify}``.

Structured results are JSON (keys sorted, two-space indent) so that repeated
runs are byte-identical once the ``timings`` key is dropped.  A short
human-readable summary goes to stdout when ``--out`` names the JSON file,
and to stderr otherwise.

Exit codes: 0 fibred, 1 not fibred, 2 inconclusive, 3 usage or validation error,
4 file system error.
"""
from __future__ import annotations

import argparse
import csv
import hashlib
import json
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from importlib import metadata, resources
from pathlib import Path

from .chain import load_resolution, parse_resolution, presentation_complex
from .coefficients import CoefficientRing, parse_field
from .errors import AssumptionMissing, NovikovError, OracleNotApplicable
from .fibring import (
    Budget,
    Verdict,
    certificate_from_json,
    extract_primes,
    primitive_characters,
    sikorav_verdict,
    verify_certificate,
)
from .groupring import GroupRing
from .oracle import brown_sigma
from .presentation import Character, Presentation, parse_character, parse_presentation

EXIT_USAGE = 3
EXIT_ERROR = 4


def _version() -> str:
    try:
        return metadata.version("artifact")
    except metadata.PackageNotFoundError:
        return "0.0.0"


def corpus_path(name: str) -> Path:
    """Path of a shipped corpus file, e.g. ``corpus_path("trefoil.grp")``."""
    return Path(str(resources.files("novikov_fibring") / "corpus" / name))


def read_input(path: str) -> str:
    """Read a file; ``corpus:<name>`` reads a shipped corpus file."""
    if path.startswith("corpus:"):
        name = path[len("corpus:"):]
        if "." not in name:
            name += ".grp"
        return corpus_path(name).read_text(encoding="utf-8")
    return Path(path).read_text(encoding="utf-8")


def _sha(text: str) -> str:
    return hashlib.sha256(text.encode("utf-8")).hexdigest()


# ------------------------------------------------------------ assumptions


@dataclass(frozen=True)
class Assumptions:
    """User-asserted hypotheses; never computed or checked here."""

    duality_dimension: int | None = None
    h2_vanishes: bool = False

    def __post_init__(self):
        if self.duality_dimension is not None and self.duality_dimension < 3:
            raise ValueError("--assume-duality-dim must be at least 3")

    @property
    def any(self) -> bool:
        return self.duality_dimension is not None or self.h2_vanishes

    def to_json(self) -> dict:
        return {
            "duality_dimension": self.duality_dimension,
            "h2_vanishes": self.h2_vanishes,
            "status": "assumed, not verified",
        }


def ends_report(verdict: Verdict, assumptions: Assumptions) -> list:
    """Consequences for the ends of the kernel, conditional on asserted hypotheses.

    Nothing is emitted without assumptions.  Any statement requires a
    fibred verdict in degree at least one.
    """
    if not assumptions.any:
        return []
    if verdict.kind != "FibredFPn" or verdict.degree < 1:
        raise AssumptionMissing(
            f"end statements need a fibred verdict in degree >= 1, got {verdict.label}"
        )
    n = verdict.degree
    out = []
    if assumptions.h2_vanishes:
        out.append(
            "Assumed, not verified: H^2(G; KG) = 0. "
            "Since the kernel K of phi is finitely generated, K has at most one end."
        )
    if assumptions.duality_dimension is not None:
        d = assumptions.duality_dimension
        out.append(
            f"Assumed, not verified: G is a duality group of dimension {d} >= 3. "
            "Since the kernel K of phi is finitely generated, K has only one end."
        )
        out.append(
            f"Assumed, not verified: with K of type FP_{n}, H^(i+1)(G; RG) is isomorphic "
            f"to H^i(K; RK) as RK-modules for all i < {n}."
        )
    return out


# ------------------------------------------------------------------- setup


def _load_setup(args):
    text = read_input(args.presentation)
    p = parse_presentation(text)
    coeffs = parse_field(args.field)
    ring = GroupRing.of(p, coeffs)
    inputs = {"presentation": args.presentation, "presentation_sha256": _sha(text), "field": str(coeffs)}
    if args.resolution:
        rtext = read_input(args.resolution)
        c = parse_resolution(rtext, ring)
        inputs["resolution"] = args.resolution
        inputs["resolution_sha256"] = _sha(rtext)
    else:
        c = presentation_complex(p, ring=ring)
    if args.degree > c.max_certifiable_degree():
        raise _Usage(
            f"degree {args.degree} needs a resolution (this complex supports degree <= {c.max_certifiable_degree()})"
        )
    if args.degree < 0:
        raise _Usage("degree must be non-negative")
    return p, coeffs, c, inputs


class _Usage(Exception):
    pass


def _budget(args) -> Budget:
    if args.precision_budget < 0:
        raise _Usage("--precision-budget must be non-negative")
    return Budget(precision=args.precision_budget)


def _header(command: str) -> dict:
    return {"tool": {"name": "novikov-fibring", "version": _version()}, "command": command}


def _prime_reports(v: Verdict, c) -> dict:
    out = {}
    for d in (v.plus, v.minus):
        if d.certified and d.certificate.coeffs.kind == "Q":
            out["+" if d.sign > 0 else "-"] = extract_primes(d.certificate, c).to_json()
    return out


# --------------------------------------------------------------- commands


def run_check(args) -> tuple[dict, str, int]:
    t0 = time.perf_counter()
    p, coeffs, c, inputs = _load_setup(args)
    phi = parse_character(args.char, p)
    assumptions = Assumptions(args.assume_duality_dim, args.assume_h2_zero)
    budget = _budget(args)
    t1 = time.perf_counter()
    v = sikorav_verdict(p, phi, coeffs, args.degree, budget, c)
    t2 = time.perf_counter()
    statements = ends_report(v, assumptions) if assumptions.any else []
    report = _header("check")
    report.update(
        {
            "inputs": {**inputs, "character": phi.format(p), "degree": args.degree},
            "budget": budget.to_json(),
            "result": v.to_json(include_certificates=not args.no_certificates),
            "primes": _prime_reports(v, c),
            "assumptions": assumptions.to_json(),
            "statements": statements,
            "timings": {"setup_seconds": t1 - t0, "search_seconds": t2 - t1},
        }
    )
    summary = f"{p.name or args.presentation} phi=({phi.format(p)}) over {coeffs}: {v.label}"
    if v.kind != "FibredFPn":
        summary += " [" + "; ".join(v.notes) + "]"
    for s in statements:
        summary += "\n  " + s
    return report, summary, v.exit_code


def _sphere_job(job):
    ptext, rtext, field, values, n, precision = job
    p = parse_presentation(ptext)
    coeffs = parse_field(field)
    ring = GroupRing.of(p, coeffs)
    c = parse_resolution(rtext, ring) if rtext else presentation_complex(p, ring=ring)
    v = sikorav_verdict(p, Character(tuple(values)), coeffs, n, Budget(precision=precision), c)
    return v.to_json(include_certificates=False)


def run_sphere(args) -> tuple[dict, str, int]:
    t0 = time.perf_counter()
    if args.grid < 1:
        raise _Usage("--grid must be at least 1")
    p, coeffs, c, inputs = _load_setup(args)
    budget = _budget(args)
    chars = primitive_characters(p, args.grid)
    if not chars:
        from .errors import NoCharacters

        raise NoCharacters("no nonzero integral character vanishes on every relator")
    if args.jobs > 1:
        ptext = read_input(args.presentation)
        rtext = read_input(args.resolution) if args.resolution else None
        jobs = [(ptext, rtext, str(coeffs), ch.values, args.degree, budget.precision) for ch in chars]
        with ProcessPoolExecutor(max_workers=args.jobs) as pool:
            rows = list(pool.map(_sphere_job, jobs))
    else:
        rows = [sikorav_verdict(p, ch, coeffs, args.degree, budget, c).to_json(False) for ch in chars]
    t1 = time.perf_counter()
    counts: dict[str, int] = {}
    for r in rows:
        counts[r["verdict"]] = counts.get(r["verdict"], 0) + 1
    report = _header("sphere")
    report.update(
        {
            "inputs": {**inputs, "grid": args.grid, "degree": args.degree},
            "budget": budget.to_json(),
            "characters": rows,
            "counts": dict(sorted(counts.items())),
            "timings": {"total_seconds": t1 - t0},
        }
    )
    if args.csv:
        with open(args.csv, "w", newline="", encoding="utf-8") as fh:
            w = csv.writer(fh)
            w.writerow([*p.generators, "verdict", "plus_certified", "minus_certified"])
            for r in rows:
                w.writerow([*r["character"], r["verdict"], r["plus"]["certified"], r["minus"]["certified"]])
    lines = [f"{p.name or args.presentation}: {len(rows)} characters (grid {args.grid}, one per antipodal pair)"]
    for r in rows:
        ch = ",".join(f"{g}={x}" for g, x in zip(p.generators, r["character"]))
        sides = ("+" if r["plus"]["certified"] else ".") + ("-" if r["minus"]["certified"] else ".")
        lines.append(f"  ({ch}) {r['verdict']} certified[{sides}]")
    kinds = {r["verdict"] for r in rows}
    code = 0 if all(k.startswith("FibredFP") for k in kinds) else (1 if "Inconclusive" not in kinds else 2)
    return report, "\n".join(lines), code


def _load_certificate(path: str):
    data = json.loads(Path(path).read_text(encoding="utf-8"))
    # accept either a bare certificate or a check report
    if "s_matrices" not in data:
        res = data.get("result", {})
        for side in ("plus", "minus"):
            if "certificate" in res.get(side, {}):
                data = res[side]["certificate"]
                break
        else:
            raise NovikovError("no certificate found in file")
    return certificate_from_json(data)


def run_verify(args) -> tuple[dict, str, int]:
    cert, c = _load_certificate(args.certificate)
    ok = verify_certificate(c, cert)
    report = _header("verify")
    report.update(
        {
            "inputs": {"certificate": args.certificate},
            "ring": str(cert.coeffs),
            "character": list(cert.phi.full_values),
            "degree": cert.degree,
            "verified": ok,
        }
    )
    summary = f"certificate {'verifies' if ok else 'does NOT verify'} (degree {cert.degree}, ring {cert.coeffs})"
    return report, summary, 0 if ok else 2


def run_primes(args) -> tuple[dict, str, int]:
    cert, c = _load_certificate(args.certificate)
    pr = extract_primes(cert, c, samples=args.samples)
    report = _header("primes")
    report.update({"inputs": {"certificate": args.certificate}, **pr.to_json()})
    ok = pr.localized_verified and all(v for _, v in pr.reductions)
    reds = ", ".join(f"F_{q}: {'ok' if v else 'FAIL'}" for q, v in pr.reductions)
    summary = f"primes {{{', '.join(map(str, pr.primes))}}}; Z_P: {'ok' if pr.localized_verified else 'FAIL'}; {reds}"
    return report, summary, 0 if ok else 2


def run_oracle_brown(args) -> tuple[dict, str, int]:
    text = read_input(args.presentation)
    p = parse_presentation(text)
    phi = parse_character(args.char, p)
    m = brown_sigma(p, phi)
    report = _header("oracle brown")
    report.update({"inputs": {"presentation": args.presentation, "character": phi.format(p)}, **m.to_json()})
    summary = (
        f"[phi] in Sigma: {m.in_sigma_plus}; [-phi] in Sigma: {m.in_sigma_minus}; "
        f"kernel finitely generated: {m.kernel_finitely_generated}"
    )
    return report, summary, 0 if m.kernel_finitely_generated else 1


# ----------------------------------------------------------------- parser


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _common(sp, need_char=True):
    sp.add_argument("--presentation", required=True, help="presentation file, or corpus:<name>")
    if need_char:
        sp.add_argument("--char", required=True, help="character, e.g. a=1,b=0")
    sp.add_argument("--field", default="Q", help="Q | Fp:<p> | Z | Zloc:<p1,p2,...>")
    sp.add_argument("--degree", type=int, default=1)
    sp.add_argument("--precision-budget", type=int, default=8)
    sp.add_argument("--resolution", help="resolution file extending the presentation complex")
    sp.add_argument("--out", help="write the JSON report here")


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="novikov-fibring", description="Certify Novikov acyclicity and decide FP_n fibring.")
    ap.add_argument("--version", action="version", version=_version())
    sub = ap.add_subparsers(dest="command", required=True, parser_class=_Parser)

    sp = sub.add_parser("check", help="verdict for one character")
    _common(sp)
    sp.add_argument("--assume-duality-dim", type=int, default=None)
    sp.add_argument("--assume-h2-zero", action="store_true")
    sp.add_argument("--no-certificates", action="store_true", help="omit certificate matrices from the report")
    sp.set_defaults(func=run_check)

    sp = sub.add_parser("sphere", help="verdicts on a grid of characters")
    _common(sp, need_char=False)
    sp.add_argument("--grid", type=int, default=1)
    sp.add_argument("--jobs", type=int, default=1)
    sp.add_argument("--csv", help="also write a CSV point cloud")
    sp.set_defaults(func=run_sphere)

    sp = sub.add_parser("primes", help="prime set of a rational certificate")
    sp.add_argument("--certificate", required=True)
    sp.add_argument("--samples", type=int, default=3)
    sp.add_argument("--out")
    sp.set_defaults(func=run_primes)

    sp = sub.add_parser("verify", help="re-verify a certificate file")
    sp.add_argument("--certificate", required=True)
    sp.add_argument("--out")
    sp.set_defaults(func=run_verify)

    sp = sub.add_parser("oracle", help="independent oracles")
    osub = sp.add_subparsers(dest="oracle", required=True, parser_class=_Parser)
    bp = osub.add_parser("brown", help="Brown's criterion for two-generator one-relator groups")
    bp.add_argument("--presentation", required=True)
    bp.add_argument("--char", required=True)
    bp.add_argument("--out")
    bp.set_defaults(func=run_oracle_brown)
    return ap


def dumps(report: dict) -> str:
    return json.dumps(report, sort_keys=True, indent=2) + "\n"


def main(argv=None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:  # --help, --version and usage errors
        return exc.code if isinstance(exc.code, int) else EXIT_USAGE
    try:
        report, summary, code = args.func(args)
    except (_Usage, ValueError) as exc:
        print(f"novikov-fibring: usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OracleNotApplicable as exc:
        print(dumps({"error": {"code": exc.code, "message": str(exc)}}), end="", file=sys.stderr)
        return EXIT_USAGE
    except NovikovError as exc:
        print(dumps({"error": {"code": exc.code, "message": str(exc)}}), end="", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"novikov-fibring: {exc}", file=sys.stderr)
        return EXIT_ERROR
    text = dumps(report)
    if getattr(args, "out", None):
        Path(args.out).write_text(text, encoding="utf-8")
        print(summary)
    else:
        sys.stdout.write(text)
        print(summary, file=sys.stderr)
    return code


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
