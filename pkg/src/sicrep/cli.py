"""Command line entry point: ``sicrep <command> [options]``.

Every command prints a JSON report to standard output (or writes it to
``--report``). Exit status: 0 pass, 1 check failure, 2 usage or configuration
error, 3 I/O or malformed input file.

Any flag can also be supplied through the environment as ``SICREP_<FLAG>``,
e.g. ``SICREP_SEED=7``; explicit flags take precedence.
"""

from __future__ import annotations

import argparse
import os
import sys
import time
from pathlib import Path

import numpy as np

from . import certainty, formats, representation, urtheory, whsic
from .hermitian import make_rng, random_ginibre_density, random_povm, trace_inner

EXIT_PASS = 0
EXIT_FAIL = 1
EXIT_USAGE = 2
EXIT_IO = 3

ENV_PREFIX = "SICREP_"
MIN_DIM, MAX_DIM = 2, 8


class UsageError(Exception):
    pass


class InputError(Exception):
    pass


def _env_default(name: str, cast=str, default=None):
    raw = os.environ.get(ENV_PREFIX + name.upper().replace("-", "_"))
    if raw is None:
        return default
    try:
        return cast(raw)
    except ValueError:
        raise UsageError(f"environment variable {ENV_PREFIX}{name.upper()} has bad value {raw!r}")


def _dim(value: str) -> int:
    d = int(value)
    if not MIN_DIM <= d <= MAX_DIM:
        raise argparse.ArgumentTypeError(f"dimension must be in [{MIN_DIM}, {MAX_DIM}], got {d}")
    return d


def _positive_int(value: str) -> int:
    k = int(value)
    if k < 1:
        raise argparse.ArgumentTypeError(f"expected an integer >= 1, got {k}")
    return k


def _positive_float(value: str) -> float:
    x = float(value)
    if not x > 0:
        raise argparse.ArgumentTypeError(f"expected a positive number, got {value}")
    return x


def _add(p, flag, env_cast, **kw):
    name = flag.lstrip("-")
    env = _env_default(name, env_cast)
    if env is not None:
        kw["default"] = env
        kw.pop("required", None)
    p.add_argument(flag, **kw)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="sicrep", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("sic-find", help="search for a SIC fiducial and write it to a file")
    _add(p, "--dim", _dim, type=_dim, required=True)
    _add(p, "--seed", int, type=int, required=True)
    _add(p, "--restarts", _positive_int, type=_positive_int, default=whsic.DEFAULT_RESTARTS)
    _add(p, "--tol", _positive_float, type=_positive_float, default=whsic.DEFAULT_TOL)
    _add(p, "--out", str, help="fiducial file to write")

    p = sub.add_parser("verify", help="check the SIC overlap condition for a fiducial file")
    _add(p, "--in", str, dest="infile", required=True)
    _add(p, "--tol", _positive_float, type=_positive_float, default=1e-9)

    p = sub.add_parser("check-state", help="test a probability vector for quantum validity")
    _add(p, "--in", str, dest="infile", required=True)
    _add(p, "--fiducial", str, required=True)
    _add(p, "--tol", _positive_float, type=_positive_float, default=1e-10)

    p = sub.add_parser("urgleichung", help="compare the Urgleichung with the Born rule")
    _add(p, "--dim", _dim, type=_dim)
    _add(p, "--seed", int, type=int)
    _add(p, "--samples", _positive_int, type=_positive_int, default=100)
    _add(p, "--alpha", float, type=float)
    _add(p, "--beta", float, type=float)
    p.add_argument("--classical", action="store_true", help="use alpha=1, beta=0")
    _add(p, "--in", str, dest="infile", help="probability-vector file (single instance)")
    _add(p, "--conditional", str, help="conditional-matrix file (single instance)")
    _add(p, "--tol", _positive_float, type=_positive_float, default=1e-12)

    p = sub.add_parser("certainty", help="build and check a certainty experiment")
    _add(p, "--dim", _dim, type=_dim, required=True)
    _add(p, "--seed", int, type=int)
    _add(p, "--align-index", int, type=int, default=1)
    _add(p, "--tol", _positive_float, type=_positive_float, default=1e-10)

    p = sub.add_parser("theory-table", help="exact table of the q-family of theories")
    _add(p, "--q-max", int, type=int, default=4)
    _add(p, "--m0-max", int, type=int, default=10)
    p.add_argument("--format", choices=["json", "text"], default="json")

    for action in sub.choices.values():
        _add(action, "--report", str, help="write the report here instead of stdout")
    return parser


# -- commands ---------------------------------------------------------------


def _load_sic(path) -> whsic.SicPovm:
    try:
        psi = formats.read_fiducial(path)
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc}")
    except formats.FormatError as exc:
        raise InputError(f"{path}: {exc}")
    return whsic.sic_from_fiducial(psi)


def _sic_for(d: int, seed) -> whsic.SicPovm:
    if d != 2 and seed is None:
        raise UsageError(f"--seed is required for d={d} (a SIC must be searched for)")
    return whsic.sic_for_dimension(d, seed)


def cmd_sic_find(args) -> tuple[dict, dict, bool, str]:
    config = {"dim": args.dim, "seed": args.seed, "restarts": args.restarts, "tol": args.tol}
    try:
        psi, rep = whsic.search_fiducial(args.dim, args.seed, args.restarts, args.tol)
    except whsic.SearchFailure as exc:
        metrics = exc.report.as_dict()
        metrics.pop("dim")
        metrics.pop("seed")
        if not np.isfinite(metrics["final_potential"]):
            metrics["final_potential"] = -1.0
        if not np.isfinite(metrics["deviation"]):
            metrics["deviation"] = -1.0
        return config, metrics, False, str(exc)
    sic = whsic.sic_from_fiducial(psi)
    check = whsic.verify_sic(sic, 1e-9)
    if args.out:
        try:
            formats.write_fiducial(args.out, psi, rep.final_potential, check["max_deviation"])
        except OSError as exc:
            raise InputError(f"cannot write {args.out}: {exc}")
    metrics = {
        "final_potential": rep.final_potential,
        "potential_minimum": whsic.potential_minimum(args.dim),
        "deviation": check["max_deviation"],
        "restarts_used": rep.restarts_used,
    }
    return config, metrics, check["pass"], ""


def cmd_verify(args):
    sic = _load_sic(args.infile)
    check = whsic.verify_sic(sic, args.tol)
    metrics = {"dim": sic.dim, "max_overlap_deviation": check["max_deviation"]}
    return {"in": args.infile, "tol": args.tol}, metrics, check["pass"], ""


def cmd_check_state(args):
    sic = _load_sic(args.fiducial)
    try:
        p = formats.read_prob_vector(args.infile)
    except OSError as exc:
        raise InputError(f"cannot read {args.infile}: {exc}")
    except formats.FormatError as exc:
        raise InputError(f"{args.infile}: {exc}")
    d = sic.dim
    if p.size != d * d:
        raise UsageError(f"vector has {p.size} entries but the SIC needs {d * d}")
    try:
        p = representation.as_prob_vector(p)
    except representation.ProbabilityError as exc:
        raise InputError(f"{args.infile}: {exc}")
    whsic.require_verified(sic)
    lam = representation.min_eigenvalue(p, sic)
    valid = lam >= -args.tol
    metrics = {"dim": d, "valid": valid, "min_eigenvalue": lam}
    if d <= representation.TRIPLE_DEFAULT_MAX_DIM:
        res2, res3 = representation.purity_residuals(p, representation.triple_products(sic), d)
        metrics["res2"] = res2
        metrics["res3"] = res3
    config = {"in": args.infile, "fiducial": args.fiducial, "tol": args.tol}
    return config, metrics, valid, ""


def _constants(args, n: int, d: int | None) -> tuple[float, float]:
    if args.classical:
        return 1.0, 0.0
    if args.alpha is not None or args.beta is not None:
        if args.alpha is None or args.beta is None:
            raise UsageError("--alpha and --beta must be given together")
        alpha, beta = args.alpha, args.beta
    elif d is not None:
        alpha, beta = d + 1.0, 1.0 / d
    else:
        root = int(round(np.sqrt(n)))
        if root * root != n:
            raise UsageError(f"n={n} is not a square; give --alpha and --beta")
        alpha, beta = root + 1.0, 1.0 / root
    if abs(alpha - (n * beta + 1)) > 1e-12:
        raise UsageError(f"alpha = n beta + 1 violated (alpha={alpha}, beta={beta}, n={n})")
    return alpha, beta


def _urgleichung_single(args):
    try:
        p = formats.read_prob_vector(args.infile)
        r = formats.read_conditional(args.conditional)
    except OSError as exc:
        raise InputError(str(exc))
    except formats.FormatError as exc:
        raise InputError(str(exc))
    try:
        p = representation.as_prob_vector(p)
        r = representation.ConditionalMatrix(r)
    except ValueError as exc:
        raise InputError(str(exc))
    if r.sky_outcomes != p.size:
        raise UsageError(f"vector length {p.size} != sky outcomes {r.sky_outcomes}")
    alpha, beta = _constants(args, p.size, None)
    q = representation.urgleichung_raw(p, r, alpha, beta)
    s = representation.total_probability(p, r)
    ok = representation.urungleichung_check(p, r, alpha, beta, args.tol)
    metrics = {
        "alpha": alpha,
        "beta": beta,
        "q": q.tolist(),
        "s": s.tolist(),
        "urungleichung_holds": ok,
        "max_gap": float(np.max(np.abs(s - q))),
    }
    config = {"in": args.infile, "conditional": args.conditional, "classical": args.classical}
    return config, metrics, ok, ""


def cmd_urgleichung(args):
    if args.infile or args.conditional:
        if not (args.infile and args.conditional):
            raise UsageError("--in and --conditional must be given together")
        return _urgleichung_single(args)
    if args.dim is None or args.seed is None:
        raise UsageError("sampling mode needs --dim and --seed")
    d = args.dim
    sic = _sic_for(d, args.seed)
    alpha, beta = _constants(args, d * d, d)
    rng = make_rng(args.seed)
    max_born = 0.0
    max_gap = 0.0
    n_ok = 0
    for _ in range(args.samples):
        rho = random_ginibre_density(d, int(rng.integers(2**62)))
        m = int(rng.integers(2, d * d + 1))
        ground = random_povm(d, m, int(rng.integers(2**62)))
        p = representation.state_to_probs(rho, sic)
        r = representation.conditional_matrix(ground, sic)
        q = representation.urgleichung_raw(p, r, alpha, beta)
        s = representation.total_probability(p, r)
        born = np.array([trace_inner(rho, f).real for f in ground])
        max_born = max(max_born, float(np.max(np.abs(q - born))))
        max_gap = max(max_gap, float(np.max(np.abs(s - q))))
        if representation.urungleichung_check(p, r, alpha, beta, args.tol):
            n_ok += 1
    rate = n_ok / args.samples
    metrics = {"alpha": alpha, "beta": beta, "urungleichung_pass_rate": rate, "max_gap": max_gap}
    if args.classical:
        passed = max_gap == 0.0 and rate == 1.0
    else:
        metrics["max_abs_q_minus_born"] = max_born
        passed = max_born < args.tol and rate == 1.0
    config = {
        "dim": d,
        "seed": args.seed,
        "samples": args.samples,
        "classical": args.classical,
        "tol": args.tol,
    }
    return config, metrics, passed, ""


def cmd_certainty(args):
    d = args.dim
    sic = _sic_for(d, args.seed)
    if not 1 <= args.align_index <= d * d:
        raise UsageError(f"--align-index must be in 1..{d * d}")
    try:
        exp = certainty.build_certainty_experiment(sic, args.align_index)
    except certainty.CertaintyError as exc:
        return {"dim": d, "seed": args.seed}, {"constructed": False}, False, str(exc)
    gram = certainty.gram_matrix(exp)
    gram_dev = float(np.max(np.abs(gram - certainty.predicted_gram(d, d * d, d + 1.0, 1.0 / d))))
    cos = certainty.universal_angle(exp)
    residual = certainty.certainty_residual(exp)
    isu = certainty.isu_check(exp.conditional)
    metrics = {
        "gram_deviation": gram_dev,
        "cos_theta": cos,
        "cos_theta_closed_form": certainty.angle_closed_form(d * d, d),
        "certainty_residual": residual,
        "isu_deviation": isu["max_deviation"],
    }
    tol = args.tol
    passed = gram_dev < tol and abs(cos - 0.5) < tol and residual < tol and isu["max_deviation"] < tol
    config = {"dim": d, "seed": args.seed, "align_index": args.align_index, "tol": tol}
    return config, metrics, passed, ""


def cmd_theory_table(args):
    if args.q_max < 0 or args.m0_max < 2:
        raise UsageError("need --q-max >= 0 and --m0-max >= 2")
    rows = urtheory.q_family_table(args.q_max, args.m0_max)
    mismatches = urtheory.verify_dimension_lemma(args.q_max, args.m0_max)
    ok = not mismatches
    for row in rows:
        try:
            row.check()
        except ValueError:
            ok = False
    metrics = {"rows": len(rows), "scan_mismatches": len(mismatches)}
    config = {"q_max": args.q_max, "m0_max": args.m0_max}
    table = [row.as_dict() for row in rows]
    return config, metrics, ok, table


def format_table(table: list[dict]) -> str:
    header = ("q", "m0", "n", "alpha", "beta")
    cells = [header] + [tuple(str(row[k]) for k in header) for row in table]
    widths = [max(len(c[i]) for c in cells) for i in range(len(header))]
    lines = ["  ".join(c[i].rjust(widths[i]) for i in range(len(header))) for c in cells]
    return "\n".join(lines) + "\n"


COMMANDS = {
    "sic-find": cmd_sic_find,
    "verify": cmd_verify,
    "check-state": cmd_check_state,
    "urgleichung": cmd_urgleichung,
    "certainty": cmd_certainty,
    "theory-table": cmd_theory_table,
}


def _emit(text: str, path) -> None:
    if path:
        try:
            Path(path).write_text(text)
        except OSError as exc:
            raise InputError(f"cannot write {path}: {exc}")
    else:
        sys.stdout.write(text)


def main(argv=None) -> int:
    try:
        parser = build_parser()
    except UsageError as exc:
        print(f"sicrep: {exc}", file=sys.stderr)
        return EXIT_USAGE
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code is not None else EXIT_USAGE
    start = time.perf_counter()
    try:
        config, metrics, passed, extra = COMMANDS[args.command](args)
        elapsed = time.perf_counter() - start
        doc = formats.report_document(args.command, config, metrics, passed, elapsed)
        if args.command == "theory-table":
            doc["table"] = extra
            if args.format == "text":
                _emit(format_table(extra), args.report)
                return EXIT_PASS if passed else EXIT_FAIL
        elif extra:
            doc["message"] = extra
        _emit(formats.dumps(doc), args.report)
    except UsageError as exc:
        print(f"sicrep: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except InputError as exc:
        print(f"sicrep: {exc}", file=sys.stderr)
        return EXIT_IO
    except ValueError as exc:
        print(f"sicrep: {exc}", file=sys.stderr)
        return EXIT_FAIL
    return EXIT_PASS if passed else EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
