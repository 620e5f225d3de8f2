"""Command-line front end.

Stages hand off through JSON files so each can be rerun on its own:

    maxload exact --n 3 --r 1 --t-max 120 --out seq.json
    maxload guess seq.json --max-order 8 --max-degree 8 --out rec.json
    maxload eval rec.json --t-max 1048576 --samples ladder --out samples.json
    maxload cconst --rec rec.json
    maxload pipeline --n 3 --r 1

Every JSON artifact is deterministic for fixed flags; run metadata (command
line, input digests, version, timestamps) goes to ``<out>.manifest.json``
beside it.
"""

from __future__ import annotations

import argparse
import datetime
import hashlib
import itertools
import json
import math
import sys
from pathlib import Path

import gmpy2

from . import __version__, asymptotics, evaluate, exact, guess, io, simulate
from .errors import (
    FileFormatError,
    InsufficientTermsError,
    PrecisionLossError,
    ResourceCeilingError,
    SingularLeadingCoefficientError,
)

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_USAGE = 2
EXIT_GUESS_EXHAUSTED = 3
EXIT_CEILING = 4
EXIT_PRECISION = 5
EXIT_BAD_INPUT = 6

EPILOG = """exit codes:
  0  success
  1  other error
  2  invalid arguments
  3  recurrence search exhausted without a certified operator
  4  resource ceiling refused the computation
  5  two working precisions disagreed on fewer than 6 digits
  6  invalid input file
"""

DEFAULT_TOP = 2**20
DEFAULT_RUNGS = 11


class _Run:
    """Collects what goes into a manifest."""

    def __init__(self, argv):
        self.argv = list(argv)
        self.inputs = {}
        self.started = _now()

    def read(self, path):
        data = Path(path).read_bytes()
        self.inputs[str(path)] = hashlib.sha256(data).hexdigest()
        return path

    def emit(self, obj, out, extra=None):
        self.emit_text(io.dumps(obj), out, extra)

    def emit_text(self, text, out, extra=None):
        if out is None or str(out) == "-":
            sys.stdout.write(text)
            return
        out = Path(out)
        out.write_text(text)
        manifest = {
            "command": ["maxload"] + self.argv,
            "inputs": self.inputs,
            "version": __version__,
            "started": self.started,
            "finished": _now(),
        }
        if extra:
            manifest.update(extra)
        Path(str(out) + ".manifest.json").write_text(io.dumps(manifest))


def _now():
    return datetime.datetime.now(datetime.timezone.utc).isoformat(timespec="seconds")


def _spec(args):
    try:
        return exact.ProblemSpec(args.n, args.r)
    except ValueError as exc:
        raise SystemExit(_usage_error(str(exc)))


def _usage_error(msg):
    print(f"maxload: error: {msg}", file=sys.stderr)
    return EXIT_USAGE


def residue_ladder(n: int, top: int = DEFAULT_TOP, rungs: int = DEFAULT_RUNGS) -> list:
    """Doubling ladder of ``rungs`` multiples of n ending at the largest n * 2**j <= top.

    Keeping every rung a multiple of n pins T mod n, which keeps periodic
    lower-order terms from alternating along the ladder.
    """
    if top < n:
        raise ValueError(f"ladder top {top} is below n={n}")
    j = (top // n).bit_length() - 1
    return asymptotics.ladder(n << max(j - rungs + 1, 0), n << j)


# --- subcommands -----------------------------------------------------------


def cmd_exact(args, run):
    spec = _spec(args)
    seq = exact.a_sequence(spec, args.t_max, ceiling=args.ceiling)
    run.emit(io.sequence_to_json(seq), args.out)
    return EXIT_OK


def cmd_pmf(args, run):
    spec = _spec(args)
    state = exact.initial_state(spec)
    for _ in range(args.t):
        state = exact.step(state, spec)
        if len(state) > args.ceiling:
            raise ResourceCeilingError(f"{len(state)} states exceed the ceiling {args.ceiling}")
    run.emit(io.pmf_to_json(spec, exact.max_pmf(state, spec)), args.out)
    return EXIT_OK


def _guess_text(rep, spec):
    lines = []
    name = f"A({spec.n},{spec.r};T)" if spec else "A(T)"
    # runs of the same outcome (usually "empty nullspace") share one line
    for _, group in itertools.groupby(rep.search_trace, key=lambda step: step[2]):
        group = list(group)
        (d, e, outcome), (d2, e2, _) = group[0], group[-1]
        if len(group) == 1:
            lines.append(f"  order {d:2d} degree {e:2d}: {outcome}")
        else:
            lines.append(f"  order {d:2d} degree {e:2d} .. order {d2:2d} degree {e2:2d} ({len(group)} ansatzes): {outcome}")
    if rep.found:
        op = rep.operator
        lines.append(
            f"{name}: order {op.order}, degree {op.degree}, valid for T > {op.valid_from}, "
            f"{rep.terms_used} terms fitted, {rep.terms_verified} verified"
        )
        for i, p in enumerate(op.polys):
            lines.append(f"  p{i}(T) = {format_poly(p)}")
    else:
        lines.append(f"{name}: no recurrence found")
    return "\n".join(lines) + "\n"


def format_poly(coeffs, var="T"):
    terms = []
    for j in range(len(coeffs) - 1, -1, -1):
        c = coeffs[j]
        if c == 0:
            continue
        mag = abs(c)
        if j == 0:
            body = str(mag)
        else:
            body = (str(mag) + "*" if mag != 1 else "") + (var if j == 1 else f"{var}**{j}")
        terms.append(("-" if c < 0 else "+", body))
    if not terms:
        return "0"
    first_sign, first = terms[0]
    out = ("-" if first_sign == "-" else "") + first
    for sign, body in terms[1:]:
        out += f" {sign} {body}"
    return out


def cmd_guess(args, run):
    seq = io.load_sequence(run.read(args.sequence))
    finder = guess.search_stable if args.stable else guess.search
    rep = finder(seq, args.max_order, args.max_degree, args.holdout, args.margin, method=args.method)
    out = sys.stderr if args.out in (None, "-") else sys.stdout
    out.write(_guess_text(rep, seq.spec))
    if not rep.found:
        return EXIT_GUESS_EXHAUSTED
    obj = io.recurrence_to_json(rep.operator, seq.spec)
    obj["trace"] = [[d, e, o] for d, e, o in rep.search_trace]
    obj["termsUsed"] = rep.terms_used
    obj["termsVerified"] = rep.terms_verified
    run.emit(obj, args.out)
    return EXIT_OK


def _parse_samples(text, t_max, n):
    if text in (None, "end"):
        return [t_max]
    if text == "ladder":
        return residue_ladder(n or 1, t_max)
    return sorted({int(x) for x in text.split(",") if x})


def samples_json(spec, result: evaluate.EvaluationResult) -> dict:
    records = []
    digits = int(result.bits * math.log10(2)) if result.bits else None
    for t in sorted(result.values):
        v = result.values[t]
        rec = {"T": t, "kind": result.kind}
        if result.kind == "exact":
            rec["value"] = io.format_rational(v)
        else:
            rec["value"] = evaluate.format_float(v, digits)
            if t in result.agreed_digits:
                rec["agreedDigits"] = result.agreed_digits[t]
        records.append(rec)
    return {
        "n": spec.n if spec else None,
        "r": spec.r if spec else None,
        "kind": result.kind,
        "bits": result.bits,
        "samples": records,
    }


def samples_from_json(obj):
    """(T, value) pairs; exact values as Fraction, float values as mpfr."""
    if not isinstance(obj, dict) or "samples" not in obj:
        raise FileFormatError("samples file needs a 'samples' list")
    bits = obj.get("bits") or asymptotics.WORKING_BITS
    out = []
    for rec in obj["samples"]:
        if rec.get("kind") == "exact":
            out.append((int(rec["T"]), io.parse_rational(rec["value"])))
        else:
            out.append((int(rec["T"]), gmpy2.mpfr(rec["value"], bits)))
    return out


def cmd_eval(args, run):
    spec, op = io.load_recurrence(run.read(args.recurrence))
    sample_at = _parse_samples(args.samples, args.t_max, spec.n if spec else 1)
    if args.exact:
        full = evaluate.extend_exact(op, args.t_max, ceiling=args.exact_ceiling)
        result = evaluate.EvaluationResult({t: full.values[t] for t in sample_at}, "exact")
    else:
        policy = evaluate.PrecisionPolicy(args.precision, not args.no_double_check)
        result = evaluate.extend_float(op, args.t_max, policy, sample_at, strict=True)
    run.emit(samples_json(spec, result), args.out)
    return EXIT_OK


def _fit_from_recurrence(spec, op, top, depth, precision, rungs):
    rungs_t = residue_ladder(spec.n if spec else 1, top, rungs)
    policy = evaluate.PrecisionPolicy(precision, True)
    result = evaluate.extend_float(op, rungs_t[-1], policy, rungs_t, strict=True)
    fit = asymptotics.estimate_constant([(t, result.values[t]) for t in rungs_t], depth)
    return fit, result


def _report_out(records, fmt, out, run, digits):
    if fmt == "table":
        run.emit_text(asymptotics.comparison_table(records, digits), out)
    else:
        run.emit({"comparison": asymptotics.comparison_json(records, digits)}, out)


def cmd_cconst(args, run):
    if bool(args.rec) == bool(args.seq):
        return _usage_error("give exactly one of --rec or --seq")
    if args.rec:
        spec, op = io.load_recurrence(run.read(args.rec))
        if spec is None:
            raise FileFormatError("recurrence file lacks n and r")
        fit, _ = _fit_from_recurrence(spec, op, args.top, args.depth, args.precision, args.rungs)
    else:
        seq = io.load_sequence(run.read(args.seq))
        spec = seq.spec
        rungs_t = residue_ladder(spec.n, min(args.top, len(seq.values)), args.rungs)
        fit = asymptotics.estimate_constant([(t, seq[t]) for t in rungs_t], min(args.depth, len(rungs_t) - 1))
    _report_out([asymptotics.compare_report(spec, fit)], args.format, args.out, run, args.digits)
    return EXIT_OK


def cmd_compare(args, run):
    records = []
    for path in args.recurrences:
        spec, op = io.load_recurrence(run.read(path))
        if spec is None:
            raise FileFormatError(f"{path}: recurrence file lacks n and r")
        fit, _ = _fit_from_recurrence(spec, op, args.top, args.depth, args.precision, args.rungs)
        records.append(asymptotics.compare_report(spec, fit))
    _report_out(records, args.format, args.out, run, args.digits)
    return EXIT_OK


def cmd_simulate(args, run):
    spec = _spec(args)
    cfg = simulate.SimConfig(spec, args.t, args.samples, args.seed)
    res = simulate.run(cfg, workers=args.threads)
    run.emit(res.to_json(), args.out, extra={"wallClockSeconds": round(res.elapsed, 3)})
    return EXIT_OK


def cmd_heuristic(args, run):
    spec = _spec(args)
    value = exact.heuristic_constant(spec, dps=args.digits + 5)
    import mpmath

    sys.stdout.write(mpmath.nstr(value, args.digits) + "\n")
    return EXIT_OK


def cmd_pipeline(args, run):
    spec = _spec(args)
    outdir = Path(args.out_dir) if args.out_dir else None
    if outdir:
        outdir.mkdir(parents=True, exist_ok=True)

    def emit(obj, name):
        if outdir:
            run.emit(obj, outdir / name)

    seq = exact.a_sequence(spec, args.terms, ceiling=args.ceiling)
    emit(io.sequence_to_json(seq), "sequence.json")
    lines = [f"case (n={spec.n}, r={spec.r}): exact A(T) for T = 1..{args.terms}"]

    if spec.degenerate or spec.n == 1 or all(v == 0 for v in seq.values):
        lines.append("degenerate: A(T) = 0 for every T; no asymptotic constant")
        summary = {"n": spec.n, "r": spec.r, "degenerate": True}
        emit(summary, "report.json")
        text = "\n".join(lines) + "\n"
        sys.stdout.write(text if args.format == "table" else io.dumps(summary))
        return EXIT_OK

    rep = guess.search_stable(seq, args.max_order, args.max_degree, args.holdout)
    lines.append(_guess_text(rep, spec).rstrip("\n"))
    if not rep.found:
        sys.stdout.write("\n".join(lines) + "\n")
        return EXIT_GUESS_EXHAUSTED
    op = rep.operator
    emit(io.recurrence_to_json(op, spec), "recurrence.json")

    fit, result = _fit_from_recurrence(spec, op, args.top, args.depth, args.precision, args.rungs)
    emit(samples_json(spec, result), "samples.json")
    record = asymptotics.compare_report(spec, fit)
    emit({"comparison": asymptotics.comparison_json([record], args.digits)}, "comparison.json")
    lines.append(f"evaluated to T = {max(result.values)} at {args.precision} bits, "
                 f"agreement >= {result.min_agreed} digits")
    lines.append(asymptotics.comparison_table([record], args.digits).rstrip("\n"))
    summary = {
        "n": spec.n,
        "r": spec.r,
        "degenerate": False,
        "order": op.order,
        "degree": op.degree,
        "validFrom": op.valid_from,
        "comparison": asymptotics.comparison_json([record], args.digits)[0],
    }
    emit(summary, "report.json")
    if args.format == "table":
        sys.stdout.write("\n".join(lines) + "\n")
    else:
        sys.stdout.write(io.dumps(summary))
    return EXIT_OK


# --- argument parsing ------------------------------------------------------


def _add_spec(p):
    p.add_argument("--n", type=int, required=True, help="number of bins")
    p.add_argument("--r", type=int, required=True, help="balls per round, each to a different bin")


def _add_ceiling(p):
    p.add_argument(
        "--ceiling",
        type=int,
        default=exact.DEFAULT_STATE_CEILING,
        help=f"refuse runs needing more live states than this (default {exact.DEFAULT_STATE_CEILING})",
    )


def _add_const(p):
    p.add_argument("--top", type=int, default=DEFAULT_TOP, help="largest T on the ladder (default 2**20)")
    p.add_argument("--rungs", type=int, default=DEFAULT_RUNGS, help="ladder length (default 11)")
    p.add_argument("--depth", type=int, default=asymptotics.DEFAULT_DEPTH, help="Richardson depth (default 3)")
    p.add_argument("--precision", type=int, default=evaluate.DEFAULT_BITS, help="working bits (default 256)")
    p.add_argument("--digits", type=int, default=12, help="decimal digits in reports (default 12)")
    p.add_argument("--format", choices=("json", "table"), default="table")


def build_parser():
    parser = argparse.ArgumentParser(
        prog="maxload",
        description="Maximal bin occupancy for r balls into n bins per round.",
        epilog=EPILOG,
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    parser.add_argument("--version", action="version", version=f"maxload {__version__}")
    parser.add_argument("--threads", type=int, default=1, help="worker cap for parallel stages (default 1)")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("exact", help="exact A(n,r;T) for T = 1..t-max")
    _add_spec(p)
    p.add_argument("--t-max", type=int, required=True)
    p.add_argument("--out")
    _add_ceiling(p)
    p.set_defaults(func=cmd_exact)

    p = sub.add_parser("pmf", help="exact distribution of the maximal occupancy at round T")
    _add_spec(p)
    p.add_argument("--t", type=int, required=True)
    p.add_argument("--out")
    _add_ceiling(p)
    p.set_defaults(func=cmd_pmf)

    p = sub.add_parser("guess", help="guess and certify a recurrence for a sequence file")
    p.add_argument("sequence")
    p.add_argument("--max-order", type=int, default=6)
    p.add_argument("--max-degree", type=int, default=6)
    p.add_argument("--holdout", type=int, default=guess.DEFAULT_HOLDOUT)
    p.add_argument("--margin", type=int, default=guess.DEFAULT_MARGIN)
    p.add_argument("--method", choices=("modular", "exact"), default="modular")
    p.add_argument("--stable", action="store_true", help="reject operators unfit for float evaluation")
    p.add_argument("--out")
    p.set_defaults(func=cmd_guess)

    p = sub.add_parser("eval", help="unroll a recurrence file")
    p.add_argument("recurrence")
    p.add_argument("--t-max", type=int, required=True)
    p.add_argument("--samples", help="'end' (default), 'ladder', or comma-separated T values")
    p.add_argument("--precision", type=int, default=evaluate.DEFAULT_BITS)
    p.add_argument("--no-double-check", action="store_true")
    p.add_argument("--exact", action="store_true", help="exact rational evaluation")
    p.add_argument("--exact-ceiling", type=int, default=evaluate.EXACT_CEILING)
    p.add_argument("--out")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("cconst", help="estimate C in A(T) ~ C sqrt(T)")
    p.add_argument("--rec")
    p.add_argument("--seq")
    p.add_argument("--out")
    _add_const(p)
    p.set_defaults(func=cmd_cconst)

    p = sub.add_parser("compare", help="comparison table over several recurrence files")
    p.add_argument("recurrences", nargs="+")
    p.add_argument("--out")
    _add_const(p)
    p.set_defaults(func=cmd_compare)

    p = sub.add_parser("simulate", help="Monte Carlo estimate of E[max occupancy]")
    _add_spec(p)
    p.add_argument("--t", type=int, required=True)
    p.add_argument("--samples", type=int, default=100_000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("heuristic", help="heuristic value (r/n) sqrt(pi ln n) ln(n/r)")
    _add_spec(p)
    p.add_argument("--digits", type=int, default=15)
    p.set_defaults(func=cmd_heuristic)

    p = sub.add_parser("pipeline", help="exact -> guess -> eval -> cconst for one case")
    _add_spec(p)
    p.add_argument("--terms", type=int, default=120, help="exact terms to compute (default 120)")
    p.add_argument("--max-order", type=int, default=10)
    p.add_argument("--max-degree", type=int, default=20)
    p.add_argument("--holdout", type=int, default=15)
    p.add_argument("--out-dir")
    _add_ceiling(p)
    _add_const(p)
    p.set_defaults(func=cmd_pipeline)
    return parser


def main(argv=None):
    argv = sys.argv[1:] if argv is None else list(argv)
    parser = build_parser()
    args = parser.parse_args(argv)
    run = _Run(argv)
    try:
        return args.func(args, run)
    except ResourceCeilingError as exc:
        print(f"maxload: refused: {exc}", file=sys.stderr)
        return EXIT_CEILING
    except PrecisionLossError as exc:
        print(f"maxload: precision: {exc}", file=sys.stderr)
        return EXIT_PRECISION
    except (FileFormatError, FileNotFoundError, json.JSONDecodeError) as exc:
        print(f"maxload: bad input: {exc}", file=sys.stderr)
        return EXIT_BAD_INPUT
    except (InsufficientTermsError, SingularLeadingCoefficientError, ValueError) as exc:
        print(f"maxload: error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
