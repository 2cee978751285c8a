import argparse
import datetime
import logging
import sys
from fractions import Fraction
from typing import Any, Callable, Dict, List, Optional, Tuple

from updyn.certification.density import DENSITY_MODES, FIRST, density_check
from updyn.certification.returns import (
    CANONICAL,
    MINIMAL,
    RETURN_MODES,
    canonical_lower_bound,
    certify_poisson_negative,
    certify_poisson_positive,
)
from updyn.certification.sensitivity import chaos_summary, sensitivity_table
from updyn.certification.systems import (
    DEFAULT_HORIZON,
    CertificationError,
    shift_system,
)
from updyn.certification.unpredictability import certify_unpredictable, verify_certificate
from updyn.conjugacy.henon import HenonSystem, henon_orbit, henon_region_report
from updyn.conjugacy.horseshoe import (
    DEFAULT_HORSESHOE_CONTRACTION,
    DEFAULT_HORSESHOE_EXPANSION,
    HorseshoeSystem,
    expected_widths,
    horseshoe_box_for,
    horseshoe_itinerary,
    horseshoe_transport_unpredictable_point,
)
from updyn.conjugacy.logistic import (
    DEFAULT_LOGISTIC_MU,
    LogisticSystem,
    Undecided,
    conjugacy_commutation_check,
    itinerary,
    point_for,
    transport_unpredictable_point,
)
from updyn.symbolic.core import (
    BI_INFINITE,
    ONE_SIDED,
    DomainError,
    DottedWord,
    shift,
    stream_base,
    window,
)
from updyn.symbolic.star import block_start, star_sequence
from updyn.utils.intervals import DEFAULT_PRECISION_BITS, Interval, IntervalBox, PrecisionError
from updyn.utils.reports import (
    ReportDocument,
    box_payload,
    dotted_payload,
    interval_payload,
    run_checks,
    time_table_csv,
)
from updyn.utils.slack import slack_notifications

logging.basicConfig(format="%(levelname)s (%(name)s %(lineno)s): %(message)s")
logger = logging.getLogger(__name__)
logger.setLevel(logging.INFO)

EXIT_OK = 0
EXIT_VERIFICATION_FAILED = 1
EXIT_USAGE = 2

MAX_N = 16
"""
Largest certificate or Poisson depth accepted without --unsafe-limits.
"""

MAX_WORD_LENGTH = 14
"""
Largest word length (density, logistic words and depths) accepted without --unsafe-limits.
"""

MAX_HORIZON = 2 ** 20
"""
Largest search horizon accepted without --unsafe-limits.
"""

MAX_ORBIT_STEPS = 256
"""
Largest Henon orbit length accepted without --unsafe-limits.
"""

SPACES = {"one-sided": ONE_SIDED, "bi-infinite": BI_INFINITE}


class UsageError(Exception):
    pass


def _fraction(text: str) -> Fraction:
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"'{text}' is not an exact rational")


def _space(args: argparse.Namespace) -> str:
    name = getattr(args, "space", None) or getattr(args, "space_arg", None) or "one-sided"
    return SPACES[name]


def _pick(args: argparse.Namespace, name: str, default: Any = None) -> Any:
    value = getattr(args, name, None)
    if value is None:
        value = getattr(args, f"{name}_arg", None)
    return default if value is None else value


def _guard(args: argparse.Namespace, value: int, limit: int, what: str, minimum: int = 1):
    if value < minimum:
        raise UsageError(f"{what} must be at least {minimum}, got {value}")
    if value > limit and not args.unsafe_limits:
        raise UsageError(f"{what} {value} exceeds {limit}; pass --unsafe-limits to allow it")


def _horizon(args: argparse.Namespace) -> int:
    _guard(args, args.horizon, MAX_HORIZON, "horizon")
    return args.horizon


def _annotated(kind: str, start: int, text: str) -> str:
    pieces = []
    for k, symbol in enumerate(text):
        i = start + k
        if kind == BI_INFINITE and i == 0:
            pieces.append(".")
        elif k > 0:
            opens_block, opens_segment = block_start(kind, i)
            if opens_segment:
                pieces.append(" | ")
            elif opens_block:
                pieces.append(" ")
        pieces.append(symbol)
    if kind == BI_INFINITE and start + len(text) == 0:
        pieces.append(".")
    return "".join(pieces)


def cmd_gen(args: argparse.Namespace) -> Tuple[ReportDocument, bool, str]:
    """
    Symbols of s* from `start`; bi-infinite listings show the dot before index 0.
    """
    kind = SPACES[args.space_arg]
    if args.count < 1:
        raise UsageError(f"count must be at least 1, got {args.count}")
    if kind == ONE_SIDED and args.start < 0:
        raise UsageError(f"One-sided listings start at index 0 or later, got {args.start}")
    s = star_sequence(kind)
    w = window(s, args.start, args.count)
    if args.blocks:
        text = _annotated(kind, args.start, str(w.word))
    else:
        text = str(w) if kind == BI_INFINITE else str(w.word)
    results: Dict[str, Any] = {"symbols": str(w.word), "rendered": text}
    if kind == BI_INFINITE:
        results["window"] = dotted_payload(w)
    doc = ReportDocument("gen", {"space": args.space_arg, "start": args.start, "count": args.count}, results)
    return doc, True, text + "\n"


def cmd_certify(args: argparse.Namespace) -> Tuple[ReportDocument, bool, Optional[str]]:
    kind = _space(args)
    n_max = _pick(args, "n_max")
    if n_max is None:
        raise UsageError("certify needs n_max")
    _guard(args, n_max, MAX_N, "n_max")
    mode = _pick(args, "mode", MINIMAL)
    s = star_sequence(kind)
    cert = certify_unpredictable(s, n_max, mode=mode, horizon=_horizon(args))
    checks = {"certificate": verify_certificate(cert)}
    if mode == CANONICAL:
        checks["canonical lower bound"] = [
            f"n={e.n}: t={e.t} below {canonical_lower_bound(kind, e.n)}"
            for e in cert.entries
            if e.t < canonical_lower_bound(kind, e.n)
        ]
    passed = run_checks(checks)
    results = {
        "subject": cert.subject,
        "kind": cert.kind,
        "mode": cert.mode,
        "epsilon0": cert.epsilon0,
        "shift": cert.shift,
        "entries": [
            {
                "n": e.n,
                "t": e.t,
                "tau": e.tau,
                "proximity_bound": e.proximity_bound,
                "separation_lower_bound": e.separation_lower_bound,
                "separation_verified": e.separation_verified,
            }
            for e in cert.entries
        ],
        "verified": passed,
    }
    doc = ReportDocument("certify", {"space": _space_name(kind), "n_max": n_max, "mode": mode}, results)
    text = time_table_csv(cert.time_table()) if _pick(args, "format") == "csv" else None
    return doc, passed, text


def _space_name(kind: str) -> str:
    return next(name for name, k in SPACES.items() if k == kind)


def cmd_density(args: argparse.Namespace) -> Tuple[ReportDocument, bool, None]:
    kind = _space(args)
    length = args.length
    _guard(args, length, MAX_WORD_LENGTH, "length")
    report = density_check(star_sequence(kind), length, horizon=_horizon(args), mode=args.density_mode)
    results = {
        "length": report.length,
        "radius": report.radius,
        "hits": [{"word": h.word, "t": h.t} for h in report.hits],
        "missing": list(report.missing),
        "passed": report.passed,
    }
    doc = ReportDocument(
        "density", {"space": _space_name(kind), "length": length, "mode": args.density_mode}, results
    )
    return doc, report.passed, None


def cmd_poisson(args: argparse.Namespace) -> Tuple[ReportDocument, bool, Optional[str]]:
    kind = _space(args)
    n_max = _pick(args, "n_max")
    if n_max is None:
        raise UsageError("poisson needs n_max")
    _guard(args, n_max, MAX_N, "n_max")
    mode = _pick(args, "mode", MINIMAL)
    s = star_sequence(kind)
    if args.direction == "negative":
        if kind != BI_INFINITE:
            raise UsageError("Negative returns need the bi-infinite space")
        returns = certify_poisson_negative(s, n_max, mode=mode, horizon=_horizon(args))
    else:
        returns = certify_poisson_positive(s, n_max, mode=mode, horizon=_horizon(args))
    results = {
        "returns": [{"n": r.n, "t": r.t, "proximity_bound": r.proximity_bound} for r in returns],
        "passed": len(returns) == n_max,
    }
    doc = ReportDocument(
        "poisson",
        {"space": _space_name(kind), "direction": args.direction, "n_max": n_max, "mode": mode},
        results,
    )
    text = None
    if _pick(args, "format") == "csv":
        text = "n,t_n\n" + "".join(f"{r.n},{r.t}\n" for r in returns)
    return doc, len(returns) == n_max, text


def cmd_sensitivity(args: argparse.Namespace) -> Tuple[ReportDocument, bool, None]:
    kind = _space(args)
    _guard(args, args.delta_exponent, MAX_N, "delta_exponent", minimum=0)
    _guard(args, args.samples, MAX_HORIZON, "samples")
    delta = Fraction(1, 2 ** args.delta_exponent)
    sys_ = shift_system(kind)
    depth = args.delta_exponent + 2
    # deep minimal returns of s* leave the default horizon
    mode = MINIMAL if kind == ONE_SIDED and depth <= 12 else CANONICAL
    certificate = certify_unpredictable(sys_.point, depth, mode=mode, horizon=_horizon(args))
    points = [shift(sys_.point, k) for k in range(args.samples)]
    witnesses = sensitivity_table(sys_, points, [delta], horizon=_horizon(args), certificate=certificate)
    failures = [
        f"point {stream_base(w.base)[1]}: separation {w.separation_lower_bound}"
        for w in witnesses
        if w.separation_lower_bound < sys_.epsilon0 or w.distance_upper >= delta
    ]
    passed = run_checks({"sensitivity": failures})
    results = {
        "delta": delta,
        "witnesses": [
            {
                "point": stream_base(w.base)[1],
                "perturbed": stream_base(w.perturbed)[1],
                "time": w.time,
                "distance_upper": w.distance_upper,
                "separation_lower_bound": w.separation_lower_bound,
                "branch": w.branch,
            }
            for w in witnesses
        ],
        "passed": passed,
    }
    doc = ReportDocument(
        "sensitivity",
        {"space": _space_name(kind), "delta_exponent": args.delta_exponent, "samples": args.samples},
        results,
    )
    return doc, passed, None


def _logistic_system(args: argparse.Namespace) -> LogisticSystem:
    return LogisticSystem(args.mu, precision_bits=args.precision)


def cmd_logistic(args: argparse.Namespace) -> Tuple[ReportDocument, bool, None]:
    sys_ = _logistic_system(args)
    parameters: Dict[str, Any] = {"action": args.action, "mu": sys_.mu, "precision": args.precision}
    passed = True
    if args.action == "point":
        _guard(args, len(args.word), MAX_WORD_LENGTH, "word length")
        box = point_for(sys_, args.word)
        parameters["word"] = args.word
        results: Dict[str, Any] = {"box": box_payload(box)}
    elif args.action == "itinerary":
        _guard(args, args.length, MAX_WORD_LENGTH, "length")
        outcome = itinerary(sys_, Interval(args.lo, args.hi), args.length)
        parameters.update({"lo": args.lo, "hi": args.hi, "length": args.length})
        if isinstance(outcome, Undecided):
            results = {"undecided_at": outcome.step, "prefix": str(outcome.prefix)}
        else:
            results = {"itinerary": str(outcome)}
    elif args.action == "transport":
        _guard(args, args.depth, MAX_WORD_LENGTH, "depth")
        box = transport_unpredictable_point(sys_, args.depth)
        parameters["depth"] = args.depth
        results = {"box": box_payload(box), "width": box.width}
    else:
        _guard(args, args.w_length, MAX_WORD_LENGTH, "w_length", minimum=2)
        report = conjugacy_commutation_check(
            sys_, w_length=args.w_length, samples=args.samples, seed=args.seed
        )
        parameters.update({"w_length": args.w_length, "samples": args.samples, "seed": args.seed})
        results = {"checked": report.checked, "failures": list(report.failures)}
        passed = report.passed
    results["passed"] = passed
    return ReportDocument("logistic", parameters, results), passed, None


def cmd_henon(args: argparse.Namespace) -> Tuple[ReportDocument, bool, None]:
    _guard(args, args.steps, MAX_ORBIT_STEPS, "steps", minimum=0)
    sys_ = HenonSystem(args.alpha, args.beta, precision_bits=args.precision)
    region = henon_region_report(sys_.alpha, sys_.beta)
    start = IntervalBox.point(args.x0, args.y0)
    orbit = henon_orbit(sys_, start, args.steps)
    results = {
        "region_ok": region["region_ok"],
        "region_warning": not region["region_ok"],
        "threshold": interval_payload(region["threshold"]),
        "margin": region["margin"],
        "orbit": [box_payload(b) for b in orbit],
    }
    parameters = {"alpha": sys_.alpha, "beta": sys_.beta, "steps": args.steps, "x0": args.x0, "y0": args.y0}
    return ReportDocument("henon", parameters, results), True, None


def cmd_horseshoe(args: argparse.Namespace) -> Tuple[ReportDocument, bool, None]:
    sys_ = HorseshoeSystem(args.contraction, args.expansion)
    parameters: Dict[str, Any] = {
        "action": args.action,
        "contraction": sys_.contraction,
        "expansion": sys_.expansion,
    }
    passed = True
    if args.action == "box":
        w = DottedWord.from_string(args.word)
        box = horseshoe_box_for(sys_, w)
        parameters["word"] = args.word
        results: Dict[str, Any] = {"window": dotted_payload(w), "box": box_payload(box)}
    elif args.action == "itinerary":
        _guard(args, args.length, MAX_WORD_LENGTH, "length")
        outcome = horseshoe_itinerary(sys_, (args.x, args.y), args.length)
        parameters.update({"x": args.x, "y": args.y, "length": args.length})
        if isinstance(outcome, Undecided):
            results = {"undecided_at": outcome.step, "prefix": str(outcome.prefix)}
        else:
            results = {"itinerary": dotted_payload(outcome), "rendered": str(outcome)}
    else:
        _guard(args, args.radius, MAX_WORD_LENGTH, "radius", minimum=0)
        box = horseshoe_transport_unpredictable_point(sys_, args.radius)
        x_width, y_width = expected_widths(sys_, args.radius)
        passed = box[0].width == x_width and box[1].width == y_width
        parameters["radius"] = args.radius
        results = {"box": box_payload(box)}
    results["passed"] = passed
    return ReportDocument("horseshoe", parameters, results), passed, None


def cmd_chaos(args: argparse.Namespace) -> Tuple[ReportDocument, bool, None]:
    kind = _space(args)
    summary = chaos_summary(shift_system(kind), samples=args.samples, horizon=_horizon(args))
    results = {
        "sensitive": summary.sensitive,
        "transitive": summary.transitive,
        "poisson_stable": summary.poisson_stable,
        "aperiodic": summary.aperiodic,
        "details": summary.details,
        "passed": summary.passed,
    }
    doc = ReportDocument("chaos", {"space": _space_name(kind), "samples": args.samples}, results)
    return doc, summary.passed, None


COMMANDS: Dict[str, Callable[[argparse.Namespace], Tuple[ReportDocument, bool, Optional[str]]]] = {
    "gen": cmd_gen,
    "certify": cmd_certify,
    "density": cmd_density,
    "poisson": cmd_poisson,
    "sensitivity": cmd_sensitivity,
    "logistic": cmd_logistic,
    "henon": cmd_henon,
    "horseshoe": cmd_horseshoe,
    "chaos": cmd_chaos,
}


def _common_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--space", choices=list(SPACES), help="Sequence space")
    common.add_argument("--format", choices=["json", "csv", "text"], help="Output format")
    common.add_argument("--horizon", type=int, default=DEFAULT_HORIZON, help="Search horizon")
    common.add_argument(
        "--precision", type=int, default=DEFAULT_PRECISION_BITS, help="Working precision in bits"
    )
    common.add_argument(
        "--unsafe-limits", action="store_true", help="Lift the n_max, length and horizon guardrails"
    )
    common.add_argument("--output", help="Write the report to this path instead of stdout")
    common.add_argument("--with-metadata", action="store_true", help="Add a timestamp envelope")
    verbosity = common.add_mutually_exclusive_group()
    verbosity.add_argument("--verbose", action="store_true", help="Log at DEBUG level")
    verbosity.add_argument("--quiet", action="store_true", help="Log warnings only")
    common.add_argument("--slack-token", help="Slack API token (or set UPDYN_SLACK_TOKEN)")
    common.add_argument(
        "--slack-to", nargs="+", help="Slack channel(s) ('#name') and/or user(s) ('@name') to notify"
    )
    return common


def build_parser() -> argparse.ArgumentParser:
    common = _common_parser()
    parser = argparse.ArgumentParser(
        prog="updyn",
        description="Unpredictable points of shift spaces: generation, certificates and conjugacies.",
    )
    subparsers = parser.add_subparsers(dest="command", required=True)
    space_help = "one-sided or bi-infinite"

    gen = subparsers.add_parser("gen", parents=[common], help="List symbols of s*")
    gen.add_argument("space_arg", choices=list(SPACES), metavar="space", help=space_help)
    gen.add_argument("start", type=int)
    gen.add_argument("count", type=int)
    gen.add_argument("--blocks", action="store_true", help="Separate blocks and segments")

    certify = subparsers.add_parser("certify", parents=[common], help="Unpredictability certificate")
    certify.add_argument("space_arg", nargs="?", choices=list(SPACES), metavar="space", help=space_help)
    certify.add_argument("n_max_arg", nargs="?", type=int, metavar="n_max")
    certify.add_argument("mode_arg", nargs="?", choices=RETURN_MODES, metavar="mode")
    certify.add_argument("format_arg", nargs="?", choices=["json", "csv"], metavar="format")
    certify.add_argument("--n-max", dest="n_max", type=int)
    certify.add_argument("--mode", choices=RETURN_MODES)

    density = subparsers.add_parser("density", parents=[common], help="Density of the orbit of s*")
    density.add_argument("space_arg", choices=list(SPACES), metavar="space", help=space_help)
    density.add_argument("length", type=int)
    density.add_argument("--density-mode", choices=DENSITY_MODES, default=FIRST)

    poisson = subparsers.add_parser("poisson", parents=[common], help="Poisson stability returns")
    poisson.add_argument("space_arg", choices=list(SPACES), metavar="space", help=space_help)
    poisson.add_argument("direction", choices=["positive", "negative"])
    poisson.add_argument("n_max_arg", type=int, metavar="n_max")
    poisson.add_argument("--mode", choices=RETURN_MODES)

    sensitivity = subparsers.add_parser("sensitivity", parents=[common], help="Sensitivity witnesses")
    sensitivity.add_argument("space_arg", choices=list(SPACES), metavar="space", help=space_help)
    sensitivity.add_argument("delta_exponent", type=int, help="delta = 2^-delta_exponent")
    sensitivity.add_argument("samples", type=int, help="Number of trajectory points")

    logistic = subparsers.add_parser("logistic", help="Logistic map conjugacy")
    logistic_actions = logistic.add_subparsers(dest="action", required=True)
    for name in ("itinerary", "point", "transport", "commute"):
        action = logistic_actions.add_parser(name, parents=[common])
        action.add_argument("mu", type=_fraction, nargs="?", default=DEFAULT_LOGISTIC_MU)
        if name == "itinerary":
            action.add_argument("lo", type=_fraction)
            action.add_argument("hi", type=_fraction)
            action.add_argument("length", type=int)
        elif name == "point":
            action.add_argument("word")
        elif name == "transport":
            action.add_argument("depth", type=int)
        else:
            action.add_argument("--w-length", type=int, default=12)
            action.add_argument("--samples", type=int, default=100)
            action.add_argument("--seed", type=int, default=0)

    henon = subparsers.add_parser("henon", parents=[common], help="Henon region check and iteration")
    henon.add_argument("alpha", type=_fraction)
    henon.add_argument("beta", type=_fraction)
    henon.add_argument("steps", type=int)
    henon.add_argument("--x0", type=_fraction, default=Fraction(0))
    henon.add_argument("--y0", type=_fraction, default=Fraction(0))

    horseshoe = subparsers.add_parser("horseshoe", help="Affine horseshoe coding")
    horseshoe.add_argument("--contraction", type=_fraction, default=DEFAULT_HORSESHOE_CONTRACTION)
    horseshoe.add_argument("--expansion", type=_fraction, default=DEFAULT_HORSESHOE_EXPANSION)
    horseshoe_actions = horseshoe.add_subparsers(dest="action", required=True)
    box = horseshoe_actions.add_parser("box", parents=[common])
    box.add_argument("word", help="Window such as '10.01'")
    itin = horseshoe_actions.add_parser("itinerary", parents=[common])
    itin.add_argument("x", type=_fraction)
    itin.add_argument("y", type=_fraction)
    itin.add_argument("length", type=int)
    transport = horseshoe_actions.add_parser("transport", parents=[common])
    transport.add_argument("radius", type=int)

    chaos = subparsers.add_parser("chaos", parents=[common], help="Combined chaos checks")
    chaos.add_argument("space_arg", nargs="?", choices=list(SPACES), metavar="space", help=space_help)
    chaos.add_argument("--samples", type=int, default=10)
    return parser


def _configure_logging(args: argparse.Namespace):
    level = logging.DEBUG if args.verbose else logging.WARNING if args.quiet else logging.INFO
    for name in list(logging.root.manager.loggerDict):
        if name.startswith("updyn"):
            logging.getLogger(name).setLevel(level)


def _metadata() -> Dict[str, Any]:
    try:
        from importlib.metadata import PackageNotFoundError, version

        package_version = version("updyn")
    except (ImportError, PackageNotFoundError):
        package_version = "unknown"
    return {
        "generated_at": datetime.datetime.now(datetime.timezone.utc).isoformat(),
        "version": package_version,
    }


def _emit(text: str, output: Optional[str]):
    if output:
        with open(output, "w") as f:
            f.write(text)
    else:
        sys.stdout.write(text)


def main(argv: Optional[List[str]] = None) -> int:
    """
    Run the updyn command line.

    :param argv: Arguments (defaults to ``sys.argv[1:]``)
    :return: Exit code: 0 when every verification passed, 1 when one failed, 2 on usage or domain errors
    """
    parser = build_parser()
    args = parser.parse_args(argv)
    _configure_logging(args)

    with slack_notifications(args.slack_token, args.slack_to) as outcome:
        try:
            doc, passed, text = COMMANDS[args.command](args)
        except (UsageError, DomainError, PrecisionError, ValueError) as e:
            logger.error(str(e))
            outcome["summary"] = f"usage error: {e}"
            return EXIT_USAGE
        except CertificationError as e:
            logger.error(f"Verification failed: {e}")
            outcome["summary"] = f"verification failed: {e}"
            return EXIT_VERIFICATION_FAILED

        if args.with_metadata:
            doc.metadata = _metadata()
        report = doc.to_json()
        fmt = _pick(args, "format")
        if text is None or (fmt == "json" or (fmt is None and args.command != "gen")):
            text = report
        _emit(text, args.output)
        outcome["summary"] = "all checks passed" if passed else "verification failed"
        outcome["report"] = report
    return EXIT_OK if passed else EXIT_VERIFICATION_FAILED


if __name__ == "__main__":
    sys.exit(main())
