import argparse
import logging
import sys
from typing import List, Optional

from . import __version__
from .config import apply_overrides, load_config
from .dirs import PROFILE_CASES, DirsProfile, JammerMode
from .estimate import FeedbackModel
from .exceptions import ConfigError, DiscoJamError, EstimatorRangeError, GrammarError
from .grammar import parse_trials
from .harness import ExperimentRunner, GridPoint, feedback_trace, sample_trial
from .report import plot_results, write_channels, write_moments, write_results, write_trace
from .scenario import ScenarioConfig
from .stats import alpha_bar, empirical_aca_moments, moment_report_rows, normality_test
from .verify import VerifySettings, run_checks

__all__ = ("build_parser", "main", "EXIT_OK", "EXIT_RUNTIME", "EXIT_USAGE")

log = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_RUNTIME = 1
EXIT_USAGE = 2

LOG_FORMAT = "%(levelname)s - %(module)s - %(message)s"

_USAGE_ERRORS = (ConfigError, GrammarError, EstimatorRangeError)
_CASES = sorted(PROFILE_CASES) + [f"{case}-ideal" for case in sorted(PROFILE_CASES)]


def _configure_logging(verbosity: int) -> None:
    level = {-1: logging.WARNING, 0: logging.INFO}.get(verbosity, logging.DEBUG)
    logger = logging.getLogger("DiscoJamEngine")
    logger.setLevel(level)
    for handler in list(logger.handlers):
        logger.removeHandler(handler)
    handler = logging.StreamHandler(sys.stderr)
    handler.setFormatter(logging.Formatter(LOG_FORMAT))
    logger.addHandler(handler)
    logger.propagate = False


def _add_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--seed", type=int, help="base seed of every random stream")
    parser.add_argument("--jobs", type=int, default=1, help="joblib worker count")
    parser.add_argument(
        "--mode", choices=[m.value for m in JammerMode], help="DIRS jammer mode"
    )
    parser.add_argument("--case", choices=_CASES, help="DIRS phase-distribution case")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="discojam",
        description="Monte-Carlo simulator of a disco-IRS jammed MU-MISO downlink.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    noise = parser.add_mutually_exclusive_group()
    noise.add_argument("-v", "--verbose", action="store_const", const=1, dest="verbosity")
    noise.add_argument("-q", "--quiet", action="store_const", const=-1, dest="verbosity")
    parser.set_defaults(verbosity=0)
    commands = parser.add_subparsers(dest="command", metavar="COMMAND")
    commands.required = True

    run = commands.add_parser("run", help="run an experiment from a JSON config")
    run.add_argument("--config", required=True, metavar="PATH", help="experiment JSON")
    _add_common(run)
    run.add_argument("--out", metavar="PATH", help="results CSV (stdout by default)")
    run.add_argument("--trials", metavar="D[xR]", help="drops, optionally x realizations")
    run.add_argument("--drops", type=int, help="LU drops per grid point")
    run.add_argument("--realizations", type=int, help="realizations per drop")
    run.add_argument("--sweep", metavar="NAME=start:stop:step", help="sweep variable and grid")
    run.add_argument("--benchmarks", metavar="LIST", help='e.g. "nojam,zf,ajp,ajp_est(1)"')
    run.add_argument(
        "--realized",
        action="store_true",
        default=None,
        help="score with the realized SJNR over the DT sub-slots",
    )
    run.add_argument("--feedback-model", choices=[m.value for m in FeedbackModel])
    run.add_argument("--plot", metavar="PATH.svg", help="also draw the rates as SVG")
    run.add_argument("--dump-channels", metavar="PATH", help="CSV of the first trial's channels")
    run.add_argument("--trace", metavar="PATH", help="feedback-trace CSV of the first drop")
    run.add_argument("--progress", action="store_true", help="show progress bars")
    run.set_defaults(handler=_run)

    stats = commands.add_parser("stats", help="closed-form and empirical ACA statistics")
    _add_common(stats)
    stats.add_argument("--out", metavar="PATH", help="write an empirical moment CSV")
    stats.add_argument("--trials", type=int, default=2000, help="Monte-Carlo frames")
    stats.add_argument("--elements", type=int, default=256, help="N_D of the moment run")
    stats.set_defaults(handler=_stats)

    verify = commands.add_parser("verify", help="run the acceptance checks")
    verify.add_argument("--seed", type=int, default=0)
    verify.add_argument("--jobs", type=int, default=1)
    verify.add_argument("--trials", metavar="D[xR]", default="100x20")
    verify.add_argument("--frames", type=int, default=10_000, help="frames of the moment check")
    verify.add_argument("--scenarios", type=int, default=100)
    verify.set_defaults(handler=_verify)
    return parser


def _run(args: argparse.Namespace) -> int:
    spec = load_config(args.config)
    drops, realizations = args.drops, args.realizations
    if args.trials is not None:
        drops, parsed = parse_trials(args.trials)
        realizations = parsed if parsed is not None else realizations
    spec = apply_overrides(
        spec,
        seed=args.seed,
        drops=drops,
        realizations=realizations,
        sweep=args.sweep,
        benchmarks=args.benchmarks,
        mode=args.mode,
        case=args.case,
        realized=args.realized,
        feedback_model=args.feedback_model,
    )
    if args.dump_channels:
        grid = spec.grid
        config, profile, _ = GridPoint(0, grid.name, grid.values[0]).apply(spec)
        trial = sample_trial(config, profile, spec.base_seed, 0, 0)
        write_channels(trial.channels, args.dump_channels)
    if args.trace:
        write_trace(feedback_trace(spec, spec.realizations), args.trace)

    result = ExperimentRunner(n_jobs=args.jobs, progress=args.progress).run(spec)
    text = write_results(result, args.out)
    if args.out is None:
        sys.stdout.write(text)
    if args.plot:
        plot_results(result, args.plot)
    return EXIT_OK


def _stats(args: argparse.Namespace) -> int:
    mode = JammerMode.parse(args.mode or JammerMode.PERSISTENT)
    profile = DirsProfile.from_case(args.case or "c2", mode)
    print(f"alpha_bar = {alpha_bar(profile):.5g}")
    if args.out:
        seed = 0 if args.seed is None else args.seed
        config = ScenarioConfig(num_elements=args.elements, seed=seed)
        moments = empirical_aca_moments(
            config, profile.with_elements(args.elements), args.trials, seed, n_jobs=args.jobs
        )
        write_moments(moment_report_rows(moments), args.out)
        normal = normality_test(moments.samples)
        print(f"mean variance ratio = {moments.ratio.mean():.5g}")
        print(f"KS p-values = {normal.pvalue[0]:.3g}, {normal.pvalue[1]:.3g}")
    return EXIT_OK


def _verify(args: argparse.Namespace) -> int:
    drops, realizations = parse_trials(args.trials)
    settings = VerifySettings(
        seed=args.seed,
        drops=drops,
        realizations=20 if realizations is None else realizations,
        frames=args.frames,
        scenarios=args.scenarios,
        n_jobs=args.jobs,
    )
    results = run_checks(settings)
    for result in results:
        print(result)
    return EXIT_OK if all(r.passed for r in results) else EXIT_RUNTIME


def main(argv: Optional[List[str]] = None) -> int:
    """
    Entry point of the ``discojam`` command.

    Returns
    -------
    int
        0 on success, 1 on a runtime or output-file failure, 2 on a usage or
        configuration error.
    """
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exit:
        return exit.code if isinstance(exit.code, int) else EXIT_USAGE
    _configure_logging(args.verbosity)
    try:
        return args.handler(args)
    except _USAGE_ERRORS as error:
        parser.print_usage(sys.stderr)
        print(f"discojam: error: {error}", file=sys.stderr)
        return EXIT_USAGE
    except DiscoJamError as error:
        log.error("%s", error)
        return EXIT_RUNTIME
    except OSError as error:
        log.error("cannot write %s: %s", error.filename or "output", error.strerror or error)
        return EXIT_RUNTIME
