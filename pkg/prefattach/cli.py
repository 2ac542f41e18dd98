"""Command line interface.

Every command writes CSV and JSON files into ``--output-dir`` and finishes with a run manifest
listing the inputs, the configuration, the seeds and the digests of all outputs. ``--replay``
re-runs the command recorded in a manifest and checks that the outputs are reproduced.

Exit codes: 0 on success, 1 when an analysis fails (too little data, no convergence), 2 for usage
and configuration errors.
"""

from __future__ import annotations

import argparse
import logging
import sys
from collections.abc import Sequence
from pathlib import Path
from typing import Any
from typing import Callable

import numpy as np

from prefattach import affit
from prefattach import common
from prefattach import distfit
from prefattach import ingest
from prefattach import netsim
from prefattach import rate
from prefattach import registry
from prefattach import timeline
from prefattach.domain import ResolutionKind
from prefattach.exceptions import ConfigurationError
from prefattach.exceptions import DomainError
from prefattach.exceptions import FitError
from prefattach.exceptions import ParseError
from prefattach.exceptions import PrefAttachException
from prefattach.exceptions import ShapeError
from prefattach.exceptions import StepOutOfRange
from prefattach.manifest import RunManifest


logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_USAGE = 2

USAGE_ERRORS = (ConfigurationError, ParseError, ShapeError, StepOutOfRange, DomainError, OSError)

FIT_FAMILIES = ("log_linear", "nonlinear")
DISTRIBUTION_FAMILIES = ("lognormal", "power_law", "exponential")


class Run:
    """Book-keeping of the files a command reads and writes."""

    def __init__(self, args: argparse.Namespace) -> None:
        self.args = args
        self.output_dir = Path(args.output_dir)
        self.inputs: list[Path] = []
        self.outputs: list[Path] = []
        self.seeds: dict[str, int | None] = {}

    def path(self, name: str) -> Path:
        return self.output_dir / name

    def read(self, path: common.PathLike) -> Path:
        path = Path(path)
        if not path.is_file():
            raise FileNotFoundError(f"No such file: {path}")
        if path not in self.inputs:
            self.inputs.append(path)
        return path

    def wrote(self, *paths: Path) -> None:
        self.outputs.extend(paths)

    def seed(self) -> int:
        if self.args.seed is None:
            self.args.seed = int(np.random.SeedSequence().entropy % 2**63)
            logger.warning("No --seed given, using the entropy seed %d", self.args.seed)
        self.seeds["seed"] = self.args.seed
        return self.args.seed


def _csv_list(value: str) -> list[str]:
    items = [item.strip() for item in value.split(",") if item.strip()]
    if not items:
        raise argparse.ArgumentTypeError("expected a comma separated list")
    return items


def _kmin(value: str) -> str | int:
    if value in ("auto", "auto-p010"):
        return value
    try:
        k_min = int(value)
    except ValueError as e:
        raise argparse.ArgumentTypeError(
            f"expected 'auto', 'auto-p010' or an integer, got {value!r}"
        ) from e
    if k_min < 1:
        raise argparse.ArgumentTypeError(f"k_min must be at least 1, got {k_min}")
    return k_min


def _lcurve(value: str) -> distfit.LogNormalFormCurve:
    try:
        beta0, beta1, beta2 = (float(v) for v in value.split(","))
    except ValueError as e:
        raise argparse.ArgumentTypeError(
            f"expected three comma separated numbers, got {value!r}"
        ) from e
    return distfit.LogNormalFormCurve(beta0, beta1, beta2)


def _date_window(args: argparse.Namespace) -> ingest.DateInterval | None:
    if args.date_from is None and args.date_to is None:
        return None
    if args.date_from is None or args.date_to is None:
        raise ConfigurationError("--from and --to must be given together")
    return ingest.DateInterval.parse(f"{args.date_from}:{args.date_to}")


def _corpus(args: argparse.Namespace, run: Run) -> ingest.CitationCorpus:
    if args.nodes is None or args.edges is None:
        raise ConfigurationError("Either --sequence or both --nodes and --edges are required")
    return ingest.read_corpus(run.read(args.nodes), run.read(args.edges), _date_window(args))


def _sequence(args: argparse.Namespace, run: Run) -> timeline.GrowthSequence:
    if args.sequence is not None:
        seq = timeline.read_sequence(run.read(args.sequence))
    else:
        resolution = timeline.Resolution.parse(args.resolution, args.t1, args.t2)
        seq = timeline.build_sequence(_corpus(args, run), resolution)
    if args.coarsen:
        seq = timeline.coarsen(seq, args.coarsen)
    return seq


def _histogram(args: argparse.Namespace, run: Run) -> timeline.DegreeHistogram:
    if args.sequence is not None:
        return timeline.final_histogram(timeline.read_sequence(run.read(args.sequence)))
    return timeline.flat_histogram(_corpus(args, run))


def cmd_ingest(args: argparse.Namespace, run: Run) -> None:
    corpus = ingest.read_corpus(run.read(args.nodes), run.read(args.edges), _date_window(args))
    run.wrote(common.write_json(run.path("stats.json"), corpus.stats.to_json()))
    if args.emit_canonical is not None:
        run.wrote(*ingest.write_canonical(corpus, args.emit_canonical))


def cmd_simulate(args: argparse.Namespace, run: Run) -> None:
    if args.config is not None:
        config = netsim.ModelConfig.from_json(run.read(args.config).read_text(encoding="utf-8"))
        if args.seed is None:
            args.seed = config.rng_seed
        seed = run.seed()
        config = netsim.ModelConfig(**{**config.model_dump(), "rng_seed": seed})
    else:
        seed = run.seed()
        parameter = args.alpha if args.alpha is not None else args.beta
        config = netsim.ModelConfig.preset(
            args.model,
            parameter=parameter,
            T=args.steps,
            n1=args.n1,
            m1_prime=args.m1_prime,
            n2=args.n2,
            edges_per_step={"kind": args.edges_per_step, "m": args.m},
            rng_seed=seed,
        )
    seq = netsim.simulate(config)
    run.wrote(timeline.write_sequence(seq, run.path("sequence.jsonl")))
    summary: dict[str, Any] = {
        "config": config.model_dump(mode="json"),
        "sequence": timeline.describe(seq),
    }
    if seq.resolution.kind is ResolutionKind.MAXIMAL:
        summary["compliance"] = netsim.check_price_compliance(seq).to_json()
    run.wrote(common.write_json(run.path("simulation.json"), summary))


def cmd_measure(args: argparse.Namespace, run: Run) -> None:
    seq = _sequence(args, run)
    if args.estimator == "jeong":
        if seq.resolution.kind is not ResolutionKind.BI_EPOCHAL:
            raise ShapeError(
                f"Jeong's measure needs a bi-epochal sequence, got {seq.resolution.kind.value}"
            )
        estimate = rate.jeong_rate(seq)
    else:
        variant = "uncorrected" if args.estimator == "newman_uncorrected" else "corrected"
        estimate = rate.newman_rate(seq, variant, args.normalization)
    config = {
        "resolution": seq.resolution.describe(),
        "estimator": estimate.estimator.value,
        "half_width": args.half_width,
    }
    run.wrote(*rate.write_rate(estimate, run.path("rate.csv"), **config))
    run.wrote(common.write_json(run.path("sequence.json"), timeline.describe(seq)))
    if not estimate.points:
        logger.warning("The attachment rate estimate is empty, no binned rate is written")
        return
    binned = rate.bin_rate(estimate, args.half_width)
    run.wrote(*rate.write_binned(binned, run.path("rate_binned.csv"), **config))

    windows: list[rate.Window] = []
    if args.windows:
        windows = [ingest.DateInterval.parse(window) for window in args.windows]
    elif args.equal_windows:
        windows = list(timeline.equal_node_windows(seq, args.equal_windows))
    if windows:
        results = rate.windowed_alpha(
            seq,
            windows,
            args.half_width,
            args.min_support,
            args.normalization,
            args.min_exposure,
        )
        rows = [
            (str(r.window), r.alpha, r.fit.scale, r.fit.aic, r.fit.n_points) for r in results
        ]
        header = ["window", "alpha", "scale", "aic", "n_points"]
        run.wrote(common.write_csv(run.path("windows.csv"), header, rows))


def cmd_fitdist(args: argparse.Namespace, run: Run) -> None:
    hist = _histogram(args, run)
    fits = []
    for family in args.family:
        if args.kmin == "auto":
            fit = distfit.select_kmin(hist, family, "ks", k_max=args.kmax)
        elif args.kmin == "auto-p010":
            fit = distfit.select_kmin(
                hist,
                family,
                "plausible",
                k_max=args.kmax,
                n_bootstrap=args.bootstrap,
                seed=run.seed(),
                threads=args.threads,
            )
        else:
            fit = distfit.fit_mle(hist, family, args.kmin, args.kmax)
        if args.bootstrap and fit.p_value is None and fit.note is None:
            fit = distfit.gof_test(hist, fit, args.bootstrap, run.seed(), args.threads)
        run.wrote(distfit.write_fit(fit, run.path(f"fit_{fit.family}.json")))
        fits.append(fit)

    run.wrote(distfit.write_cumulative(distfit.cumulative(hist), run.path("cumulative.csv")))
    run.wrote(distfit.write_overlay(hist, fits, run.path("overlay.csv"), lcurve=args.lcurve))
    if len(fits) > 1:
        if len({(fit.k_min, fit.k_max) for fit in fits}) == 1:
            comparison = distfit.compare_families(hist, fits)
            run.wrote(common.write_json(run.path("comparison.json"), comparison.to_json()))
        else:
            logger.warning("Fits have different supports, the families are not compared")


def cmd_fitattach(args: argparse.Namespace, run: Run) -> None:
    binned = rate.read_binned(run.read(args.rate))
    fits = [affit.fit_af(binned, family, args.min_support) for family in args.family]
    for fit in fits:
        run.wrote(affit.write_fit(fit, run.path(f"fit_af_{fit.family}.json")))
    comparison = affit.compare_af(fits)
    run.wrote(common.write_json(run.path("af_comparison.json"), comparison.to_json()))
    run.wrote(affit.write_overlay(binned, fits, run.path("af_overlay.csv")))


def cmd_score(args: argparse.Namespace, run: Run) -> None:
    binned = rate.read_binned(run.read(args.rate))
    score = affit.loglinearity_score(binned, args.max_segments, args.penalty, args.min_support)
    run.wrote(affit.write_score(score, run.path("score.json")))


def _models() -> list[dict[str, Any]]:
    models = registry.get("model")
    assert isinstance(models, list)
    return models


def _model_names() -> list[str]:
    return sorted(entry["name"] for entry in _models())


def _model_name(family: str) -> str:
    """The one-node-per-step model whose attachment function is ``family``."""
    for entry in _models():
        if entry["attachment"] == family and entry["mode"] == "price":
            return entry["name"]
    return family


class ReportInputs:
    """Growth sequences of one input at several resolutions, each built once."""

    def __init__(self, args: argparse.Namespace, run: Run) -> None:
        self.args = args
        self.run = run
        self._corpus: ingest.CitationCorpus | None = None
        self._sequences: dict[str, timeline.GrowthSequence] = {}

    def sequence(self, name: str) -> timeline.GrowthSequence:
        if name.startswith("coarse:"):
            try:
                nodes_per_step = int(name.partition(":")[2])
            except ValueError as e:
                raise ConfigurationError(f"Invalid coarse resolution '{name}'") from e
            return timeline.coarsen(self.sequence("maximal"), nodes_per_step)
        if name not in self._sequences:
            self._sequences[name] = self._build(name)
        return self._sequences[name]

    def _build(self, name: str) -> timeline.GrowthSequence:
        if self.args.sequence is not None:
            if name != "maximal":
                raise ConfigurationError(
                    f"A stored sequence supports 'maximal' and 'coarse:N', not '{name}'"
                )
            return timeline.read_sequence(self.run.read(self.args.sequence))
        if self._corpus is None:
            self._corpus = _corpus(self.args, self.run)
        return timeline.build_sequence(self._corpus, timeline.Resolution.parse(name))


def cmd_report(args: argparse.Namespace, run: Run) -> None:
    inputs = ReportInputs(args, run)
    rows = []
    for name in args.resolutions:
        seq = inputs.sequence(name)
        estimate = rate.newman_rate(seq, normalization=args.normalization)
        binned = rate.bin_rate(estimate, args.half_width)
        fits = {
            family: affit.fit_af(binned, family, args.min_support, args.min_exposure)
            for family in FIT_FAMILIES
        }
        comparison = affit.compare_af(list(fits.values()))
        try:
            score: float | None = affit.loglinearity_score(
                binned, min_support=args.min_support, min_exposure=args.min_exposure
            ).score
        except FitError as e:
            logger.warning("No log-linearity score at %s resolution: %s", name, e)
            score = None
        rows.append(
            {
                "resolution": name,
                "T": seq.T,
                "n_bins": fits["log_linear"].n_points,
                "aic_log_linear": fits["log_linear"].aic,
                "aic_nonlinear": fits["nonlinear"].aic,
                "bic_log_linear": fits["log_linear"].bic,
                "bic_nonlinear": fits["nonlinear"].bic,
                "alpha": fits["log_linear"].shape,
                "beta": fits["nonlinear"].shape,
                "score": score,
                "winner": _model_name(comparison.winner),
            }
        )
    run.wrote(common.write_json(run.path("report.json"), {"rows": rows}))
    header = list(rows[0]) if rows else ["resolution"]
    csv_rows = (["" if row[c] is None else row[c] for c in header] for row in rows)
    run.wrote(common.write_csv(run.path("report.csv"), header, csv_rows))


COMMANDS: dict[str, Callable[[argparse.Namespace, Run], None]] = {
    "ingest": cmd_ingest,
    "simulate": cmd_simulate,
    "measure": cmd_measure,
    "fitdist": cmd_fitdist,
    "fitattach": cmd_fitattach,
    "score": cmd_score,
    "report": cmd_report,
}


def _add_global_options(parser: argparse.ArgumentParser, defaults: bool) -> None:
    def default(value: Any) -> Any:
        return value if defaults else argparse.SUPPRESS

    parser.add_argument("--seed", type=int, default=default(None), help="Seed of all randomness")
    parser.add_argument(
        "--threads", type=int, default=default(1), help="Worker threads for bootstrap replicates"
    )
    parser.add_argument(
        "--output-dir", type=Path, default=default(Path(".")), help="Directory for all outputs"
    )
    parser.add_argument(
        "--manifest", type=Path, default=default(None), help="Path of the run manifest"
    )
    parser.add_argument("-v", "--verbose", action="count", default=default(0))
    parser.add_argument("-q", "--quiet", action="count", default=default(0))


def _add_corpus_options(parser: argparse.ArgumentParser, sequence: bool = True) -> None:
    # without a sequence to fall back on, the corpus files are mandatory
    required = not sequence
    parser.add_argument(
        "--nodes", type=Path, required=required, help="Node CSV with the header id,date"
    )
    parser.add_argument(
        "--edges", type=Path, required=required, help="Edge CSV with the header citing_id,cited_id"
    )
    parser.add_argument("--from", dest="date_from", help="First publication date or year")
    parser.add_argument("--to", dest="date_to", help="Last publication date or year")
    if sequence:
        parser.add_argument("--sequence", type=Path, help="A JSON-lines growth sequence")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="prefattach",
        description="Measure preferential attachment in growing networks",
    )
    _add_global_options(parser, defaults=True)
    parser.add_argument("--replay", type=Path, help="Re-run the command recorded in a manifest")
    shared = argparse.ArgumentParser(add_help=False)
    _add_global_options(shared, defaults=False)
    commands = parser.add_subparsers(dest="command", metavar="COMMAND")

    p = commands.add_parser("ingest", parents=[shared], help="Parse and clean a citation corpus")
    _add_corpus_options(p, sequence=False)
    p.add_argument("--emit-canonical", type=Path, help="Write the cleaned corpus to a directory")

    p = commands.add_parser("simulate", parents=[shared], help="Simulate a growing network model")
    p.add_argument("--model", choices=_model_names(), default="price")
    p.add_argument("--config", type=Path, help="JSON model configuration instead of a preset")
    p.add_argument("--steps", type=int, default=10_000, help="Number of time-steps T")
    p.add_argument("--m", type=int, default=1, help="Edges per time-step")
    p.add_argument("--edges-per-step", choices=("constant", "uniform"), default="constant")
    p.add_argument("--n1", type=int, default=1, help="Nodes of the initial network")
    p.add_argument("--m1-prime", type=int, default=0, help="Edges inside the initial network")
    p.add_argument("--n2", type=int, default=1, help="New nodes in the second step (jeong)")
    p.add_argument("--alpha", type=float, help="Exponent of the log-linear attachment function")
    p.add_argument("--beta", type=float, help="Parameter of the nonlinear attachment function")

    p = commands.add_parser("measure", parents=[shared], help="Measure the attachment rate")
    _add_corpus_options(p)
    p.add_argument(
        "--resolution", default="maximal", help="maximal, daily, monthly, yearly or biepochal"
    )
    p.add_argument("--t1", help="First epoch of a bi-epochal resolution, e.g. 1990:1999")
    p.add_argument("--t2", help="Second epoch of a bi-epochal resolution, e.g. 2000:2000")
    p.add_argument("--coarsen", type=int, help="Re-bucket into steps of this many nodes")
    p.add_argument(
        "--estimator", choices=("newman", "newman_uncorrected", "jeong"), default="newman"
    )
    p.add_argument("--normalization", choices=("per_step", "global"), default="per_step")
    p.add_argument("--half-width", type=float, default=rate.DEFAULT_HALF_WIDTH)
    p.add_argument("--min-support", type=int, default=1)
    p.add_argument("--min-exposure", type=float, default=0.0, help="Node-steps at risk per bin")
    p.add_argument("--windows", type=_csv_list, help="Date windows START:END,START:END,...")
    p.add_argument("--equal-windows", type=int, help="Number of windows with equal node counts")

    p = commands.add_parser("fitdist", parents=[shared], help="Fit degree distributions")
    _add_corpus_options(p)
    p.add_argument("--family", type=_csv_list, default=list(DISTRIBUTION_FAMILIES))
    p.add_argument("--kmin", type=_kmin, default=1, help="An integer, 'auto' or 'auto-p010'")
    p.add_argument("--kmax", type=int, help="Upper bound of a body fit")
    p.add_argument("--bootstrap", type=int, default=distfit.DEFAULT_BOOTSTRAP)
    p.add_argument("--lcurve", type=_lcurve, help="Log-normal form overlay B0,B1,B2")

    p = commands.add_parser("fitattach", parents=[shared], help="Fit attachment functions")
    p.add_argument("--rate", type=Path, required=True, help="A binned rate CSV")
    p.add_argument("--family", type=_csv_list, default=list(FIT_FAMILIES))
    p.add_argument("--min-support", type=int, default=1)

    p = commands.add_parser("score", parents=[shared], help="Log-linearity score of a rate")
    p.add_argument("--rate", type=Path, required=True, help="A binned rate CSV")
    p.add_argument("--max-segments", type=int, default=affit.MAX_SEGMENTS)
    p.add_argument("--penalty", type=float, default=affit.GCV_PENALTY)
    p.add_argument("--min-support", type=int, default=1)

    p = commands.add_parser("report", parents=[shared], help="Compare models across resolutions")
    _add_corpus_options(p)
    p.add_argument(
        "--resolutions", type=_csv_list, default=["maximal", "daily", "monthly", "yearly"]
    )
    p.add_argument("--normalization", choices=("per_step", "global"), default="per_step")
    p.add_argument("--half-width", type=float, default=rate.DEFAULT_HALF_WIDTH)
    p.add_argument("--min-support", type=int, default=1)
    p.add_argument("--min-exposure", type=float, default=0.0, help="Node-steps at risk per bin")
    return parser


def _configure_logging(verbosity: int) -> None:
    level = min(max(logging.WARNING - 10 * verbosity, logging.DEBUG), logging.CRITICAL)
    logging.basicConfig(level=level, format="%(levelname)s %(name)s: %(message)s")
    logging.getLogger("prefattach").setLevel(level)


def _configuration(args: argparse.Namespace) -> dict[str, Any]:
    skip = {"replay", "verbose", "quiet", "manifest"}
    config = {}
    for key, value in sorted(vars(args).items()):
        if key in skip:
            continue
        if isinstance(value, Path):
            value = value.as_posix()
        elif isinstance(value, distfit.LogNormalFormCurve):
            value = [value.beta0, value.beta1, value.beta2]
        config[key] = value
    return config


def _run(args: argparse.Namespace, argv: list[str]) -> int:
    run = Run(args)
    seeded = args.seed is not None
    try:
        COMMANDS[args.command](args, run)
    except USAGE_ERRORS as e:
        print(f"prefattach {args.command}: error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except PrefAttachException as e:
        print(f"prefattach {args.command}: analysis failed: {e}", file=sys.stderr)
        return EXIT_FAILURE

    if not seeded and args.seed is not None:
        argv = ["--seed", str(args.seed), *argv]
    manifest = RunManifest.build(
        args.command, argv, _configuration(args), run.inputs, run.outputs, run.seeds
    )
    path = manifest.write(args.manifest or run.path(f"{args.command}.manifest.json"))
    logger.info("Wrote %d files, manifest in %s", len(run.outputs), path)
    return EXIT_OK


def _replay(path: Path) -> int:
    try:
        manifest = RunManifest.read(path)
    except ConfigurationError as e:
        print(f"prefattach: error: {e}", file=sys.stderr)
        return EXIT_USAGE
    changed = manifest.changed_inputs()
    if changed:
        logger.warning("Inputs changed since the recorded run: %s", ", ".join(changed))
    code = main(manifest.argv)
    if code != EXIT_OK:
        return code
    differing = manifest.changed_outputs()
    if differing:
        print(f"prefattach: replay changed outputs: {', '.join(differing)}", file=sys.stderr)
        return EXIT_FAILURE
    logger.info("Replay reproduced all %d outputs", len(manifest.outputs))
    return EXIT_OK


def main(argv: Sequence[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    args = parser.parse_args(argv)
    _configure_logging(args.verbose - args.quiet)
    if args.replay is not None:
        return _replay(args.replay)
    if args.command is None:
        parser.error("a command is required")
    return _run(args, argv)


if __name__ == "__main__":
    sys.exit(main())
