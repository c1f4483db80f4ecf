"""
Command-line front end.

    python app.py dist --n 10 --theta 0.1 --mu 0.05 --grid -4:4:401
    python app.py limit --mu-coef 1 --mu-exp 0.333 --theta-coef 0.5 --theta-exp 0.333
    python app.py validate --profile quick

Results go to --out (or stdout) as JSON or CSV; logs and errors go to stderr.
Exit codes: 0 success, 1 usage or input error, 2 numerical or validation failure.
"""
import argparse
import io
import json
import math
import re
import sys
from pathlib import Path
from typing import Any, Optional, Sequence

import numpy as np
import pandas as pd
from pydantic import ValidationError

from .. import __version__
from ..core.config import load_settings
from ..core.errors import NUMERICAL_ERRORS, USAGE_ERRORS, DomainError, ValidationFailure
from ..core.log import configure_logging, get_logger
from ..core.reference import ReferenceData
from ..core.sequences import PowerLawSequence, ThetaSequence
from ..models.estimation import CdfEstimatorSpec, EstimatorKind
from ..models.location import LocationModel, ScaleKind
from ..models.regression import RegressionProblem
from ..models.run import OutputFormat, RunMetadata, Subcommand
from ..models.study import StudyConfig, ThetaPattern, TuningChoice, TuningKind
from ..services import asymptotics, cdf_estimation, estimators, exact_dist, montecarlo, validation

logger = get_logger(__name__)

# Flags shared by every subcommand; never echoed into the replayable params
COMMON_KEYS = {"subcommand", "seed", "out", "format", "threads", "config", "log_level", "handler"}


class UsageError(DomainError):
    """Malformed command line."""


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):
        raise UsageError(f"{self.prog}: {message}")


# Argument helpers

def parse_grid(text: str) -> np.ndarray:
    """``a:b:k`` -> k evenly spaced points from a to b."""
    try:
        a, b, k = text.split(":")
        a, b, k = float(a), float(b), int(k)
    except ValueError as e:
        raise UsageError(f"Grid must look like a:b:k, got '{text}'") from e
    if k < 1 or not (math.isfinite(a) and math.isfinite(b)):
        raise UsageError(f"Grid needs finite ends and k >= 1, got '{text}'")
    return np.linspace(a, b, k)


def parse_int_list(text: str) -> list[int]:
    try:
        return [int(float(v)) for v in text.split(",") if v.strip()]
    except ValueError as e:
        raise UsageError(f"Expected comma separated integers, got '{text}'") from e


def mu_sequence(args: argparse.Namespace) -> PowerLawSequence:
    if args.mu_rule:
        return PowerLawSequence.parse(args.mu_rule)
    return PowerLawSequence(coef=args.mu_coef, exponent=args.mu_exp)


def theta_sequence(args: argparse.Namespace) -> ThetaSequence:
    if args.theta_rule:
        return ThetaSequence.parse(args.theta_rule)
    return ThetaSequence.power(args.theta_coef, args.theta_exp, args.theta_offset)


def _add_sequence_flags(p: argparse.ArgumentParser, with_theta: bool = True):
    p.add_argument("--mu-rule", help="Tuning sequence, e.g. 'n^-1/3' or '2*n^-0.4'")
    p.add_argument("--mu-coef", type=float, default=1.0)
    p.add_argument("--mu-exp", type=float, default=1.0 / 3.0)
    if with_theta:
        p.add_argument("--theta-rule", help="Parameter sequence, e.g. '0.5*n^-1/3' or 'n^-1/3+0.5*n^-1/2'")
        p.add_argument("--theta-coef", type=float, default=0.0)
        p.add_argument("--theta-exp", type=float, default=0.0)
        p.add_argument("--theta-offset", type=float, default=0.0, help="Coefficient of an extra n^-1/2 term")


def build_parser() -> tuple[argparse.ArgumentParser, dict[str, argparse.ArgumentParser]]:
    common = _Parser(add_help=False)
    common.add_argument("--seed", type=int, default=None, help="Master seed (default ALDIST_SEED)")
    common.add_argument("--out", default=None, help="Output file; stdout when omitted")
    common.add_argument("--format", choices=[f.value for f in OutputFormat], default=OutputFormat.JSON.value)
    common.add_argument("--threads", type=int, default=None, help="Worker cap for Monte Carlo work")
    common.add_argument("--config", default=None, help="JSON output of an earlier run to replay")
    common.add_argument("--log-level", default=None)

    parser = _Parser(prog="aldist", description="Adaptive LASSO estimator and its distributions")
    sub = parser.add_subparsers(dest="subcommand", required=True, parser_class=_Parser)
    subs: dict[str, argparse.ArgumentParser] = {}

    p = sub.add_parser("estimate", parents=[common], help="Adaptive LASSO estimate")
    p.add_argument("--y-bar", type=float, help="Sample mean (location model)")
    p.add_argument("--mu", type=float, help="Tuning parameter")
    p.add_argument("--design", help="CSV file with the n x k design matrix (no header)")
    p.add_argument("--response", help="CSV file with the response vector (no header)")
    p.add_argument("--tuning", default=None, help="cv[:folds] to cross-validate mu")
    p.set_defaults(handler=run_estimate)
    subs["estimate"] = p

    p = sub.add_parser("dist", parents=[common], help="Exact finite-sample distribution")
    p.add_argument("--n", type=int)
    p.add_argument("--theta", type=float)
    p.add_argument("--mu", type=float)
    p.add_argument("--grid", default="-4:4:401")
    p.add_argument("--scale", choices=[s.value for s in ScaleKind], default=ScaleKind.SQRT_N.value)
    p.add_argument("--mass", action="store_true", help="Also integrate the continuous part")
    p.set_defaults(handler=run_dist)
    subs["dist"] = p

    p = sub.add_parser("selprob", parents=[common], help="P(theta_hat = 0)")
    p.add_argument("--n", type=int)
    p.add_argument("--theta", type=float)
    p.add_argument("--mu", type=float)
    p.set_defaults(handler=run_selprob)
    subs["selprob"] = p

    p = sub.add_parser("limit", parents=[common], help="Classify a regime and its limit law")
    _add_sequence_flags(p)
    p.add_argument("--scale", choices=[s.value for s in ScaleKind], default=ScaleKind.SQRT_N.value)
    p.add_argument("--grid", default=None, help="Evaluate the limit cdf on a:b:k")
    p.add_argument("--n-grid", default=None, help="Comma separated n for a convergence table")
    p.set_defaults(handler=run_limit)
    subs["limit"] = p

    p = sub.add_parser("rate", parents=[common], help="Uniform convergence rate check")
    _add_sequence_flags(p, with_theta=False)
    p.add_argument("--n-grid", default="100,10000,1000000")
    p.add_argument("--reps", type=int, default=10000)
    p.add_argument("--quantile", type=float, default=0.99)
    p.set_defaults(handler=run_rate)
    subs["rate"] = p

    p = sub.add_parser("impossibility", parents=[common], help="Worst-case cdf estimation experiment")
    p.add_argument("--n", type=int, default=100)
    p.add_argument("--mu", type=float, default=0.1)
    p.add_argument("--t", type=float, default=0.0)
    p.add_argument("--c", type=float, default=1.0)
    p.add_argument("--epsilon", type=float, default=0.3)
    p.add_argument("--estimator", choices=["pretest", "bootstrap"], default="pretest")
    p.add_argument("--m", type=int, default=None, help="Bootstrap subsample size (default n/4)")
    p.add_argument("--bootstrap-reps", type=int, default=200)
    p.add_argument("--grid-size", type=int, default=41)
    p.add_argument("--reps", type=int, default=4000)
    p.add_argument("--scale", choices=[s.value for s in ScaleKind], default=ScaleKind.SQRT_N.value)
    p.add_argument("--mu-rule", default=None, help="Rule reused on subsamples; default mu (n/m)^(mu-exp)")
    p.add_argument("--mu-exp", type=float, default=0.5)
    p.set_defaults(handler=run_impossibility)
    subs["impossibility"] = p

    p = sub.add_parser("montecarlo", parents=[common], help="Non-orthogonal design study")
    # design, tuning and replication defaults come from data/reference/study_defaults.json
    p.add_argument("--n", type=int, default=None)
    p.add_argument("--k", type=int, default=None)
    p.add_argument("--rho", type=float, default=None)
    p.add_argument("--gamma", type=float, default=0.0)
    p.add_argument("--pattern", choices=[t.value for t in ThetaPattern], default=ThetaPattern.CANONICAL.value)
    p.add_argument("--theta", default=None, help="Comma separated theta for --pattern custom")
    p.add_argument("--tuning", default=None, help="fixed:<rule> or cv[:folds]")
    p.add_argument("--replications", type=int, default=None)
    p.add_argument("--no-kde", action="store_true")
    p.set_defaults(handler=run_montecarlo)
    subs["montecarlo"] = p

    p = sub.add_parser("validate", parents=[common], help="Run the invariant suite")
    p.add_argument("--profile", choices=["quick", "full"], default="quick")
    p.add_argument("--check", action="append", default=None, help="Run only the named check (repeatable)")
    p.set_defaults(handler=run_validate)
    subs["validate"] = p

    return parser, subs


# Output

def _clean(obj: Any) -> Any:
    """JSON-safe copy: NaN -> null, +/-inf -> "+inf"/"-inf", numpy scalars -> Python."""
    if isinstance(obj, dict):
        return {str(k): _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [_clean(v) for v in obj.tolist()]
    if isinstance(obj, np.generic):
        obj = obj.item()
    if isinstance(obj, float):
        if math.isnan(obj):
            return None
        if math.isinf(obj):
            return "+inf" if obj > 0 else "-inf"
    return obj


def frame_to_csv(frame: pd.DataFrame) -> str:
    buf = io.StringIO()
    frame.to_csv(buf, index=False, lineterminator="\n", float_format="%.17g")
    return buf.getvalue()


def _write_text(text: str, out: Optional[str]):
    if out is None:
        sys.stdout.write(text)
        return
    path = Path(out)
    with open(path, "w", newline="") as f:
        f.write(text)
    logger.info("Wrote %s", path)


def emit(args: argparse.Namespace, metadata: RunMetadata, payload: dict, table: Optional[pd.DataFrame]):
    """Write one run: a JSON object with metadata, or a CSV table with a metadata sidecar."""
    meta = metadata.model_dump(mode="json")
    if args.format == OutputFormat.CSV.value and table is not None:
        _write_text(frame_to_csv(table), args.out)
        if args.out is not None:
            _write_text(json.dumps(_clean(meta), indent=2) + "\n", args.out + ".meta.json")
        return
    body = {"metadata": meta}
    body.update(payload)
    _write_text(json.dumps(_clean(body), indent=2, allow_nan=False) + "\n", args.out)


def run_params(args: argparse.Namespace) -> dict[str, Any]:
    return {k: v for k, v in vars(args).items() if k not in COMMON_KEYS}


# Subcommands

def _location_model(args: argparse.Namespace) -> LocationModel:
    # not argparse-required so that --config can supply them
    missing = [f"--{k}" for k in ("n", "theta", "mu") if getattr(args, k) is None]
    if missing:
        raise UsageError(f"{args.subcommand} needs {', '.join(missing)}")
    return LocationModel(n=args.n, theta=args.theta, mu=args.mu)


def _tuning(text: str, settings) -> TuningChoice:
    """Parse a tuning flag; cross-validation uses the shipped reference grid and fold count."""
    choice = TuningChoice.parse(text)
    if choice.kind is TuningKind.CROSS_VALIDATED:
        reference = ReferenceData(settings.data_dir)
        update = {"grid": reference.cv_grid()}
        if ":" not in text:
            update["folds"] = int(reference.study_defaults["cross_validation"]["folds"])
        choice = choice.model_copy(update=update)
    return choice


def run_estimate(args, settings) -> tuple[dict, Optional[pd.DataFrame]]:
    if args.design or args.response:
        if not (args.design and args.response):
            raise UsageError("--design and --response go together")
        design = pd.read_csv(args.design, header=None).to_numpy(dtype=float)
        response = pd.read_csv(args.response, header=None).to_numpy(dtype=float).reshape(-1)
        problem = RegressionProblem(design=design, response=response)
        cv_folds = None
        if args.tuning:
            choice = _tuning(args.tuning, settings)
            if choice.kind is not TuningKind.CROSS_VALIDATED:
                raise UsageError("--tuning for estimate only accepts cv[:folds]; pass --mu for a fixed value")
            mu = estimators.cross_validate_mu(problem, choice.folds, choice.grid, args.seed,
                                              settings.solver_tol, settings.solver_max_iter)
            cv_folds = choice.folds
        elif args.mu is not None:
            mu = args.mu
        else:
            raise UsageError("estimate needs --mu or --tuning cv")
        fit = estimators.alasso_general(problem, mu, settings.solver_tol, settings.solver_max_iter)
        payload = {"fit": fit.to_summary()}
        if cv_folds is not None:
            payload["cross_validation"] = {"folds": cv_folds, "mu": mu}
        table = pd.DataFrame({
            "component": np.arange(1, problem.k + 1),
            "estimate": fit.estimate,
            "ls_estimate": fit.ls_estimate,
        })
        return payload, table

    if args.y_bar is None or args.mu is None:
        raise UsageError("estimate needs --y-bar and --mu, or --design/--response")
    theta_hat = estimators.alasso_location(args.y_bar, args.mu)
    payload = {
        "y_bar": args.y_bar,
        "mu": args.mu,
        "theta_hat": theta_hat,
        "hard_threshold": estimators.hard_threshold(args.y_bar, args.mu),
        "selected": theta_hat != 0.0,
    }
    return payload, pd.DataFrame([payload])


def run_dist(args, settings):
    model = _location_model(args)
    scale = ScaleKind(args.scale)
    dist = exact_dist.finite_sample_dist(model, scale)
    table = exact_dist.distribution_table(model, parse_grid(args.grid), scale)
    payload = dist.to_summary()
    payload["continuous_mass"] = dist.continuous_mass
    if args.mass:
        payload["continuous_mass_quadrature"] = exact_dist.continuous_mass(model)
    payload["grid"] = table.to_dict(orient="list")
    return payload, table


def run_selprob(args, settings):
    model = _location_model(args)
    payload = {"n": args.n, "theta": args.theta, "mu": args.mu,
               "selection_prob": exact_dist.selection_prob(model)}
    return payload, pd.DataFrame([payload])


def run_limit(args, settings):
    mu_seq, theta_seq = mu_sequence(args), theta_sequence(args)
    regime = asymptotics.classify_tuning(mu_seq)
    scale = ScaleKind(args.scale)
    if scale is ScaleKind.SQRT_N:
        limit = asymptotics.limit_F(regime, mu_seq, theta_seq)
    else:
        limit = asymptotics.limit_G(mu_seq, theta_seq)
    payload = {
        "mu_sequence": str(mu_seq),
        "theta_sequence": str(theta_seq),
        "regime": regime.model_dump(mode="json"),
        "limit": limit.model_dump(mode="json"),
        "limit_description": limit.describe(),
        "selection_limit": asymptotics.selprob_limit(regime, mu_seq, theta_seq).model_dump(),
    }
    table = None
    if args.grid:
        x = parse_grid(args.grid)
        table = pd.DataFrame({"x": x, "limit_cdf": np.atleast_1d(limit.cdf(x))})
        payload["grid"] = table.to_dict(orient="list")
    if args.n_grid:
        x = parse_grid(args.grid) if args.grid else np.linspace(-4.0, 4.0, 161)
        rows = asymptotics.convergence_table(mu_seq, theta_seq, parse_int_list(args.n_grid), x, scale)
        payload["convergence"] = rows
        if table is None:
            table = pd.DataFrame(rows)
    if table is None:
        table = pd.DataFrame([{"regime": regime.kind.value, "limit": limit.tag.value,
                               "description": limit.describe()}])
    return payload, table


def run_rate(args, settings):
    mu_seq = mu_sequence(args)
    rows = asymptotics.uniform_rate_check(mu_seq, parse_int_list(args.n_grid), reps=args.reps,
                                          seed=args.seed, quantile=args.quantile)
    return {"mu_sequence": str(mu_seq), "rows": rows}, pd.DataFrame(rows)


def run_impossibility(args, settings):
    scale = ScaleKind(args.scale)
    if args.mu_rule:
        rule = PowerLawSequence.parse(args.mu_rule)
    else:
        rule = PowerLawSequence(coef=args.mu * args.n ** args.mu_exp, exponent=args.mu_exp)
    if args.estimator == "pretest":
        spec = CdfEstimatorSpec(kind=EstimatorKind.PRETEST_PLUGIN)
    else:
        m = args.m if args.m is not None else max(1, args.n // 4)
        spec = CdfEstimatorSpec(kind=EstimatorKind.M_OUT_OF_N_BOOTSTRAP, subsample_size=m,
                                bootstrap_reps=args.bootstrap_reps)
    report = cdf_estimation.worst_case_experiment(
        spec, args.n, args.mu, args.t, c=args.c, epsilon=args.epsilon, grid_size=args.grid_size,
        reps=args.reps, seed=args.seed, scale=scale, mu_rule=rule,
    )
    table = pd.DataFrame({"theta": report.theta_grid, "failure_prob": report.failure_prob_by_theta})
    return {"report": report.model_dump(mode="json"), "summary": report.to_summary()}, table


def run_montecarlo(args, settings):
    defaults = ReferenceData(settings.data_dir).study_defaults
    design = defaults["design"]
    tuning = args.tuning or f"fixed:{PowerLawSequence(**defaults['fixed_tuning'])}"
    custom = [float(v) for v in args.theta.split(",")] if args.theta else None
    config = StudyConfig(
        n=args.n or design["n"], k=args.k or design["k"], rho=design["rho"] if args.rho is None else args.rho,
        gamma=args.gamma, theta_pattern=ThetaPattern(args.pattern), custom_theta=custom,
        tuning=_tuning(tuning, settings), replications=args.replications or defaults["replications"],
        seed=args.seed, kde=not args.no_kde,
    )
    result = montecarlo.run_study(config, threads=args.threads)
    frames = montecarlo.study_frames(result)
    if args.out is not None and args.format == OutputFormat.JSON.value:
        stem = Path(args.out)
        for component, frame in frames.items():
            path = stem.with_name(f"{stem.stem}_component{component}.csv")
            _write_text(frame_to_csv(frame), str(path))
    payload = montecarlo.study_summary(result)
    payload["config"] = config.model_dump(mode="json")
    if config.tuning.kind is TuningKind.CROSS_VALIDATED:
        payload["cv_below_fixed_share"] = montecarlo.cv_below_fixed_share(result)
    long = pd.concat([f.assign(component=c) for c, f in frames.items()], ignore_index=True)
    return payload, long[["component"] + [c for c in long.columns if c != "component"]]


def run_validate(args, settings):
    suite = validation.InvariantSuite(args.profile, args.seed)
    table = suite.run(args.check)
    payload = {"profile": args.profile, "passed": bool(table["passed"].all()),
               "checks": table.to_dict(orient="records")}
    return payload, table


# Entry point

def _apply_config(argv: Sequence[str], args: argparse.Namespace, parser, subs) -> argparse.Namespace:
    """Replay an earlier JSON output: its params become defaults, explicit flags still win."""
    try:
        with open(args.config) as f:
            loaded = json.load(f)
    except json.JSONDecodeError as e:
        raise UsageError(f"--config {args.config} is not valid JSON: {e}") from e
    meta = RunMetadata.model_validate(loaded.get("metadata", loaded))
    if meta.subcommand.value != args.subcommand:
        raise UsageError(f"--config holds a '{meta.subcommand.value}' run, not '{args.subcommand}'")
    subs[args.subcommand].set_defaults(seed=meta.seed, **meta.params)
    return parser.parse_args(list(argv))


# Flags whose values may start with a minus sign, e.g. --grid -4:4:401
DASH_VALUE_FLAGS = {"--grid", "--mu-rule", "--theta-rule", "--theta"}


def normalize_argv(argv: Sequence[str]) -> list[str]:
    out: list[str] = []
    tokens = list(argv)
    i = 0
    while i < len(tokens):
        tok = tokens[i]
        nxt = tokens[i + 1] if i + 1 < len(tokens) else None
        if tok in DASH_VALUE_FLAGS and nxt is not None and re.match(r"^-[\d.]", nxt):
            out.append(f"{tok}={nxt}")
            i += 2
            continue
        out.append(tok)
        i += 1
    return out


def _fail(err: BaseException, code: int) -> int:
    sys.stderr.write(json.dumps({"error": type(err).__name__, "message": str(err)}) + "\n")
    return code


def dispatch(argv: Sequence[str]) -> int:
    """Parse argv, run one subcommand and write its output. Returns the exit status."""
    argv = normalize_argv(argv)
    try:
        settings = load_settings()
        parser, subs = build_parser()
        args = parser.parse_args(list(argv))
        if args.config:
            args = _apply_config(argv, args, parser, subs)
        configure_logging(args.log_level or settings.log_level)
        if args.seed is None:
            args.seed = settings.seed
        if args.threads is None:
            args.threads = settings.threads
        if args.threads < 1:
            raise UsageError(f"--threads must be >= 1, got {args.threads}")

        metadata = RunMetadata(version=__version__, subcommand=Subcommand(args.subcommand),
                               seed=args.seed, params=_clean(run_params(args)))
        logger.info("Running %s with seed %d", args.subcommand, args.seed)
        payload, table = args.handler(args, settings)
        emit(args, metadata, payload, table)
        if args.subcommand == Subcommand.VALIDATE.value and not payload["passed"]:
            failed = table.loc[~table["passed"], "check"].tolist()
            raise ValidationFailure(f"{len(failed)} check(s) failed: {', '.join(failed)}", failed)
        return 0
    except SystemExit as e:
        return int(e.code or 0)
    except ValidationError as e:
        return _fail(e, 1)
    except NUMERICAL_ERRORS as e:
        return _fail(e, 2)
    except USAGE_ERRORS as e:
        return _fail(e, 1)
    except OSError as e:
        return _fail(e, 1)


def main():
    sys.exit(dispatch(sys.argv[1:]))


if __name__ == "__main__":
    main()
