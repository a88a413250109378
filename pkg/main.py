"""
trigfit - adaptive trigonometric least squares for nonuniform samples.

Subcommands:
1. fit1d  - fit one sampled signal, stop at the first degree within epsilon
2. curve  - recover a closed planar contour from ordered boundary points
3. seq    - recover missing lines of a line-sampled 2-D sequence
4. diag   - conditioning report of a sampling set (dense oracle)

Exit codes: 0 ok, 1 input error, 2 numerical breakdown, 3 not converged.
"""
import argparse
import glob
import os
import sys
from dataclasses import dataclass
from datetime import datetime
from typing import Optional

import numpy as np

from config import (
    CURVE_GRID_PATH,
    CURVE_JSON_PATH,
    DEFAULT_EPSILON,
    DEFAULT_GRID_SIZE,
    DIAG_JSON_PATH,
    EXIT_INPUT_ERROR,
    EXIT_NOT_CONVERGED,
    EXIT_OK,
    FIT1D_GRID_PATH,
    FIT1D_JSON_PATH,
    LOG_FILE,
    LOG_LEVEL,
    SEQ_OUTPUT_DIR,
    SEQ_SUMMARY_PATH,
    WEIGHTS_FILE,
    WEIGHTS_UNIFORM,
    WEIGHTS_VORONOI,
    get_thread_count,
)
from modules.curve import BoundaryPoints, fit_curve
from modules.errors import DimensionMismatch, GridTooSmall, MalformedInput, TrigFitError, ValidationError
from modules.io_formats import (
    fit_result_to_json,
    read_csv_table,
    save_json,
    write_csv_table,
)
from modules.levinson import fit
from modules.log_setup import configure_logging, get_logger
from modules.oracle import (
    CONDITION_BOUND_FORM,
    build_dense_system,
    condition_bound_1d,
    frobenius_objective,
    spectrum,
)
from modules.sampling import NoiseSpec, mesh_norm, normalize_points, sort_samples, uniform_weights, validate, voronoi_weights
from modules.sequence2d import LineSampleGrid, fit_lines, recover_cross

# ==================================================
# LOGGING
# ==================================================

logger = get_logger("cli")

# ==================================================
# CONFIG
# ==================================================


@dataclass(frozen=True)
class FitConfig:
    epsilon: float
    weights_mode: str
    weights_path: Optional[str]
    max_degree: Optional[int]
    grid_size: Optional[int]
    out_json: str
    out_grid: str
    normalize: bool = False
    timestamp: bool = False

    def __post_init__(self):
        NoiseSpec(self.epsilon)
        if self.grid_size is not None and self.grid_size < 1:
            raise GridTooSmall(f"grid size must be positive, got {self.grid_size}")
        if self.grid_size is not None and self.max_degree is not None and self.grid_size < 2 * self.max_degree + 1:
            raise GridTooSmall(
                f"grid of {self.grid_size} points cannot resolve degree {self.max_degree}"
            )

    @classmethod
    def from_args(cls, args, default_json: str, default_grid: str) -> "FitConfig":
        mode, path = parse_weights(getattr(args, "weights", WEIGHTS_VORONOI))
        return cls(
            epsilon=args.epsilon,
            weights_mode=mode,
            weights_path=path,
            max_degree=parse_max_degree(args.max_degree),
            grid_size=args.grid,
            out_json=args.out_json or default_json,
            out_grid=args.out_grid or default_grid,
            normalize=getattr(args, "normalize", False),
            timestamp=args.timestamp,
        )

    def resolved_grid(self, degree: int) -> int:
        if self.grid_size is not None:
            return self.grid_size
        return max(DEFAULT_GRID_SIZE, 1 << (2 * degree).bit_length())


def parse_weights(text: str):
    if text in (WEIGHTS_VORONOI, WEIGHTS_UNIFORM):
        return text, None
    if text.startswith(WEIGHTS_FILE + ":") and len(text) > len(WEIGHTS_FILE) + 1:
        return WEIGHTS_FILE, text[len(WEIGHTS_FILE) + 1:]
    raise ValidationError(f"--weights must be voronoi, uniform or file:PATH, got {text!r}")


def parse_max_degree(text) -> Optional[int]:
    if text is None or str(text).lower() == "auto":
        return None
    try:
        value = int(text)
    except ValueError:
        raise ValidationError(f"--max-degree must be an integer or 'auto', got {text!r}") from None
    if value < 0:
        raise ValidationError(f"--max-degree must be nonnegative, got {value}")
    return value


def _created_at(config_timestamp: bool) -> Optional[str]:
    return datetime.now().isoformat(timespec="seconds") if config_timestamp else None


def _banner(title: str):
    print("\n" + "=" * 60)
    print(title)
    print("=" * 60)

# ==================================================
# INPUT
# ==================================================


def load_samples(path: str, config: FitConfig):
    """Read x,re[,im], sort, apply the weights mode; returns (samples, normalization)."""
    table = read_csv_table(path, ["x", "re"], {"im": 0.0})
    x = table["x"].to_numpy()
    values = table["re"].to_numpy() + 1j * table["im"].to_numpy()

    normalization = None
    if config.normalize:
        x, offset, period = normalize_points(x)
        normalization = {"offset": offset, "period": period}

    weights = None
    if config.weights_mode == WEIGHTS_FILE:
        weights = read_csv_table(config.weights_path, ["w"])["w"].to_numpy()
        if len(weights) != len(x):
            raise DimensionMismatch(f"{len(x)} samples but {len(weights)} weights in {config.weights_path}")
        x, values, weights = sort_samples(x, values, weights)
    else:
        x, values = sort_samples(x, values)

    samples = validate(x, values, weights, weights_mode=config.weights_mode)
    return samples, normalization


def parse_targets(text: str) -> np.ndarray:
    if os.path.isfile(text):
        return read_csv_table(text, ["tau"])["tau"].to_numpy()
    try:
        return np.array([float(t) for t in text.split(",") if t.strip()])
    except ValueError:
        raise MalformedInput(f"targets must be a file with a 'tau' column or a comma list, got {text!r}") from None


def load_line_files(input_dir: str):
    """Per-line CSVs named <tau>.csv with columns u,x,y; unreadable ones are reported, not fatal."""
    if not os.path.isdir(input_dir):
        raise MalformedInput("not a directory", path=input_dir)

    lines, dropped = [], []
    for path in sorted(glob.glob(os.path.join(input_dir, "*.csv"))):
        name = os.path.basename(path)
        try:
            tau = float(os.path.splitext(name)[0])
        except ValueError:
            logger.debug(f"skipping {name}: file name is not a line position")
            continue
        try:
            table = read_csv_table(path, ["u", "x", "y"])
            u, s = sort_samples(table["u"].to_numpy(), table["x"].to_numpy() + 1j * table["y"].to_numpy())
            lines.append((tau, validate(u, s)))
        except TrigFitError as exc:
            logger.warning(f"dropping line file {name}: {exc}")
            dropped.append({"tau": tau, "file": name, "reason": str(exc)})

    lines.sort(key=lambda item: item[0])
    return lines, dropped

# ==================================================
# SUBCOMMANDS
# ==================================================


def cmd_fit1d(args) -> int:
    config = FitConfig.from_args(args, FIT1D_JSON_PATH, FIT1D_GRID_PATH)
    samples, normalization = load_samples(args.input, config)
    result = fit(samples, config.epsilon, config.max_degree)

    n = config.resolved_grid(result.degree)
    values = result.evaluate_on_grid(n)
    grid = np.arange(n) / n
    if normalization is not None:
        grid = normalization["offset"] + grid * normalization["period"]

    report = fit_result_to_json(result, config.weights_mode, _created_at(config.timestamp))
    if normalization is not None:
        report["normalization"] = normalization
    save_json(config.out_json, report)
    write_csv_table(config.out_grid, {"x": grid, "re": values.real, "im": values.imag})

    _banner(f"fit1d: {samples.count} samples -> degree {result.degree}")
    print(f"   converged:    {result.converged}")
    print(f"   achieved eps: {result.achieved_eps:.6e} (target {config.epsilon})")
    print(f"   report:       {config.out_json}")
    print(f"   grid:         {config.out_grid} ({n} points)")
    return EXIT_OK if result.converged else EXIT_NOT_CONVERGED


def cmd_curve(args) -> int:
    config = FitConfig.from_args(args, CURVE_JSON_PATH, CURVE_GRID_PATH)
    table = read_csv_table(args.input, ["x", "y"])
    points = BoundaryPoints.from_xy(table["x"].to_numpy(), table["y"].to_numpy())
    curve_fit = fit_curve(points, config.epsilon, config.max_degree)

    n = config.resolved_grid(curve_fit.fit.degree)
    contour = curve_fit.contour(n)

    report = fit_result_to_json(curve_fit.fit, WEIGHTS_VORONOI, _created_at(config.timestamp))
    report["length"] = curve_fit.param.length
    save_json(config.out_json, report)
    write_csv_table(config.out_grid, {"x": contour[:, 0], "y": contour[:, 1]})

    _banner(f"curve: {points.count} boundary points -> degree {curve_fit.fit.degree}")
    print(f"   center:       ({curve_fit.center.real:.6g}, {curve_fit.center.imag:.6g})")
    print(f"   converged:    {curve_fit.fit.converged}")
    print(f"   contour:      {config.out_grid} ({n} points)")
    return EXIT_OK if curve_fit.fit.converged else EXIT_NOT_CONVERGED


def cmd_seq(args) -> int:
    NoiseSpec(args.epsilon)
    n_jobs = args.threads or get_thread_count()
    lines, dropped_files = load_line_files(args.input_dir)
    targets = parse_targets(args.targets)
    if not lines:
        raise MalformedInput("no readable line files", path=args.input_dir)

    grid = LineSampleGrid(
        line_positions=[tau for tau, _ in lines],
        per_line_samples=[samples for _, samples in lines],
        target_lines=targets,
    )
    line_fits = fit_lines(grid, args.epsilon, parse_max_degree(args.max_degree), n_jobs)
    result = recover_cross(grid, line_fits, args.cross_degree, args.grid, n_jobs)

    out_dir = args.out_dir or SEQ_OUTPUT_DIR
    u = np.arange(result.grid_size) / result.grid_size
    target_files = []
    for index, tau in enumerate(result.target_lines):
        name = f"target_{tau:.6g}.csv"
        contour = result.contour(index)
        write_csv_table(os.path.join(out_dir, name), {"u": u, "x": contour[:, 0], "y": contour[:, 1]})
        target_files.append({"tau": float(tau), "file": name})

    summary = {
        "lines": [
            {
                "tau": float(tau),
                "degree": int(f.degree),
                "converged": bool(f.converged),
                "achieved_eps": float(f.achieved_eps),
            }
            for tau, f in zip(line_fits.positions, line_fits.fits)
        ],
        "dropped": dropped_files + [
            {"tau": tau, "reason": reason} for tau, reason in line_fits.dropped
        ],
        "cross_degree": int(result.cross_degree),
        "grid_size": int(result.grid_size),
        "targets": target_files,
    }
    if args.timestamp:
        summary["created_at"] = _created_at(True)
    out_json = args.out_json or SEQ_SUMMARY_PATH
    save_json(out_json, summary)

    _banner(f"seq: {len(line_fits.fits)} lines -> {len(target_files)} targets")
    print(f"   cross degree: {result.cross_degree}")
    print(f"   dropped:      {len(summary['dropped'])}")
    print(f"   summary:      {out_json}")
    return EXIT_OK


def cmd_diag(args) -> int:
    if args.degree < 0:
        raise ValidationError(f"--degree must be nonnegative, got {args.degree}")
    mode, path = parse_weights(args.weights)
    config = FitConfig(
        epsilon=0.0,
        weights_mode=mode,
        weights_path=path,
        max_degree=args.degree,
        grid_size=None,
        out_json=args.out_json or DIAG_JSON_PATH,
        out_grid="",
        normalize=args.normalize,
    )
    samples, _ = load_samples(args.input, config)
    degree = args.degree
    gamma = mesh_norm(samples.points)
    lam_min, lam_max, cond = spectrum(build_dense_system(samples, degree))
    bound = condition_bound_1d(gamma, degree)

    report = {
        "count": samples.count,
        "degree": degree,
        "weights_mode": mode,
        "mesh_norm": gamma,
        "lambda_min": lam_min,
        "lambda_max": lam_max,
        "cond": cond,
        "cond_bound": "inapplicable" if bound is None else bound,
        "cond_bound_form": CONDITION_BOUND_FORM,
        "frobenius": {
            WEIGHTS_VORONOI: frobenius_objective(samples.points, voronoi_weights(samples.points), degree),
            WEIGHTS_UNIFORM: frobenius_objective(samples.points, uniform_weights(samples.points), degree),
        },
    }
    if args.timestamp:
        report["created_at"] = _created_at(True)
    save_json(config.out_json, report)

    _banner(f"diag: {samples.count} points at degree {degree}")
    print(f"   mesh norm:    {gamma:.6g}")
    print(f"   cond(T_M):    {cond:.6g}")
    print(f"   bound:        {report['cond_bound']}")
    print(f"   bound form:   {CONDITION_BOUND_FORM}")
    return EXIT_OK

# ==================================================
# PARSER
# ==================================================


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--log-file", nargs="?", const=LOG_FILE, default=None,
                        help=f"also log to a file (default {LOG_FILE})")
    common.add_argument("--log-level", default=LOG_LEVEL)
    common.add_argument("--threads", type=int, default=None, help="worker cap, overrides TRIGFIT_THREADS")
    common.add_argument("--timestamp", action="store_true", help="add created_at to JSON outputs")

    fitting = argparse.ArgumentParser(add_help=False)
    fitting.add_argument("--epsilon", type=float, default=DEFAULT_EPSILON)
    fitting.add_argument("--max-degree", default="auto")
    fitting.add_argument("--grid", type=int, default=None)
    fitting.add_argument("--out-json", default=None)

    parser = argparse.ArgumentParser(prog="trigfit", description=__doc__.split("\n")[1])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("fit1d", parents=[common, fitting], help="fit one nonuniformly sampled signal")
    p.add_argument("--input", required=True, help="CSV with columns x,re[,im]")
    p.add_argument("--weights", default=WEIGHTS_VORONOI, help="voronoi, uniform or file:PATH")
    p.add_argument("--normalize", action="store_true", help="map x affinely onto [0, 1)")
    p.add_argument("--out-grid", default=None)
    p.set_defaults(handler=cmd_fit1d)

    p = sub.add_parser("curve", parents=[common, fitting], help="recover a closed contour")
    p.add_argument("--input", required=True, help="CSV with columns x,y ordered along the contour")
    p.add_argument("--out-grid", default=None)
    p.set_defaults(handler=cmd_curve)

    p = sub.add_parser("seq", parents=[common, fitting], help="recover lines of a 2-D sequence")
    p.add_argument("--input-dir", required=True, help="directory of <tau>.csv files with columns u,x,y")
    p.add_argument("--targets", required=True, help="file with a 'tau' column or a comma list")
    p.add_argument("--cross-degree", type=int, default=None)
    p.add_argument("--out-dir", default=None)
    p.set_defaults(handler=cmd_seq)

    p = sub.add_parser("diag", parents=[common], help="conditioning report")
    p.add_argument("--input", required=True, help="CSV with columns x,re[,im]")
    p.add_argument("--degree", type=int, required=True)
    p.add_argument("--weights", default=WEIGHTS_VORONOI)
    p.add_argument("--normalize", action="store_true")
    p.add_argument("--out-json", default=None)
    p.set_defaults(handler=cmd_diag)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse exits 2 on usage errors, which is the breakdown code here
        return EXIT_OK if exc.code in (0, None) else EXIT_INPUT_ERROR
    configure_logging(args.log_level, args.log_file)

    try:
        return args.handler(args)
    except TrigFitError as exc:
        logger.error(f"{type(exc).__name__}: {exc}")
        print(f"error: {exc}", file=sys.stderr)
        return exc.exit_code


if __name__ == "__main__":
    sys.exit(main())
