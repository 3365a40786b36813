"""Command line front end: classify, simulate, sweep, verify, figures.

Exit codes: 0 success, 1 verification failure, 2 usage or config error,
3 numerical failure during integration.

Configuration precedence for ``simulate``: built-in defaults, then the YAML
file given with ``--config``, then command line flags.
"""
from __future__ import annotations

import argparse
import copy
import itertools
import json
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

from .config import DEFAULTS, ConfigError, ExperimentConfig, deep_merge, load_file
from .controller import check_validity
from .convergence import settle_time
from .game import PayoffMatrix, Variant, classify, game_from_constants
from .integrator import IntegrationError, integrate
from .io import write_json, write_table, write_trajectory_csv

EXIT_OK, EXIT_VERIFY, EXIT_USAGE, EXIT_NUMERIC = 0, 1, 2, 3
WORKERS_ENV = "ADAPTGAIN_WORKERS"
GRID_KEYS = ("a", "b", "c", "d", "alpha", "beta", "k", "h", "x0", "g0")


class UsageError(Exception):
    pass


def default_workers() -> int:
    raw = os.environ.get(WORKERS_ENV, "1")
    try:
        return max(1, int(raw))
    except ValueError:
        raise UsageError(f"{WORKERS_ENV}={raw!r} is not an integer") from None


# -- classify ---------------------------------------------------------------


def describe_game(m: PayoffMatrix) -> tuple[str, dict]:
    game = classify(m)
    v = game.variant
    data = {
        "variant": v.value,
        "alpha": game.alpha,
        "beta": game.beta,
        "mixed_ne": game.mixed_ne,
        "nash_equilibria": game.nash_equilibria(),
    }
    if v is Variant.DEGENERATE:
        ties = [name for name, tie in (("a=c", m.a == m.c), ("d=b", m.d == m.b)) if tie]
        return f"degenerate ({', '.join(ties)})", data
    consts = f"alpha={game.alpha:g}, beta={game.beta:g}"
    if v is Variant.COORDINATION:
        text = f"coordination, {consts}, x*={game.mixed_ne:g}, pure NE (1,1),(2,2)"
    elif v is Variant.ANTI_COORDINATION:
        text = f"anti-coordination, {consts}, x*={game.mixed_ne:g}, pure NE (1,2),(2,1)"
    else:
        ne = "(1,1)" if v is Variant.DOMINANT_ACTION1 else "(2,2)"
        text = f"dominant-strategy, {consts}, unique NE {ne}"
    return text, data


def cmd_classify(args) -> int:
    try:
        m = PayoffMatrix.from_sequence(args.payoff)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    text, data = describe_game(m)
    print(json.dumps(data) if args.json else text)
    return EXIT_OK


# -- simulate ---------------------------------------------------------------


def _overrides(args) -> dict:
    out: dict = {}
    if args.payoff is not None:
        out["payoff"] = args.payoff
    ctl = {k: getattr(args, k) for k in ("family", "k", "h", "g0", "matrix") if getattr(args, k) is not None}
    if ctl:
        out["controller"] = ctl
    if args.x0 is not None:
        out["initial_x"] = args.x0
    integ = {
        key: getattr(args, attr)
        for key, attr in (("dt", "dt"), ("t_end", "t_end"), ("record_every", "record_every"))
        if getattr(args, attr) is not None
    }
    if integ:
        out["integrator"] = integ
    output = {}
    if args.out is not None:
        output["directory"] = args.out
    if args.format is not None:
        output["formats"] = args.format
    if output:
        out["output"] = output
    return out


def run_case(cfg: ExperimentConfig, out_dir: Path) -> dict:
    """Integrate one configuration and write its artifacts; returns the summary."""
    out_dir.mkdir(parents=True, exist_ok=True)
    cfg.dump(out_dir / "config.yaml")
    sys_ = cfg.system()
    verdict = check_validity(sys_.game, cfg.controller)
    summary = {
        "game": describe_game(cfg.payoff)[1],
        "validity": {"theorem": verdict.theorem.value, "satisfied": verdict.satisfied,
                     "mode": verdict.mode, "detail": verdict.detail},
    }
    try:
        traj = integrate(sys_, cfg.initial_state(), cfg.integrator)
    except IntegrationError as exc:
        summary.update(status="integration_error", error=str(exc), converged_to="error", t_settle=None)
        write_json(summary, out_dir / "summary.json")
        return summary
    t_settle = settle_time(traj, sys_, traj.converged_to)
    terminal = traj.terminal
    summary.update(
        status="ok",
        terminal={"t": float(traj.times[-1]), "x": terminal.x, "g": terminal.g},
        converged_to=traj.converged_to,
        t_settle=t_settle,
        max_gain=float(traj.g.max()),
        max_clamp=traj.max_clamp,
    )
    if "csv" in cfg.formats:
        write_trajectory_csv(traj, out_dir / "trajectory.csv")
    images = [out_dir / f"trajectory.{fmt}" for fmt in cfg.formats if fmt in ("svg", "png")]
    if images:
        from .plotting import plot_trajectory

        plot_trajectory(traj, images)
    write_json(summary, out_dir / "summary.json")
    return summary


def cmd_simulate(args) -> int:
    raw = load_file(args.config) if args.config else {}
    raw = deep_merge(raw, _overrides(args))
    cfg = ExperimentConfig.from_mapping(raw)
    summary = run_case(cfg, cfg.output_dir)
    if summary["status"] != "ok":
        print(f"integration failed: {summary['error']}", file=sys.stderr)
        return EXIT_NUMERIC
    term = summary["terminal"]
    print(
        f"t={term['t']:g} x={term['x']:.6g} g={term['g']:.6g} "
        f"converged_to={summary['converged_to']} validity={summary['validity']['mode']}"
    )
    print(f"wrote {cfg.output_dir}")
    return EXIT_OK


# -- sweep ------------------------------------------------------------------


def expand_grid(raw: dict) -> tuple[list[str], list[dict]]:
    """Cartesian product of the ``grid`` section, in canonical key order."""
    grid = raw.get("grid")
    if not isinstance(grid, dict) or not grid:
        raise ConfigError("sweep config needs a non-empty 'grid' mapping")
    unknown = set(grid) - set(GRID_KEYS)
    if unknown:
        raise ConfigError(f"unknown grid keys: {', '.join(sorted(unknown))}")
    keys = [k for k in GRID_KEYS if k in grid]
    values = []
    for key in keys:
        vals = grid[key]
        if not isinstance(vals, list):
            vals = [vals]
        if not vals:
            raise ConfigError(f"grid key {key!r} has no values")
        try:
            values.append([float(v) for v in vals])
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"grid key {key!r}: {exc}") from exc
    if ("alpha" in keys or "beta" in keys) and "game" not in raw:
        raise ConfigError("sweeping alpha/beta needs a 'game' variant in the config")
    return keys, [dict(zip(keys, combo)) for combo in itertools.product(*values)]


def case_mapping(base: dict, point: dict) -> dict:
    data = copy.deepcopy({k: v for k, v in base.items() if k not in ("grid", "game", "workers")})
    payoff = [float(v) for v in data.get("payoff", DEFAULTS["payoff"])]
    if "alpha" in point or "beta" in point:
        try:
            variant = Variant(base["game"])
        except ValueError as exc:
            raise ConfigError(f"unknown game variant {base['game']!r}") from exc
        current = classify(PayoffMatrix.from_sequence(payoff))
        alpha = point.get("alpha", current.alpha if current.variant is variant else 1.0)
        beta = point.get("beta", current.beta if current.variant is variant else 1.0)
        payoff = list(game_from_constants(variant, alpha, beta).as_tuple())
    for i, key in enumerate("abcd"):
        if key in point:
            payoff[i] = point[key]
    data["payoff"] = payoff
    ctl = dict(data.get("controller", {}))
    for key in ("k", "h", "g0"):
        if key in point:
            ctl[key] = point[key]
    data["controller"] = ctl
    if "x0" in point:
        data["initial_x"] = point["x0"]
    return data


def _sweep_job(job):
    case_id, mapping, out_dir = job
    try:
        cfg = ExperimentConfig.from_mapping(mapping)
    except ConfigError as exc:
        return {"converged_to": "invalid", "t_settle": None, "validity": "", "error": str(exc)}
    summary = run_case(cfg, out_dir / case_id)
    return {
        "converged_to": summary["converged_to"],
        "t_settle": summary["t_settle"],
        "validity": summary["validity"]["mode"],
    }


def cmd_sweep(args) -> int:
    raw = load_file(args.config)
    keys, points = expand_grid(raw)
    out_dir = Path(args.out or raw.get("output", {}).get("directory", "sweep_out"))
    mappings = []
    for i, point in enumerate(points):
        mapping = case_mapping(raw, point)
        mapping["output"] = deep_merge(mapping.get("output", {}), {"directory": str(out_dir / f"case_{i:04d}")})
        mappings.append((f"case_{i:04d}", mapping, out_dir))
    # validate everything before running anything
    for _, mapping, _ in mappings:
        ExperimentConfig.from_mapping(mapping)
    out_dir.mkdir(parents=True, exist_ok=True)
    workers = args.workers or int(raw.get("workers", 0)) or default_workers()
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_sweep_job, mappings))
    else:
        results = [_sweep_job(job) for job in mappings]
    rows = [
        {"case_id": case_id, **point, **result}
        for (case_id, _, _), point, result in zip(mappings, points, results)
    ]
    write_table(rows, ["case_id", *keys, "converged_to", "t_settle", "validity"], out_dir / "sweep.csv")
    print(f"{len(rows)} cases written to {out_dir / 'sweep.csv'}")
    return EXIT_OK


# -- verify -----------------------------------------------------------------


def cmd_verify(args) -> int:
    from .analysis import SUITES, run_suite

    if args.suite == "abm":
        from .abm import run_mean_field_suite

        report = run_mean_field_suite()
    elif args.suite in SUITES:
        report = run_suite(args.suite, workers=args.workers or default_workers())
    else:
        raise UsageError(f"unknown suite {args.suite!r}")
    print(report.summary())
    for params, terminal, why in report.failures:
        term = "-" if terminal is None else f"x={terminal[0]:.4g} g={terminal[1]:.4g}"
        print(f"  FAIL {json.dumps(params)} {term} {why}")
    return EXIT_OK if report.passed else EXIT_VERIFY


# -- figures ----------------------------------------------------------------


def cmd_figures(args) -> int:
    from .reproduce import write_figures

    paths = write_figures(args.out, tuple(args.format))
    print(f"wrote {len(paths)} files to {args.out}")
    return EXIT_OK


# -- parser -----------------------------------------------------------------


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="adaptgain", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    c = sub.add_parser("classify", help="classify a 2x2 game a b c d")
    c.add_argument("payoff", nargs=4, type=float, metavar="X")
    c.add_argument("--json", action="store_true", help="print machine-readable JSON")
    c.set_defaults(func=cmd_classify)

    s = sub.add_parser("simulate", help="integrate one controlled system")
    s.add_argument("--config", help="YAML experiment file")
    s.add_argument("--payoff", nargs=4, type=float, metavar="X")
    s.add_argument("--family", choices=["none", "phi1", "phi2"])
    s.add_argument("--matrix", help="none | g1 | g2 | custom:BITS (g11 g12 g21 g22)")
    s.add_argument("--k", type=float)
    s.add_argument("--h", type=float)
    s.add_argument("--g0", type=float)
    s.add_argument("--x0", type=float)
    s.add_argument("--dt", type=float)
    s.add_argument("--t-end", type=float, dest="t_end")
    s.add_argument("--record-every", type=int, dest="record_every")
    s.add_argument("--out", help="output directory")
    s.add_argument("--format", nargs="+", choices=["csv", "svg", "png"])
    s.set_defaults(func=cmd_simulate)

    w = sub.add_parser("sweep", help="run a parameter grid from a YAML file")
    w.add_argument("--config", required=True)
    w.add_argument("--out")
    w.add_argument("--workers", type=int, help=f"worker processes (default ${WORKERS_ENV} or 1)")
    w.set_defaults(func=cmd_sweep)

    v = sub.add_parser("verify", help="run a certification suite")
    v.add_argument("suite", help="prop2 | thm1 | thm2 | thm3 | abm")
    v.add_argument("--workers", type=int)
    v.set_defaults(func=cmd_verify)

    f = sub.add_parser("figures", help="render the reference figures")
    f.add_argument("--out", default="figures")
    f.add_argument("--format", nargs="+", default=["svg", "png"], choices=["svg", "png"])
    f.set_defaults(func=cmd_figures)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (UsageError, ConfigError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    raise SystemExit(main())
