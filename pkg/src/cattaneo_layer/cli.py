"""Command-line entry point: simulation and the verification suites."""

import argparse
import logging
from dataclasses import replace
from pathlib import Path
from typing import Any, Callable, Optional, Sequence

import numpy as np
import pandas as pd

from .checkpoint import CHECKPOINT_SUFFIX, load_checkpoint, save_checkpoint
from .config import RunConfig, load_config
from .energy import (
    check_bootstrap,
    check_decay,
    check_master_inequality,
    check_radius,
    check_smallness,
    constants,
    initial_energy_bound,
)
from .initial_data import get_preset, random_field
from .integrator import DivergenceError, simulate
from .lemmas import energy_bound_suite, poincare_check, product_law_suite, triangle_power_check
from .mms import spatial_study, temporal_study
from .models import EnergyParams, EnergyReport, Regime, RescalingParams, State, Trajectory
from .reports import inequality_summary, reports_to_frame, write_csv, write_summary
from .rescaling import (
    hartmann_coefficient_limits,
    hartmann_scale_terms,
    limit_residual,
    manufactured_fields,
    prandtl_scale_terms,
    table_to_frame,
)
from .spectral import AmplificationOverflowError, Grid

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_DIVERGED = 2
EXIT_SMALLNESS = 3
EXIT_FAILED = 4

PRODUCT_LAW_LIMIT = 1.0 + 1.0e-8
TRIANGLE_SIGMAS = (0.6, 1.0, 2.5, 3.5)
TERM_TOLERANCE = 0.2


# ============================================================================
# Shared helpers
# ============================================================================


def initial_state(config: RunConfig) -> State:
    """Initial data from the configured checkpoint, or else from the named preset."""
    if config.initial.checkpoint:
        state, saved = load_checkpoint(Path(config.initial.checkpoint))
        if saved != config.parameters:
            logger.warning("Checkpoint parameters %s differ from the configuration", saved)
        logger.info("Resuming from %s at t=%.4f", config.initial.checkpoint, state.t)
        return state
    return get_preset(
        config.initial.preset,
        config.grid.build(),
        config.parameters,
        amplitude=config.initial.amplitude,
        relative=config.initial.relative,
    )


def _run(config: RunConfig, initial: State, out: Optional[Path] = None) -> Trajectory:
    """simulate() with a checkpoint written for every recorded snapshot when out is given."""
    cfg = config.integrator.build()
    on_report: Optional[Callable[[State, EnergyReport], None]] = None
    if out is not None:
        folder = out / "checkpoints"

        def write_checkpoint(state: State, report: EnergyReport) -> None:
            n = int(round((state.t - initial.t) / cfg.dt))
            save_checkpoint(folder / f"step_{n:06d}{CHECKPOINT_SUFFIX}", state, config.parameters)

        on_report = write_checkpoint

    return simulate(
        initial,
        config.parameters,
        cfg,
        monitor_every=config.integrator.monitor_every,
        on_report=on_report,
    )


def _diverged(exc: DivergenceError, out: Path, command: str, config: RunConfig) -> int:
    logger.error("%s", exc)
    save_checkpoint(out / f"diverged{CHECKPOINT_SUFFIX}", exc.last_state, config.parameters)
    results = {"diverged_at_step": exc.step, "last_t": exc.last_state.t}
    write_summary(out / "summary.json", command, config.to_dict(), results, EXIT_DIVERGED)
    return EXIT_DIVERGED


# ============================================================================
# Commands
# ============================================================================


def cmd_simulate(config: RunConfig) -> int:
    out = Path(config.output_dir)
    initial = initial_state(config)
    try:
        traj = _run(config, initial, out)
    except DivergenceError as exc:
        return _diverged(exc, out, "simulate", config)

    write_csv(reports_to_frame(traj.reports), out / "report.csv")
    final = traj.reports[-1]
    results = {
        "snapshots": len(traj.snapshots),
        "t_final": final.t,
        "Es_initial": traj.reports[0].Es,
        "Es_final": final.Es,
    }
    write_summary(out / "summary.json", "simulate", config.to_dict(), results, EXIT_OK)
    return EXIT_OK


def cmd_verify_theorem(config: RunConfig) -> int:
    out = Path(config.output_dir)
    params = config.parameters
    ct = constants(params)
    ep = EnergyParams.from_parameters(params)
    initial = initial_state(config)

    small_ok, margin = check_smallness(initial, params, ct)
    e_lhs, e_rhs = initial_energy_bound(initial, params, ep, ct)
    results: dict[str, Any] = {
        "constants": {
            "D_s": ct.D_s,
            "eps_s": ct.eps_s,
            "delta": ct.delta_small,
            "C_decay": ct.C_decay,
            "bootstrap_threshold": ct.bootstrap_threshold,
        },
        "smallness": {"passes": small_ok, "margin": margin},
        "initial_energy": {"lhs": e_lhs, "rhs": e_rhs, "passes": e_lhs <= e_rhs},
    }
    if not small_ok:
        logger.error("Smallness condition fails by %.3e", -margin)
        summary = out / "summary.json"
        write_summary(summary, "verify-theorem", config.to_dict(), results, EXIT_SMALLNESS)
        return EXIT_SMALLNESS

    try:
        traj = _run(config, initial, out)
    except DivergenceError as exc:
        return _diverged(exc, out, "verify-theorem", config)

    decay = check_decay(traj, params, ct)
    master = check_master_inequality(traj, params, ep, ct, reading="derivation")
    master_printed = check_master_inequality(traj, params, ep, ct, reading="printed")
    bootstrap = check_bootstrap(traj, params, ep, ct)
    radius = check_radius(traj, ep)
    checks = {
        "decay": decay,
        "master": master,
        "master_printed": master_printed,
        "bootstrap": bootstrap,
        "radius": radius,
    }
    results.update({name: inequality_summary(rep) for name, rep in checks.items()})
    results["master"]["reported_reading"] = "derivation"

    write_csv(reports_to_frame(traj.reports, decay, master), out / "report.csv")
    exit_code = EXIT_OK if all(rep.all_pass for rep in checks.values()) else EXIT_FAILED
    for name, rep in checks.items():
        logger.info("%s: %s", name, "pass" if rep.all_pass else "FAIL")
    write_summary(out / "summary.json", "verify-theorem", config.to_dict(), results, exit_code)
    return exit_code


def cmd_verify_lemma(config: RunConfig) -> int:
    out = Path(config.output_dir)
    seed = config.seed
    cases = product_law_suite(seed, config.lemma.n_cases)
    write_csv(cases, out / "lemma_cases.csv")
    worst_ratio = float(cases["ratio"].max())

    axis = np.arange(-10, 11, dtype=float)
    triangle = {str(s): triangle_power_check(s, axis, axis) for s in TRIANGLE_SIGMAS}

    rng = np.random.default_rng(seed)
    grid = Grid(32, 65)
    poincare = [poincare_check(random_field(rng, grid, walls="bottom"), 3.0) for _ in range(20)]
    bounds = energy_bound_suite(seed, config.lemma.n_states, config.parameters)

    verdicts = {
        "product_law": worst_ratio <= PRODUCT_LAW_LIMIT,
        "triangle_power": all(r <= 1.0 for r in triangle.values()),
        "poincare": all(lhs <= rhs for lhs, rhs in poincare),
        "energy_bounds": all(b.passes for b in bounds),
    }
    results = {
        "seed": seed,
        "n_cases": len(cases),
        "worst_ratio": worst_ratio,
        "triangle_worst": triangle,
        "poincare_worst": max(lhs / rhs for lhs, rhs in poincare if rhs > 0),
        "energy_bound_states": len(bounds),
        "verdicts": verdicts,
    }
    for name, ok in verdicts.items():
        logger.info("%s: %s", name, "pass" if ok else "FAIL")
    exit_code = EXIT_OK if all(verdicts.values()) else EXIT_FAILED
    write_summary(out / "summary.json", "verify-lemma", config.to_dict(), results, exit_code)
    return exit_code


def cmd_verify_scaling(config: RunConfig) -> int:
    out = Path(config.output_dir)
    sc = config.scaling
    limit = config.parameters
    grid = Grid(sc.n_x, sc.n_y)
    fields = manufactured_fields()

    sweeps = {Regime.PRANDTL: sc.eps_values, Regime.HARTMANN: sc.delta_values}
    if limit.H == 0:
        logger.warning("H = 0 has no Hartmann layer; only the Prandtl rescaling is checked")
        del sweeps[Regime.HARTMANN]

    results: dict[str, Any] = {}
    for regime, small_values in sweeps.items():
        scale = prandtl_scale_terms if regime is Regime.PRANDTL else hartmann_scale_terms
        table = scale(fields, small_values, limit=limit, grid=grid, t_slice=sc.t_slice)
        write_csv(table_to_frame(table), out / f"scaling_{regime.value}.csv")
        gaps = [
            limit_residual(fields, limit, v, regime, grid, sc.t_slice) for v in small_values
        ]
        results[regime.value] = {
            "all_within": table.all_within(TERM_TOLERANCE),
            "degenerate": table.degenerate,
            "limit_gaps": gaps,
        }
    if Regime.HARTMANN in sweeps:
        last = RescalingParams.for_limit(Regime.HARTMANN, min(sc.delta_values), limit)
        results["hartmann"]["coefficient_limits"] = hartmann_coefficient_limits(last)

    passed = all(r["all_within"] for r in results.values())
    exit_code = EXIT_OK if passed else EXIT_FAILED
    write_summary(out / "summary.json", "verify-scaling", config.to_dict(), results, exit_code)
    return exit_code


def cmd_mms(config: RunConfig) -> int:
    out = Path(config.output_dir)
    mc = config.mms
    if not mc.dt_values or not mc.n_y_values:
        logger.error("mms needs at least one dt and one n_y")
        return EXIT_CONFIG
    params = config.parameters
    temporal = temporal_study(params, config.grid.build(), mc.dt_values, t_end=mc.t_end)
    spatial = spatial_study(
        params,
        mc.n_y_values,
        n_x=config.grid.n_x,
        dt=mc.dt_spatial,
        reference_n_y=mc.n_y_reference,
    )
    rows = []
    for study in (temporal, spatial):
        orders = [float("nan")] + study.orders
        for r, e, p in zip(study.resolutions, study.errors, orders):
            rows.append({"kind": study.kind, "resolution": r, "error": e, "order": p})
    write_csv(pd.DataFrame(rows), out / "mms_orders.csv")

    passed = temporal.within() and spatial.within()
    results = {
        "temporal": {"errors": temporal.errors, "orders": temporal.orders},
        "spatial": {"errors": spatial.errors, "orders": spatial.orders},
        "passes": passed,
    }
    if len(mc.dt_values) < 2 or len(mc.n_y_values) < 2:
        logger.error("An order needs at least two resolutions; only errors were written")
        exit_code = EXIT_CONFIG
    else:
        exit_code = EXIT_OK if passed else EXIT_FAILED
    write_summary(out / "summary.json", "mms", config.to_dict(), results, exit_code)
    return exit_code


COMMANDS: dict[str, Callable[[RunConfig], int]] = {
    "simulate": cmd_simulate,
    "verify-theorem": cmd_verify_theorem,
    "verify-lemma": cmd_verify_lemma,
    "verify-scaling": cmd_verify_scaling,
    "mms": cmd_mms,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="clayer",
        description="Cattaneo boundary-layer MHD simulator and verification suites.",
    )
    parser.add_argument("command", choices=sorted(COMMANDS))
    parser.add_argument("--config", type=Path, default=None, help="TOML run configuration")
    parser.add_argument("--seed", type=int, default=None, help="override the configured seed")
    parser.add_argument("--out", type=Path, default=None, help="override the output directory")
    parser.add_argument("--quiet", action="store_true", help="log warnings and errors only")
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.WARNING if args.quiet else logging.INFO,
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
    )
    try:
        config = load_config(args.config)
        if args.seed is not None:
            config = replace(config, seed=args.seed)
        if args.out is not None:
            config = replace(config, output_dir=str(args.out))
        return COMMANDS[args.command](config)
    except (ValueError, AmplificationOverflowError) as exc:
        # ConfigError, CheckpointError, invalid initial data and overflowing weights
        logger.error("%s", exc)
        return EXIT_CONFIG


if __name__ == "__main__":
    raise SystemExit(main())
