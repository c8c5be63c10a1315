#!/usr/bin/env python
# -*- coding: utf-8 -*-

"""
Metasurface skin synthesis

Command-line entry point: atom database generation and validation, layout
synthesis, parameter sweeps and re-analysis of stored results.

Exit codes: 0 success, 1 runtime failure, 2 input or validation failure.
"""

import argparse
import copy
import logging
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from datetime import datetime
from typing import Any, Dict, List, Optional

import numpy as np
import pandas as pd

from atomdb.atom_database import IncidenceKey
from atomdb.db_loader import load_db, save_db
from atomdb.substrate_model import SubstrateModel, generate_synthetic_db
from config.config_loader import load_config, validate_config
from scenario.incident_wave import SPEED_OF_LIGHT
from synthesis.run_controller import RunController, analyze_result

logger = logging.getLogger(__name__)

INPUT_ERRORS = (ValueError, FileNotFoundError, KeyError)


def setup_logging(level: str = "INFO") -> None:
    """Log to logs/emskin_<date>.log and to the console."""
    os.makedirs("logs", exist_ok=True)
    logging.basicConfig(
        level=getattr(logging, level.upper(), logging.INFO),
        format='%(asctime)s - %(name)s - %(levelname)s - %(message)s',
        handlers=[
            logging.FileHandler(f"logs/emskin_{datetime.now().strftime('%Y%m%d')}.log"),
            logging.StreamHandler()
        ],
        force=True,
    )


def apply_overrides(config: Dict[str, Any], args: argparse.Namespace) -> Dict[str, Any]:
    config = copy.deepcopy(config)
    if getattr(args, "seed", None) is not None:
        config["seed"] = args.seed
    if getattr(args, "out", None):
        config["output"]["dir"] = args.out
    return validate_config(config)


def cmd_atomdb(args: argparse.Namespace) -> int:
    """Generate a synthetic database or validate a database file."""
    if args.action == "generate":
        cell = args.cell if args.cell is not None else SPEED_OF_LIGHT / args.frequency / 2.0
        model = SubstrateModel.from_preset(args.substrate)
        database = generate_synthetic_db(model, cell, args.step, IncidenceKey(0.0, 0.0, args.frequency))
        path = args.file or os.path.join(args.out or ".", f"atomdb_{args.substrate}.csv")
        save_db(database, path)
        print(f"Wrote {len(database)} entries to {path}; "
              f"min |gamma_te| = {np.min(database.magnitude_db('te')):.2f} dB")
        return 0
    elif args.action == "validate":
        if not args.file:
            raise ValueError("atomdb validate needs --file")
        database = load_db(args.file, cell_size_m=args.cell)
        print(f"{args.file}: {len(database)} entries, "
              f"min |gamma_te| = {np.min(database.magnitude_db('te')):.2f} dB")
        return 0
    else:
        raise ValueError(f"Unknown atomdb action: {args.action}")


def cmd_synthesize(args: argparse.Namespace) -> int:
    """Run one synthesis and write its outputs."""
    config = apply_overrides(load_config(args.config), args)
    output_dir = config["output"]["dir"]
    metrics = RunController(config, workers=args.threads).run_synthesis(output_dir)
    print(f"P_max = {metrics['p_max']:.6f}")
    print(f"Phi_final = {metrics['phi_final']:.6e}")
    print(f"Results written to {os.path.abspath(output_dir)}")
    return 0


def sweep_seed(master_seed: int, index: int) -> int:
    """Seed of one sweep entry, derived from the master seed and the value index."""
    state = np.random.SeedSequence(master_seed, spawn_key=(index,)).generate_state(1, dtype=np.uint64)
    return int(state[0])


def sweep_configs(config: Dict[str, Any], mode: str, values: List[float]) -> List[Dict[str, Any]]:
    """One validated configuration per sweep value."""
    if not values:
        raise ValueError("Sweep needs at least one value")
    configs = []
    for index, value in enumerate(values):
        entry = copy.deepcopy(config)
        if mode == "aperture":
            if float(value) != int(value) or int(value) < 1:
                raise ValueError(f"Aperture sweep values must be positive integers, got {value}")
            entry["scenario"]["grid"]["p"] = int(value)
            entry["scenario"]["grid"]["q"] = int(value)
        elif mode == "angle":
            if entry["target"]["kind"] != "pencil":
                raise ValueError("Angle sweeps need a pencil-beam target")
            entry["target"]["theta_deg"] = float(value)
        else:
            raise ValueError(f"Unknown sweep mode: {mode}")
        entry["seed"] = sweep_seed(config["seed"], index)
        entry["output"]["dir"] = os.path.join(config["output"]["dir"], f"run_{index:03d}_{value:g}")
        configs.append(validate_config(entry))
    return configs


def _run_sweep_entry(payload) -> Dict[str, Any]:
    value, config, workers = payload
    row = {"value": value, "p_max": np.nan, "phi_final": np.nan, "delta_e_db": np.nan, "status": "ok", "error": ""}
    try:
        metrics = RunController(config, workers=workers).run_synthesis(config["output"]["dir"])
        row.update(p_max=metrics["p_max"], phi_final=metrics["phi_final"], delta_e_db=metrics["delta_e_db"])
    except Exception as e:
        logger.warning(f"Sweep entry {value} failed: {e}", exc_info=True)
        row.update(status="failed", error=f"{type(e).__module__}.{type(e).__name__}: {e}")
    return row


def cmd_sweep(args: argparse.Namespace) -> int:
    """Run one synthesis per value and write a summary CSV."""
    config = apply_overrides(load_config(args.config), args)
    configs = sweep_configs(config, args.mode, args.values)
    payloads = [(value, entry, 1) for value, entry in zip(args.values, configs)]

    if args.threads > 1:
        with ProcessPoolExecutor(max_workers=args.threads) as executor:
            rows = list(executor.map(_run_sweep_entry, payloads))
    else:
        rows = [_run_sweep_entry(payload) for payload in payloads]

    summary = pd.DataFrame(rows, columns=["value", "p_max", "phi_final", "delta_e_db", "status", "error"])
    os.makedirs(config["output"]["dir"], exist_ok=True)
    summary_path = os.path.join(config["output"]["dir"], "sweep_summary.csv")
    summary.to_csv(summary_path, index=False, float_format="%.15g")
    logger.info(f"Sweep summary written to {summary_path}")
    print(summary.to_string(index=False))

    failed = int((summary["status"] != "ok").sum())
    if failed:
        logger.error(f"{failed} of {len(summary)} sweep entries failed")
        return 1
    return 0


def cmd_analyze(args: argparse.Namespace) -> int:
    """Recompute maps and metrics from a stored result."""
    output_dir = args.out or os.path.join(os.path.dirname(os.path.abspath(args.result)), "analysis")
    metrics = analyze_result(args.result, output_dir, args.reference, workers=args.threads)
    print(f"P_max = {metrics['p_max']:.6f} against {metrics['reference']}")
    print(f"Delta E at reference peak = {metrics['delta_e_db_at_reference_peak']:.3f} dB")
    return 0


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", type=str, default="config/config.json", help="Path to configuration file")
    common.add_argument("--seed", type=int, default=None, help="Override the configuration seed")
    common.add_argument("--out", type=str, default=None, help="Output directory")
    common.add_argument("--threads", type=int, default=1, help="Worker threads (processes for sweeps)")
    common.add_argument("--log-level", type=str, default="INFO", help="Logging level")

    parser = argparse.ArgumentParser(description="Metasurface skin synthesis")
    commands = parser.add_subparsers(dest="command", required=True)

    atomdb = commands.add_parser("atomdb", parents=[common], help="Generate or validate an atom database")
    atomdb.add_argument("action", choices=["generate", "validate"])
    atomdb.add_argument("--substrate", type=str, default="paper", help="Substrate preset name")
    atomdb.add_argument("--cell", type=float, default=None, help="Unit-cell size in metres")
    atomdb.add_argument("--step", type=float, default=1e-4, help="Printing step in metres")
    atomdb.add_argument("--frequency", type=float, default=5.5e9, help="Working frequency in Hz")
    atomdb.add_argument("--file", type=str, default=None, help="Database CSV path")

    commands.add_parser("synthesize", parents=[common], help="Run one synthesis")

    sweep = commands.add_parser("sweep", parents=[common], help="Run a parameter sweep")
    sweep.add_argument("mode", choices=["aperture", "angle"])
    sweep.add_argument("--values", type=float, nargs="+", required=True,
                       help="Apertures (atoms per side) or target elevations (deg)")

    analyze = commands.add_parser("analyze", parents=[common], help="Recompute maps from a stored result")
    analyze.add_argument("--result", type=str, required=True, help="result.json to analyze")
    analyze.add_argument("--reference", type=str, default=None, help="result.json of the reference design")

    return parser


COMMANDS = {
    "atomdb": cmd_atomdb,
    "synthesize": cmd_synthesize,
    "sweep": cmd_sweep,
    "analyze": cmd_analyze,
}


def main(argv: Optional[List[str]] = None) -> int:
    """Main application entry point"""
    parser = build_parser()
    args = parser.parse_args(argv)
    setup_logging(args.log_level)
    if args.threads < 1:
        parser.error("--threads must be at least 1")

    try:
        return COMMANDS[args.command](args)
    except INPUT_ERRORS as e:
        logger.error(f"Input error: {e}")
        print(f"error: {e}", file=sys.stderr)
        return 2
    except Exception as e:
        logger.error(f"{args.command} failed in {type(e).__module__}: {e}", exc_info=True)
        print(f"error in {type(e).__module__}: {e}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
