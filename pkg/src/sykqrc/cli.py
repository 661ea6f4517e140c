"""Command-line entry point.

Subcommands: levels, sff, qrc, esp, trace.  Each runs at desk-scale
defaults (N=6, 500/1000/1000 split, 20 realizations) unless --paper-mode
selects the long-running N=8, 4000/3000/3000, 500-realization preset or
--config supplies a JSON experiment description.
"""

from __future__ import annotations

import argparse
import dataclasses
import sys

from . import harness, tasks
from .ensembles import ModelSpec
from .harness import ExperimentConfig
from .tasks import SplitSpec


def desk_config(command: str) -> ExperimentConfig:
    cfg = ExperimentConfig(
        model=ModelSpec(N=6, J4=1.0),
        split=SplitSpec(500, 1000, 1000),
        task=tasks.narma_task(2),
        realizations=20,
    )
    if command == 'levels':
        cfg = dataclasses.replace(
            cfg, model=ModelSpec(N=8, J4=1.0), realizations=500,
            sweep_name='kappa_ratio',
            sweep_values=(0.02, 0.05, 0.1, 0.2, 0.5, 1.0, 2.0, 5.0, 10.0,
                          20.0, 30.0, 50.0, 100.0))
    elif command == 'sff':
        cfg = dataclasses.replace(
            cfg, model=ModelSpec(N=8, J4=1.0), realizations=2000,
            sweep_name='system_size', sweep_values=(8,))
    elif command == 'qrc':
        cfg = dataclasses.replace(
            cfg, sweep_name='dt_in',
            sweep_values=(0.1, 0.5, 1.0, 2.0, 5.0, 10.0, 50.0),
            include_haar_baseline=True)
    elif command == 'esp':
        cfg = dataclasses.replace(
            cfg, sweep_name='dt_in', sweep_values=(1.0, 10.0),
            esp_pairs=100, esp_steps=500)
    elif command == 'trace':
        cfg = dataclasses.replace(
            cfg, sweep_name='dt_in', sweep_values=(10.0,),
            task=tasks.stm_task(0), trace_steps=20)
    return cfg


def paper_mode(cfg: ExperimentConfig, command: str) -> ExperimentConfig:
    """Paper-scale preset: N=8, 4000/3000/3000 split, 500 realizations.
    Hours-to-days of dense-matrix work for the QRC sweeps."""
    cfg = dataclasses.replace(
        cfg, model=dataclasses.replace(cfg.model, N=8),
        split=SplitSpec(4000, 3000, 3000))
    if command in ('qrc',):
        cfg = dataclasses.replace(cfg, realizations=500)
    if command == 'esp':
        cfg = dataclasses.replace(cfg, esp_pairs=500, esp_steps=4000)
    if command in ('levels', 'sff'):
        cfg = dataclasses.replace(cfg, realizations=2000)
    return cfg


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog='sykqrc',
                                description='SYK quantum-reservoir experiments')
    sub = p.add_subparsers(dest='command', required=True)
    for name, help_text in [
            ('levels', 'level-spacing-ratio sweeps'),
            ('sff', 'spectral form factor and plateau times'),
            ('qrc', 'reservoir-computing performance sweeps'),
            ('esp', 'echo-state-property convergence'),
            ('trace', 'readout-signal trace dump')]:
        s = sub.add_parser(name, help=help_text)
        s.add_argument('--config', metavar='PATH',
                       help='JSON experiment config (overrides the preset)')
        s.add_argument('--seed', type=int, metavar='U64', help='master seed')
        s.add_argument('--realizations', type=int, metavar='K')
        s.add_argument('--threads', type=int, metavar='K', default=None)
        s.add_argument('--out', metavar='DIR', help='output directory')
        s.add_argument('--paper-mode', action='store_true',
                       help='paper-scale preset (long-running)')
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.config:
        cfg = harness.load_config(args.config)
    else:
        cfg = desk_config(args.command)
        if args.paper_mode:
            cfg = paper_mode(cfg, args.command)
    if args.seed is not None:
        cfg = dataclasses.replace(cfg, master_seed=args.seed)
    if args.realizations is not None:
        cfg = dataclasses.replace(cfg, realizations=args.realizations)
    if args.threads is not None:
        cfg = dataclasses.replace(cfg, threads=args.threads)
    if args.out is not None:
        cfg = dataclasses.replace(cfg, output_dir=args.out)
    if cfg.output_dir is None:
        cfg = dataclasses.replace(cfg, output_dir=f"out_{args.command}")

    runner = {
        'levels': harness.run_levels,
        'sff': harness.run_sff,
        'qrc': harness.run_qrc_sweep,
        'esp': harness.run_esp,
        'trace': harness.run_trace,
    }[args.command]
    results = runner(cfg)
    n_errors = len(results.get('errors', [])) if isinstance(results, dict) else 0
    print(f"{args.command}: wrote results to {cfg.output_dir}"
          + (f" ({n_errors} failed realizations)" if n_errors else ""))
    return 1 if n_errors else 0


if __name__ == '__main__':
    sys.exit(main())
