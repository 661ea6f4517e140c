#!/usr/bin/env python3
"""NARMA-2 performance versus the coupling ratio kappa2/J4 in the
normalized interpolated model, at short and long input intervals: the
parametric edge-of-chaos sweep. Prints the level-statistics boundaries
on the same grid for orientation."""
import argparse

import numpy as np

from sykqrc import harness, tasks
from sykqrc.ensembles import ModelSpec
from sykqrc.harness import ExperimentConfig
from sykqrc.tasks import SplitSpec

KAPPA_GRID = (0.05, 0.2, 0.5, 1.0, 2.0, 5.0, 10.0, 30.0)


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument('--out', default='out_parametric_edge')
    ap.add_argument('--seed', type=int, default=0)
    ap.add_argument('--realizations', type=int, default=20)
    ap.add_argument('--dt', type=float, nargs='+', default=[1.0, 50.0])
    args = ap.parse_args()

    lcfg = ExperimentConfig(model=ModelSpec(N=6, J4=1.0),
                            sweep_name='kappa_ratio', sweep_values=KAPPA_GRID,
                            realizations=300, master_seed=args.seed)
    lres = harness.run_levels(lcfg)
    print(f"level boundaries (kappa_WD, kappa_Poi): {lres['boundaries']}")

    for dt in args.dt:
        cfg = ExperimentConfig(model=ModelSpec(N=6, J4=1.0, normalize=True),
                               split=SplitSpec(500, 1000, 1000),
                               task=tasks.narma_task(2), dt_in=dt,
                               sweep_name='kappa_ratio',
                               sweep_values=KAPPA_GRID,
                               realizations=args.realizations,
                               master_seed=args.seed,
                               output_dir=f"{args.out}/dt_{dt:g}")
        res = harness.run_qrc_sweep(cfg)
        print(f"== dt_in = {dt}")
        for v, a in zip(res['values'], res['aggregates']):
            print(f"  kappa2/J4={v:7.2f}  NMSE = {a['mean']:.2e} "
                  f"+- {a['stderr']:.1e}")


if __name__ == '__main__':
    main()
