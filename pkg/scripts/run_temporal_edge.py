#!/usr/bin/env python3
"""NARMA-2 performance versus the input interval dt_in, with the Haar
baseline: the temporal edge-of-chaos sweep. Also runs the integrable
SYK2 contrast when asked."""
import argparse

from sykqrc import harness, tasks
from sykqrc.ensembles import ModelSpec
from sykqrc.harness import ExperimentConfig
from sykqrc.tasks import SplitSpec

DT_GRID = (0.1, 0.5, 1.0, 2.0, 5.0, 10.0, 50.0)


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument('--out', default='out_temporal_edge')
    ap.add_argument('--seed', type=int, default=0)
    ap.add_argument('--realizations', type=int, default=20)
    ap.add_argument('--narma-order', type=int, default=2)
    ap.add_argument('--syk2', action='store_true',
                    help='also sweep the integrable model')
    args = ap.parse_args()

    models = [('syk4', ModelSpec(N=6, J4=1.0), True)]
    if args.syk2:
        models.append(('syk2', ModelSpec(N=6, J4=0.0, kappa2=1.0), False))
    for label, model, haar in models:
        cfg = ExperimentConfig(model=model, split=SplitSpec(500, 1000, 1000),
                               task=tasks.narma_task(args.narma_order),
                               sweep_name='dt_in', sweep_values=DT_GRID,
                               include_haar_baseline=haar,
                               realizations=args.realizations,
                               master_seed=args.seed,
                               output_dir=f"{args.out}/{label}")
        res = harness.run_qrc_sweep(cfg)
        print(f"== {label}")
        for v, a in zip(res['values'], res['aggregates']):
            print(f"  dt_in={v:6.1f}  NMSE = {a['mean']:.2e} +- {a['stderr']:.1e}"
                  f"  (n={a['n']})")
        if 'haar' in res:
            h = res['haar'][0]
            print(f"  haar baseline  NMSE = {h['mean']:.2e} +- {h['stderr']:.1e}")


if __name__ == '__main__':
    main()
