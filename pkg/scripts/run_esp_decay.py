#!/usr/bin/env python3
"""Echo-state-property check: Frobenius distance between two reservoir
trajectories started from independent random half-filling states, driven
by a common input sequence."""
import argparse

from sykqrc import harness, tasks
from sykqrc.ensembles import ModelSpec
from sykqrc.harness import ExperimentConfig


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument('--out', default='out_esp')
    ap.add_argument('--seed', type=int, default=0)
    ap.add_argument('--pairs', type=int, default=100)
    ap.add_argument('--steps', type=int, default=500)
    ap.add_argument('--dt', type=float, nargs='+', default=[1.0, 10.0])
    args = ap.parse_args()

    for label, model in [('syk4', ModelSpec(N=6, J4=1.0)),
                         ('syk2', ModelSpec(N=6, J4=0.0, kappa2=1.0))]:
        cfg = ExperimentConfig(model=model, task=tasks.narma_task(2),
                               sweep_name='dt_in',
                               sweep_values=tuple(args.dt),
                               esp_pairs=args.pairs, esp_steps=args.steps,
                               master_seed=args.seed,
                               output_dir=f"{args.out}/{label}")
        res = harness.run_esp(cfg)
        print(f"== {label}")
        for dt, mean, med in zip(res['values'], res['mean'], res['median']):
            print(f"  dt_in={dt:6.1f}  final mean={mean[-1]:.3e}  "
                  f"median={med[-1]:.3e}  ratio={mean[-1] / med[-1]:.1f}")


if __name__ == '__main__':
    main()
