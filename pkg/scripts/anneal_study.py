"""Simulated annealing study on a spherical cap.

Minimizes the geodesic distance to the cap axis over a 75-degree cap of
S^5 across independent seeded trials, then reports the temperature
schedule, the per-phase step allocation, and the distribution of final
values against the requested accuracy.

Usage:
    python3 scripts/anneal_study.py --trials 20 --epsilon 0.1 --seed 0
"""

import argparse
import math

import numpy as np

import geowalk as gw


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--trials", type=int, default=20)
    parser.add_argument("--epsilon", type=float, default=0.1)
    parser.add_argument("--fail-prob", type=float, default=0.1)
    parser.add_argument("--max-steps", type=int, default=10**6)
    args = parser.parse_args()

    sphere = gw.Sphere(5)
    axis = np.array([0.0] * 5 + [1.0])
    cap = gw.SphericalCap(sphere, axis, math.radians(75.0))
    target = gw.distance_to(sphere, axis)
    config = gw.AnnealConfig(
        epsilon=args.epsilon,
        fail_prob=args.fail_prob,
        lipschitz=target.lipschitz,
        max_total_steps=args.max_steps,
    )

    result = gw.anneal_trials(cap, target.f_many, config, args.seed, args.trials)
    schedule = result.schedule

    print(f"body: {cap.spec_string}")
    print(
        f"schedule: {schedule.phases} phases, ratio {schedule.ratio:.6f}, "
        f"T {schedule.temps[0]:.4f} -> {schedule.temps[-1]:.6f}"
    )
    print(f"step size: {result.delta:.6f}")
    print(f"allocations: {list(result.allocations)} (total {sum(result.allocations)})")
    print()
    print("trial  final value")
    for k, value in enumerate(result.values):
        flag = "" if value <= args.epsilon else "  *above epsilon*"
        print(f"{k:<7d}{value:.6f}{flag}")
    hits = int((result.values <= args.epsilon).sum())
    print()
    print(f"{hits}/{args.trials} trials reached epsilon = {args.epsilon}")


if __name__ == "__main__":
    main()
