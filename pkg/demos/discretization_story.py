"""Why discretizing the flow naively fails — and what works instead.

Three acts on the same 2-d quadratic:

1. the obvious forward discretization of the order-3 flow blows up — its
   effective step size grows with k, so divergence is structural, not a
   tuning accident;
2. the rate-matching method with the same smoothness budget keeps its
   f(y_k) - f* <= D_h(x*, x0) / (C eps k^(p)) certificate at every step;
3. at matched time t = delta k (and matched force constant C), the order-2
   method's iterates shadow the integrated flow within a constant factor.

Writes iterate CSVs and the shadowing ratio under
demo_output/discretization_story/.

Run:  python3 demos/discretization_story.py
"""

from __future__ import annotations

from pathlib import Path

import numpy as np

from accelflow.accel import AccelConfig, accelerated, naive_discretization
from accelflow.core import EuclideanMap, builtin_problems, polynomial_triple
from accelflow.flows import build_el_system, integrate
from accelflow.harness import write_plot_data

OUT = Path(__file__).resolve().parent.parent / "demo_output" / "discretization_story"


def main() -> None:
    OUT.mkdir(parents=True, exist_ok=True)
    f = builtin_problems()["quadratic"]
    x0 = np.array([1.0, 1.0])

    print("act 1: naive forward discretization, order 3, eps = 0.01")
    naive = naive_discretization(f, EuclideanMap(), 3, 0.25, 0.01, x0, 100_000)
    term = naive.termination
    print(f"  terminated {term['status']!r} at k = {term['k']} "
          f"(gap there: {naive.f_gaps_x[-1]:.2e})")
    naive.to_csv(OUT / "naive.csv")

    print("\nact 2: rate-matching method, same order, same eps")
    rec = accelerated(f, AccelConfig(p=3, epsilon=0.01, x0=x0), 2000)
    report = rec.invariant_report()["rate_bound"]
    worst = float(np.max(rec.f_gaps_y[1:] / rec.bound_values[1:]))
    print(f"  2000 iterations, final gap {rec.final_gap_y:.2e}")
    print(f"  certificate held at every step: {report['ok']} "
          f"(worst gap/bound ratio {worst:.3f})")
    rec.to_csv(OUT / "rate_matching.csv")

    print("\nact 3: order-2 method vs its continuous limit at t = delta k")
    delta = 0.05
    cfg = AccelConfig(p=2, epsilon=delta**2, x0=x0)
    disc = accelerated(f, cfg, 210)
    flow = integrate(
        build_el_system(EuclideanMap(), f, polynomial_triple(2, cfg.C)),
        x0, 0.1, 10.5,
        {"method": "rk4_adaptive", "rel_tol": 1e-9, "abs_tol": 1e-12},
    )
    times, ratios = [], []
    for k, gap in zip(disc.ks, disc.f_gaps_x):
        t = delta * k
        if 1.0 <= t <= 10.0:
            flow_gap = f.value(flow.interp_state(t)[: flow.d]) - f.min_value
            times.append(t)
            ratios.append(gap / flow_gap)
    ratios = np.asarray(ratios)
    print(f"  method-gap / flow-gap across t in [1, 10]: "
          f"[{ratios.min():.3f}, {ratios.max():.3f}]  (shared C = {cfg.C:g})")
    print("  the two curves oscillate in phase because the force constant matches;")
    print("  rerun with a mismatched C and the ratio explodes by orders of magnitude")
    write_plot_data(OUT / "shadowing_ratio.dat", np.asarray(times), ratios,
                    "t = delta k   method-gap / flow-gap")

    print(f"\nartifacts in {OUT}")


if __name__ == "__main__":
    main()
