"""Fixed-step and step-doubling RK4 integration with dense trajectory records.

The integrator is deliberately hand-rolled: trajectories must be bitwise
reproducible given the same controls, and every recorded sample keeps its
field value so cubic Hermite interpolation matches the integrator's order
(general-purpose adaptive libraries expose neither guarantee).
"""

from __future__ import annotations

import numpy as np

from ..core.points import as_point
from ..errors import DivergenceError, InputError, NumericalError

DIVERGENCE_THRESHOLD = 1e8

class Trajectory:
    """Recorded samples of one integration: times, states, field values.

    states has one row per sample; block(name) views the named slice of the
    state. f_gap and energy are filled when the system can compute them.
    Immutable by convention after construction.
    """

    def __init__(self, kind, blocks, d, times, states, derivs,
                 f_gap=None, energy=None, step_stats=None):
        self.kind = kind
        self.blocks = tuple(blocks)
        self.d = int(d)
        self.times = np.asarray(times, dtype=np.float64)
        self.states = np.asarray(states, dtype=np.float64)
        self.derivs = np.asarray(derivs, dtype=np.float64)
        self.f_gap = None if f_gap is None else np.asarray(f_gap, dtype=np.float64)
        self.energy = None if energy is None else np.asarray(energy, dtype=np.float64)
        self.step_stats = dict(step_stats or {})
        if self.times.ndim != 1 or len(self.times) != len(self.states):
            raise InputError("times and states must align")
        if np.any(np.diff(self.times) <= 0):
            raise InputError("times must be strictly increasing")

    def __len__(self):
        return len(self.times)

    @property
    def layout(self) -> dict[str, slice]:
        return {
            name: slice(i * self.d, (i + 1) * self.d)
            for i, name in enumerate(self.blocks)
        }

    def block(self, name: str) -> np.ndarray:
        return self.states[:, self.layout[name]]

    def final_state(self) -> np.ndarray:
        return self.states[-1].copy()

    def interp_state(self, t: float) -> np.ndarray:
        return self.interp_state_and_deriv(t)[0]

    def interp_state_and_deriv(self, t: float):
        """Cubic Hermite interpolation between recorded samples.

        Exact at sample times (returns the stored row). Raises InputError
        outside the recorded range.
        """
        t = float(t)
        ts = self.times
        if t < ts[0] or t > ts[-1]:
            raise InputError(f"time {t} outside recorded range [{ts[0]}, {ts[-1]}]")
        j = int(np.searchsorted(ts, t))
        if j < len(ts) and ts[j] == t:
            return self.states[j].copy(), self.derivs[j].copy()
        j -= 1
        t0, t1 = ts[j], ts[j + 1]
        y0, y1 = self.states[j], self.states[j + 1]
        d0, d1 = self.derivs[j], self.derivs[j + 1]
        h = t1 - t0
        s = (t - t0) / h
        s2, s3 = s * s, s * s * s
        state = (
            (2 * s3 - 3 * s2 + 1) * y0
            + (s3 - 2 * s2 + s) * h * d0
            + (-2 * s3 + 3 * s2) * y1
            + (s3 - s2) * h * d1
        )
        deriv = (
            (6 * s2 - 6 * s) / h * y0
            + (3 * s2 - 4 * s + 1) * d0
            + (-6 * s2 + 6 * s) / h * y1
            + (3 * s2 - 2 * s) * d1
        )
        return state, deriv

    def to_csv(self, path) -> None:
        """Write t, per-block coordinates, and f_gap/energy when present.

        Floats are written with repr (shortest round-trip form), so equal
        runs produce byte-identical files.
        """
        cols = ["t"]
        for name in self.blocks:
            cols += [f"{name}_{i}" for i in range(self.d)]
        if self.f_gap is not None:
            cols.append("f_gap")
        if self.energy is not None:
            cols.append("energy")
        with open(path, "w", encoding="utf-8") as out:
            out.write(",".join(cols) + "\n")
            for i in range(len(self.times)):
                row = [repr(float(self.times[i]))]
                row += [repr(float(v)) for v in self.states[i]]
                if self.f_gap is not None:
                    row.append(repr(float(self.f_gap[i])))
                if self.energy is not None:
                    row.append(repr(float(self.energy[i])))
                out.write(",".join(row) + "\n")


class _Recorder:
    def __init__(self, sys, d):
        self.sys = sys
        self.d = d
        self.times: list[float] = []
        self.states: list[np.ndarray] = []
        self.derivs: list[np.ndarray] = []

    def push(self, t, y, dy):
        self.times.append(float(t))
        self.states.append(np.array(y))
        self.derivs.append(np.array(dy))

    def build(self, stats) -> Trajectory:
        sys = self.sys
        f_gap = energy = None
        if sys.has_gap:
            f_gap = [sys.gap_value(t, y) for t, y in zip(self.times, self.states)]
        if sys.has_energy:
            energy = [sys.energy_value(t, y) for t, y in zip(self.times, self.states)]
        return Trajectory(
            sys.kind, sys.blocks, self.d, self.times, self.states, self.derivs,
            f_gap=f_gap, energy=energy, step_stats=stats,
        )


def integrate(sys, x0, t0: float, t_end: float, controls: dict,
              initial_state=None,
              divergence_threshold: float = DIVERGENCE_THRESHOLD) -> Trajectory:
    """Integrate a FlowSystem from t0 to t_end.

    controls: {"method": "rk4", "steps": n, "record_every": k (optional)}
    or {"method": "rk4_adaptive", "rel_tol": ..., "abs_tol": ...,
    "initial_step": ..., "record_every": ...}. Deterministic given controls.

    initial_state overrides the system's standard initial state (used by
    force-free oracle checks that start with nonzero velocity). Divergence
    (state norm above the threshold) raises DivergenceError carrying the
    partial trajectory; NaN/Inf in the state raises NumericalError.
    """
    t0, t_end = float(t0), float(t_end)
    if t0 < sys.valid_from - 1e-12:
        raise InputError(f"t0 = {t0} precedes the system's domain [{sys.valid_from}, inf)")
    if t_end <= t0:
        raise InputError(f"need t_end > t0, got [{t0}, {t_end}]")
    method = controls.get("method")
    if method not in ("rk4", "rk4_adaptive"):
        raise InputError(f"unknown integration method {method!r}")

    if initial_state is not None:
        y0 = np.array(initial_state, dtype=np.float64)
        if y0.ndim != 1 or y0.size % len(sys.blocks):
            raise InputError("initial_state does not match the system layout")
    else:
        y0 = sys.initial_state_from(as_point(x0), t0)
    d = y0.size // len(sys.blocks)
    rec = _Recorder(sys, d)
    record_every = int(controls.get("record_every", 1))
    if record_every < 1:
        raise InputError("record_every must be >= 1")

    field = sys.vector_field

    def checked(t, y, partial_stats):
        if not np.all(np.isfinite(y)):
            raise NumericalError(f"non-finite state during integration at t = {t}")
        if float(np.linalg.norm(y)) > divergence_threshold:
            raise DivergenceError(
                f"state norm exceeded {divergence_threshold:g} at t = {t}",
                partial=rec.build(partial_stats), t=t,
            )

    if method == "rk4":
        steps = int(controls["steps"])
        if steps < 1:
            raise InputError("rk4 needs steps >= 1")
        h = (t_end - t0) / steps
        y = y0.copy()
        t = t0
        evals = 0
        for i in range(steps):
            k1 = field(t, y)
            if i % record_every == 0:
                rec.push(t, y, k1)
            k2 = field(t + 0.5 * h, y + (0.5 * h) * k1)
            k3 = field(t + 0.5 * h, y + (0.5 * h) * k2)
            k4 = field(t + h, y + h * k3)
            y = y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
            t = t0 + (i + 1) * h
            evals += 4
            checked(t, y, {"method": "rk4", "steps": steps, "completed": i + 1})
        rec.push(t_end, y, field(t_end, y))
        return rec.build(
            {"method": "rk4", "steps": steps, "completed": steps,
             "field_evals": evals + 1, "record_every": record_every}
        )

    rel_tol = float(controls.get("rel_tol", 1e-8))
    abs_tol = float(controls.get("abs_tol", 1e-12))
    max_steps = int(controls.get("max_steps", 2_000_000))
    h = float(controls.get("initial_step", (t_end - t0) / 100.0))
    y = y0.copy()
    t = t0
    accepted = rejected = evals = 0
    h_min_seen, h_max_seen = np.inf, 0.0

    def rk4_step(t, y, h):
        k1 = field(t, y)
        k2 = field(t + 0.5 * h, y + (0.5 * h) * k1)
        k3 = field(t + 0.5 * h, y + (0.5 * h) * k2)
        k4 = field(t + h, y + h * k3)
        return y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4), k1

    k_here = field(t, y)
    rec.push(t, y, k_here)
    while t < t_end - 1e-14 * max(1.0, abs(t_end)):
        h = min(h, t_end - t)
        if h <= 0:
            break
        y_full, k1 = rk4_step(t, y, h)
        y_half, _ = rk4_step(t, y, 0.5 * h)
        y_two, _ = rk4_step(t + 0.5 * h, y_half, 0.5 * h)
        evals += 12
        err_vec = (y_two - y_full) / 15.0
        scale = abs_tol + rel_tol * np.maximum(np.abs(y), np.abs(y_two))
        err = float(np.max(np.abs(err_vec) / scale))
        if err <= 1.0:
            t = t + h
            y = y_two + err_vec  # local extrapolation to 5th order
            accepted += 1
            h_min_seen, h_max_seen = min(h_min_seen, h), max(h_max_seen, h)
            checked(t, y, {"method": "rk4_adaptive", "accepted": accepted})
            at_end = t >= t_end - 1e-14 * max(1.0, abs(t_end))
            if accepted % record_every == 0 or at_end:
                rec.push(t, y, field(t, y))
                evals += 1
        else:
            rejected += 1
        factor = 0.9 * err ** -0.2 if err > 0 else 5.0
        h *= min(5.0, max(0.2, factor))
        if accepted + rejected > max_steps:
            raise NumericalError(
                f"adaptive integrator exceeded {max_steps} step attempts"
            )
    if rec.times[-1] < t_end - 1e-12 * max(1.0, abs(t_end)):
        rec.push(t_end, y, field(t_end, y))
    return rec.build(
        {"method": "rk4_adaptive", "accepted": accepted, "rejected": rejected,
         "field_evals": evals + 1, "rel_tol": rel_tol, "abs_tol": abs_tol,
         "h_min": h_min_seen, "h_max": h_max_seen, "record_every": record_every}
    )
