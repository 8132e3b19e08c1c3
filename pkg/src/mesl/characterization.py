"""Switching statistics, energy model and result files.

Ensembles start every trial at -x and target +x.  Trial ``i`` always draws
from stream ``(base_seed, i)``, at every voltage of a sweep, so curves are
reproducible and use common random numbers across voltages.
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import asdict, dataclass, field, replace
from pathlib import Path

import numpy as np

from .constants import EPS0
from .gates import GateInstance
from .llg import DT_DEFAULT, export_trajectory, run_ensemble, tilted
from .magnet import MagnetSpec, MeOxideSpec
from .mtj import solve_divider

__all__ = [
    "EnergyInputs", "SweepPoint", "SweepSpec", "TimeDistribution", "calibrate_stt_current", "divider_energy",
    "energy_report", "me_capacitance", "operating_voltage", "read_energy", "read_operating_point",
    "switching_energy", "switching_probability_sweep", "switching_time_distribution",
    "switch_threshold_voltage", "trajectory_export", "wilson_interval", "write_energy_json",
    "write_sweep_csv", "write_tdist_csv",
]

STT_CURRENT_DEFAULT = 2.7e11  # A/m^2; ~6.7 ns mean switching time at 300 K


def me_capacitance(oxide: MeOxideSpec) -> float:
    """Parallel-plate capacitance of the ME oxide, F."""
    return EPS0 * oxide.relative_permittivity * oxide.plate_area / oxide.oxide_thickness


@dataclass(frozen=True)
class EnergyInputs:
    c_me: float
    v_reset: float
    v_data: float
    c_g: float
    v_g: float

    def __post_init__(self):
        if self.c_me < 0 or self.c_g < 0:
            raise ValueError("capacitances must be non-negative")


def switching_energy(inputs: EnergyInputs) -> float:
    """Reset both magnets, write both magnets, and charge the sense transistor gate."""
    return (2.0 * inputs.c_me * inputs.v_reset**2
            + 2.0 * inputs.c_me * inputs.v_data**2
            + inputs.c_g * inputs.v_g**2)


def read_operating_point(gate: GateInstance, trial: int = 0) -> tuple[float, float]:
    """(v_node, R_total) of the sense divider for the gate's current state."""
    c = gate.circuit
    stack = gate.stack(trial)
    v_node = solve_divider(c.r_ref, stack, c.v_read)
    r_total = c.r_ref + stack(v_node)
    return v_node, r_total


def divider_energy(v_read: float, r_total: float, duration: float, c_g: float, v_g: float) -> float:
    """Static divider dissipation plus sense-transistor gate energy."""
    gate_term = c_g * v_g**2
    if v_read == 0 or math.isinf(r_total):
        return gate_term
    return v_read**2 / r_total * duration + gate_term


def read_energy(gate: GateInstance, duration: float = 500e-12, trial: int = 0) -> float:
    """Read energy of ``gate`` in its current state over ``duration``."""
    c = gate.circuit
    _, r_total = read_operating_point(gate, trial)
    return divider_energy(c.v_read, r_total, duration, c.c_g, c.v_g)


def energy_report(oxide: MeOxideSpec, gate: GateInstance, v_data: float, v_reset: float,
                  read_duration: float = 500e-12) -> dict:
    """Itemized write and read energies for one gate."""
    c_me = me_capacitance(oxide)
    c = gate.circuit
    inputs = EnergyInputs(c_me, abs(v_reset), v_data, c.c_g, c.v_g)
    v_node, r_total = read_operating_point(gate)
    divider = divider_energy(c.v_read, r_total, read_duration, 0.0, 0.0)
    return {
        "c_me_F": c_me,
        "v_reset_V": abs(v_reset),
        "v_data_V": v_data,
        "c_g_F": c.c_g,
        "v_g_V": c.v_g,
        "reset_J": 2.0 * c_me * v_reset**2,
        "data_J": 2.0 * c_me * v_data**2,
        "gate_J": c.c_g * c.v_g**2,
        "switching_total_J": switching_energy(inputs),
        "read": {
            "v_read_V": c.v_read,
            "r_total_ohm": r_total,
            "v_node_V": v_node,
            "duration_s": read_duration,
            "divider_J": divider,
            "gate_J": c.c_g * c.v_g**2,
            "total_J": divider + c.c_g * c.v_g**2,
        },
    }


def wilson_interval(k: int, n: int, z: float = 1.959963984540054) -> tuple[float, float]:
    """Wilson score interval for a binomial proportion."""
    if n <= 0:
        raise ValueError("n must be positive")
    p = k / n
    denom = 1.0 + z * z / n
    center = (p + z * z / (2 * n)) / denom
    half = z * math.sqrt(p * (1 - p) / n + z * z / (4 * n * n)) / denom
    lo = 0.0 if k == 0 else max(0.0, center - half)
    hi = 1.0 if k == n else min(1.0, center + half)
    return lo, hi


@dataclass(frozen=True)
class SweepSpec:
    voltages: tuple[float, ...]
    pulse_width: float = 500e-12
    trials: int = 1000
    temperature: float = 300.0
    base_seed: int = 0

    def __post_init__(self):
        object.__setattr__(self, "voltages", tuple(float(v) for v in self.voltages))
        if not self.voltages:
            raise ValueError("voltages must be non-empty")
        if list(self.voltages) != sorted(self.voltages):
            raise ValueError("voltages must be sorted")
        if self.trials < 1:
            raise ValueError("trials must be >= 1")

    @classmethod
    def grid(cls, start: float, stop: float, step: float, **kw) -> "SweepSpec":
        count = int(round((stop - start) / step)) + 1
        return cls(tuple(round(start + i * step, 12) for i in range(count)), **kw)


@dataclass(frozen=True)
class SweepPoint:
    voltage: float
    p_switch: float
    ci_low: float
    ci_high: float
    trials: int
    switched: int


def _start_states(spec: MagnetSpec, n: int) -> np.ndarray:
    m0 = np.zeros((n, 3))
    if spec.temperature == 0:
        m0[:] = tilted((-1.0, 0.0, 0.0))
    else:
        m0[:, 0] = -1.0
    return m0


def switching_probability_sweep(spec: MagnetSpec, oxide: MeOxideSpec, sweep: SweepSpec,
                                dt: float = DT_DEFAULT, threads: int = 1) -> list[SweepPoint]:
    """Fraction of trials that switch -x -> +x within ``sweep.pulse_width`` at each voltage."""
    spec = replace(spec, temperature=sweep.temperature)
    keys = [(i,) for i in range(sweep.trials)]
    out = []
    for v in sweep.voltages:
        res = run_ensemble(_start_states(spec, sweep.trials), keys, sweep.base_seed, spec, oxide,
                           sweep.pulse_width, dt, v_me=v, threads=threads)
        k = int(res.switched.sum())
        lo, hi = wilson_interval(k, sweep.trials)
        out.append(SweepPoint(v, k / sweep.trials, lo, hi, sweep.trials, k))
    return out


def operating_voltage(curve: list[SweepPoint], p_min: float = 0.999) -> float | None:
    """Smallest swept voltage whose switching probability reaches ``p_min``."""
    for pt in curve:
        if pt.p_switch >= p_min:
            return pt.voltage
    return None


def switch_threshold_voltage(curve: list[SweepPoint], p_max: float = 1e-3) -> float | None:
    """Largest swept voltage below which every point switches with probability < ``p_max``."""
    best = None
    for pt in curve:
        if pt.p_switch >= p_max:
            break
        best = pt.voltage
    return best


@dataclass
class TimeDistribution:
    mean: float
    std: float
    switched_fraction: float
    counts: np.ndarray
    edges: np.ndarray
    times: np.ndarray = field(repr=False)
    reliable: bool = True

    @property
    def cv(self) -> float:
        return self.std / self.mean if self.mean > 0 else float("nan")


def switching_time_distribution(spec: MagnetSpec, oxide: MeOxideSpec | None, trials: int, window: float, *,
                                v_me: float = 0.0, stt_current_density: float = 0.0, polarization: float = 0.5,
                                bins: int = 50, hist_range: tuple[float, float] | None = None,
                                base_seed: int = 0, dt: float = DT_DEFAULT, threads: int = 1) -> TimeDistribution:
    """Switching-time statistics under a constant ME voltage or STT current.

    Marked unreliable when fewer than 99% of trials switch inside ``window``.
    """
    keys = [(i,) for i in range(trials)]
    res = run_ensemble(_start_states(spec, trials), keys, base_seed, spec, oxide, window, dt, v_me=v_me,
                       stt_current_density=stt_current_density, polarization=polarization, threads=threads)
    times = res.switching_time[res.switched]
    frac = float(res.switched.mean())
    lo, hi = hist_range or (0.0, window)
    counts, edges = np.histogram(times, bins=bins, range=(lo, hi))
    mean = float(times.mean()) if times.size else float("nan")
    std = float((times - times[0]).std()) if times.size else float("nan")  # shifted: exact 0 for equal times
    return TimeDistribution(mean, std, frac, counts, edges, times, reliable=frac >= 0.99)


def calibrate_stt_current(spec: MagnetSpec, target_mean: float = 5e-9, *, lo: float = 2.0e11, hi: float = 5.0e11,
                          trials: int = 200, window: float = 20e-9, iterations: int = 8, base_seed: int = 0,
                          dt: float = DT_DEFAULT, threads: int = 1) -> tuple[float, float]:
    """Bisect the STT current density for a Monte Carlo mean switching time near ``target_mean``.

    Trials that have not switched count as ``window``; mean time decreases
    with current.  Returns (current density, mean time).
    """
    def mean_time(j):
        d = switching_time_distribution(spec, None, trials, window, stt_current_density=j,
                                        base_seed=base_seed, dt=dt, threads=threads)
        filled = np.concatenate([d.times, np.full(int(round((1 - d.switched_fraction) * trials)), window)])
        return float(filled.mean())

    m = float("nan")
    for _ in range(iterations):
        mid = 0.5 * (lo + hi)
        m = mean_time(mid)
        if m > target_mean:
            lo = mid
        else:
            hi = mid
    j = 0.5 * (lo + hi)
    return j, mean_time(j)


def trajectory_export(outcome, path, decimate: int = 1) -> Path:
    return export_trajectory(outcome, path, decimate)


def _fmt(x: float) -> str:
    return repr(float(x))


def write_sweep_csv(curve: list[SweepPoint], path) -> Path:
    path = Path(path)
    with path.open("w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["V", "p_switch", "ci_low", "ci_high", "trials"])
        for pt in curve:
            w.writerow([_fmt(pt.voltage), _fmt(pt.p_switch), _fmt(pt.ci_low), _fmt(pt.ci_high), pt.trials])
    return path


def write_tdist_csv(dist: TimeDistribution, path) -> Path:
    path = Path(path)
    with path.open("w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["bin_start_s", "bin_end_s", "count"])
        for a, b, c in zip(dist.edges[:-1], dist.edges[1:], dist.counts):
            w.writerow([_fmt(a), _fmt(b), int(c)])
    return path


def write_energy_json(report: dict, path) -> Path:
    path = Path(path)
    path.write_text(json.dumps(report, indent=2, sort_keys=True) + "\n")
    return path


def sweep_as_dicts(curve: list[SweepPoint]) -> list[dict]:
    return [asdict(p) for p in curve]
