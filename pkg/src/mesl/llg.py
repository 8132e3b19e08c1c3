"""Stochastic LLG integration (Stratonovich Heun) for one or many macrospins.

The equation is integrated in physical time,

    dm/dt = -g (m x H) - g alpha m x (m x H),   g = gamma mu0 / (1 + alpha**2),

with H the effective field.  One thermal-field draw per step is shared by
predictor and corrector, and m is renormalized after every step.

Batches are stored component-major (shape ``(3, n)``) so the inner loop works
on contiguous rows.  Every row owns its own random stream; a row's result
never depends on which other rows share its batch.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from ._kernel import heun_block
from .constants import MU0
from .errors import ConfigError, InvalidStateError
from .magnet import MagnetSpec, MeOxideSpec, interface_field_max, stt_strength, thermal_sigma

DT_DEFAULT = 1e-13
DT_MAX = 1e-12
SWITCH_THRESHOLD = 0.9
INITIAL_TILT_DEG = 1.0
NOISE_CHUNK = 2048


def stream(base_seed: int, *key: int) -> np.random.Generator:
    """Philox stream for ``(base_seed, *key)``; independent of creation order."""
    seq = np.random.SeedSequence(int(base_seed), spawn_key=tuple(int(k) for k in key))
    return np.random.Generator(np.random.Philox(seq))


def tilted(axis, degrees: float = INITIAL_TILT_DEG, toward=(0.0, 0.0, 1.0)) -> np.ndarray:
    """Unit vector ``degrees`` away from ``axis`` in the plane of ``axis`` and ``toward``."""
    a = np.asarray(axis, dtype=float)
    a = a / np.linalg.norm(a)
    t = np.asarray(toward, dtype=float)
    t = t - a * np.dot(a, t)
    t = t / np.linalg.norm(t)
    th = math.radians(degrees)
    return math.cos(th) * a + math.sin(th) * t


def check_unit(m, tol: float = 1e-6) -> np.ndarray:
    m = np.asarray(m, dtype=float)
    if m.shape[-1] != 3 or not np.all(np.isfinite(m)):
        raise InvalidStateError(f"magnetization must be a finite 3-vector, got {m!r}")
    norms = np.linalg.norm(m, axis=-1)
    if np.any(np.abs(norms - 1.0) > tol):
        raise InvalidStateError(f"magnetization must be a unit vector (|m| = {norms!r})")
    return m


def check_dt(dt: float) -> None:
    if not (math.isfinite(dt) and 0 < dt <= DT_MAX):
        raise ConfigError(f"dt must lie in (0, {DT_MAX:g}] s, got {dt!r}", key="dt")


@dataclass(frozen=True)
class Segment:
    """Constant drive held for ``duration`` seconds."""

    duration: float
    v_me: float = 0.0
    stt_current_density: float = 0.0
    stt_axis: tuple[float, float, float] = (1.0, 0.0, 0.0)

    def __post_init__(self):
        if not (math.isfinite(self.duration) and self.duration > 0):
            raise ValueError(f"segment duration must be positive, got {self.duration!r}")
        if not math.isfinite(self.v_me):
            raise ValueError("v_me must be finite")
        if self.stt_current_density != 0.0:
            n = math.sqrt(sum(c * c for c in self.stt_axis))
            if abs(n - 1.0) > 1e-9:
                raise ValueError(f"stt_axis must be a unit vector, got {self.stt_axis!r}")


@dataclass(frozen=True)
class DriveWaveform:
    segments: tuple[Segment, ...]

    def __post_init__(self):
        object.__setattr__(self, "segments", tuple(self.segments))
        if not self.segments:
            raise ValueError("waveform needs at least one segment")

    @classmethod
    def pulse(cls, v_me: float, duration: float) -> "DriveWaveform":
        return cls((Segment(duration, v_me=v_me),))

    @classmethod
    def stt(cls, current_density: float, duration: float, axis=(1.0, 0.0, 0.0)) -> "DriveWaveform":
        return cls((Segment(duration, stt_current_density=current_density, stt_axis=tuple(axis)),))

    @property
    def total_duration(self) -> float:
        return sum(s.duration for s in self.segments)


@dataclass
class SimOutcome:
    times: np.ndarray  # (k,) seconds
    trajectory: np.ndarray  # (k, 3)
    switched: bool
    switching_time: float | None
    final_m: np.ndarray
    total_duration: float = 0.0


@dataclass
class BatchResult:
    """Per-row outcome of an ensemble run."""

    final_m: np.ndarray  # (n, 3)
    switched: np.ndarray  # (n,) bool
    switching_time: np.ndarray  # (n,) seconds, nan where not switched
    times: np.ndarray | None = None  # (k,)
    trajectory: np.ndarray | None = None  # (k, n, 3)
    max_norm_error: float = 0.0


def _cross(a0, a1, a2, b0, b1, b2):
    return a1 * b2 - a2 * b1, a2 * b0 - a0 * b2, a0 * b1 - a1 * b0


class _Rhs:
    """Deterministic field + LLG torque for a fixed drive, component-major."""

    def __init__(self, spec: MagnetSpec, oxide: MeOxideSpec | None, v_me, stt_j, stt_axis, polarization, h_ext):
        nxx, nyy, nzz = spec.factors
        self.kx = -spec.ms * nxx
        self.ky = -spec.ms * nyy
        self.kz = -spec.ms * nzz + interface_field_max(spec)
        field_per_volt = 0.0 if oxide is None else oxide.field_per_volt
        self.hx0 = field_per_volt * np.asarray(v_me, dtype=float)
        self.hy0 = 0.0
        self.hz0 = 0.0
        if h_ext is not None:
            self.hx0 = self.hx0 + h_ext[0]
            self.hy0 = h_ext[1]
            self.hz0 = h_ext[2]
        self.beta = stt_strength(stt_j, spec, polarization) if stt_j else 0.0
        self.p = tuple(float(c) for c in stt_axis)
        self.g = spec.gamma_prime * MU0
        self.ga = self.g * spec.alpha

    def __call__(self, m0, m1, m2, th):
        hx = self.kx * m0 + self.hx0
        hy = self.ky * m1 + self.hy0
        hz = self.kz * m2 + self.hz0
        if th is not None:
            hx = hx + th[0]
            hy = hy + th[1]
            hz = hz + th[2]
        if self.beta:
            s0, s1, s2 = _cross(m0, m1, m2, *self.p)
            hx = hx + self.beta * s0
            hy = hy + self.beta * s1
            hz = hz + self.beta * s2
        c0, c1, c2 = _cross(m0, m1, m2, hx, hy, hz)
        d0, d1, d2 = _cross(m0, m1, m2, c0, c1, c2)
        g, ga = self.g, self.ga
        return -g * c0 - ga * d0, -g * c1 - ga * d1, -g * c2 - ga * d2


def integrate(
    m0,
    spec: MagnetSpec,
    oxide: MeOxideSpec | None,
    duration: float,
    dt: float = DT_DEFAULT,
    *,
    v_me=0.0,
    stt_current_density: float = 0.0,
    stt_axis=(1.0, 0.0, 0.0),
    polarization: float = 0.5,
    h_ext=None,
    rngs=None,
    target=(1.0, 0.0, 0.0),
    threshold: float = SWITCH_THRESHOLD,
    record_every: int = 0,
    t0: float = 0.0,
) -> BatchResult:
    """Integrate ``n`` independent macrospins under one constant drive.

    ``m0`` has shape ``(n, 3)``; ``v_me`` is a scalar or per-row array.
    ``rngs`` is a sequence of ``n`` generators (one per row); it is required
    when ``spec.temperature`` is positive.  ``target`` is a 3-vector or an
    ``(n, 3)`` array.  ``record_every > 0`` stores every k-th state.
    """
    check_dt(dt)
    m = check_unit(np.atleast_2d(np.asarray(m0, dtype=float))).copy()
    n = m.shape[0]
    if not (math.isfinite(duration) and duration >= 0):
        raise ValueError(f"duration must be finite and non-negative, got {duration!r}")
    n_steps = int(round(duration / dt))
    sigma = thermal_sigma(spec, dt)
    if sigma > 0.0 and (rngs is None or len(rngs) != n):
        raise ValueError("one random stream per row is required at T > 0")

    field_per_volt = 0.0 if oxide is None else oxide.field_per_volt
    h_ext = (0.0, 0.0, 0.0) if h_ext is None else tuple(float(c) for c in h_ext)
    hx0 = field_per_volt * np.broadcast_to(np.asarray(v_me, dtype=float), (n,)) + h_ext[0]
    nxx, nyy, nzz = spec.factors
    kx, ky, kz = -spec.ms * nxx, -spec.ms * nyy, -spec.ms * nzz + interface_field_max(spec)
    beta = stt_strength(stt_current_density, spec, polarization) if stt_current_density else 0.0
    px, py, pz = (float(c) for c in stt_axis)
    g = spec.gamma_prime * MU0
    tgt = np.ascontiguousarray(np.broadcast_to(np.asarray(target, dtype=float), (n, 3)))

    above = (m * tgt).sum(axis=1) >= threshold
    since = np.where(above, t0, np.nan)
    norm_err = np.zeros(n)  # worst post-renormalization deviation

    n_rec = n_steps // record_every if record_every else 0
    rec = np.empty((n_rec + 1 if record_every else 0, n, 3))
    if record_every:
        rec[0] = m
    rec_view = rec[1:] if record_every else np.empty((0, n, 3))
    empty_noise = np.empty((n, 0, 3))

    done = 0
    while done < n_steps:
        k = min(NOISE_CHUNK, n_steps - done)
        if sigma > 0.0:
            noise = np.empty((n, k, 3))
            for i, gen in enumerate(rngs):
                noise[i] = gen.standard_normal((k, 3))
            noise *= sigma
        else:
            noise = empty_noise
        heun_block(m, noise, sigma > 0.0, hx0, h_ext[1], h_ext[2], kx, ky, kz, beta, px, py, pz,
                   g, g * spec.alpha, dt, k, done, t0, tgt, threshold, above, since,
                   record_every, rec_view, 1, norm_err)
        done += k

    times = t0 + (np.arange(n_rec + 1) * record_every) * dt if record_every else None
    return BatchResult(
        final_m=m,
        switched=above,
        switching_time=since,
        times=times,
        trajectory=rec if record_every else None,
        max_norm_error=float(norm_err.max()) if n else 0.0,
    )


def heun_step(m, spec: MagnetSpec, oxide: MeOxideSpec | None, dt: float, *, v_me=0.0, h_th=None,
              stt_current_density: float = 0.0, stt_axis=(1.0, 0.0, 0.0), polarization: float = 0.5,
              h_ext=None) -> np.ndarray:
    """One Stratonovich Heun step for a single magnetization.

    ``h_th`` is the thermal field for this step (A/m); it is used unchanged in
    both predictor and corrector.
    """
    m = check_unit(np.asarray(m, dtype=float))
    rhs = _Rhs(spec, oxide, float(v_me), stt_current_density, stt_axis, polarization, h_ext)
    th = None if h_th is None else tuple(float(c) for c in h_th)
    k = rhs(m[0], m[1], m[2], th)
    p = [m[i] + dt * k[i] for i in range(3)]
    q = rhs(p[0], p[1], p[2], th)
    out = np.array([m[i] + 0.5 * dt * (k[i] + q[i]) for i in range(3)])
    return out / math.sqrt(out[0] ** 2 + out[1] ** 2 + out[2] ** 2)


def simulate(
    m0,
    spec: MagnetSpec,
    oxide: MeOxideSpec | None,
    waveform: DriveWaveform,
    dt: float = DT_DEFAULT,
    seed: int = 0,
    target=(1.0, 0.0, 0.0),
    *,
    record_every: int = 1,
    polarization: float = 0.5,
    h_ext=None,
    rng: np.random.Generator | None = None,
) -> SimOutcome:
    """Run one trajectory through every segment of ``waveform``.

    The result is a deterministic function of (m0, seed, dt, waveform).
    ``switched`` holds when m . target >= 0.9 from ``switching_time`` to the
    end of the run.
    """
    m = check_unit(np.asarray(m0, dtype=float))
    if m.shape != (3,):
        raise InvalidStateError(f"m0 must have shape (3,), got {m.shape}")
    check_dt(dt)
    if rng is None:
        rng = stream(seed, 0)
    rngs = [rng]
    times, traj = [], []
    since = np.nan
    t = 0.0
    state = m[None, :]
    for i, seg in enumerate(waveform.segments):
        res = integrate(
            state, spec, oxide, seg.duration, dt,
            v_me=seg.v_me, stt_current_density=seg.stt_current_density, stt_axis=seg.stt_axis,
            polarization=polarization, h_ext=h_ext, rngs=rngs, target=target,
            record_every=record_every, t0=t,
        )
        # continue a sustained run across segment boundaries
        if res.switched[0]:
            seg_since = res.switching_time[0]
            since = since if (not math.isnan(since) and seg_since == t) else seg_since
        else:
            since = np.nan
        if record_every:
            start = 0 if i == 0 else 1
            times.append(res.times[start:])
            traj.append(res.trajectory[start:, 0, :])
        t += int(round(seg.duration / dt)) * dt
        state = res.final_m
    final = state[0]
    switched = not math.isnan(since)
    return SimOutcome(
        times=np.concatenate(times) if times else np.empty(0),
        trajectory=np.concatenate(traj) if traj else np.empty((0, 3)),
        switched=switched,
        switching_time=float(since) if switched else None,
        final_m=final,
        total_duration=t,
    )


def export_trajectory(outcome: SimOutcome, path, decimate: int = 1) -> Path:
    """Write ``t_s,mx,my,mz`` rows; ``decimate <= 0`` writes the header only."""
    path = Path(path)
    try:
        with path.open("w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["t_s", "mx", "my", "mz"])
            if decimate > 0:
                for t, mv in zip(outcome.times[::decimate], outcome.trajectory[::decimate]):
                    w.writerow([repr(float(t)), repr(float(mv[0])), repr(float(mv[1])), repr(float(mv[2]))])
    except OSError as exc:
        raise OSError(exc.errno, f"cannot write trajectory: {exc.strerror}", str(path)) from exc
    return path


def _ensemble_chunk(args):
    m0, keys, base_seed, spec, oxide, duration, dt, v_me, kw = args
    rngs = [stream(base_seed, *k) for k in keys] if spec.temperature > 0 else None
    res = integrate(m0, spec, oxide, duration, dt, v_me=v_me, rngs=rngs, **kw)
    return res.final_m, res.switched, res.switching_time, res.max_norm_error


def run_ensemble(
    m0,
    keys,
    base_seed: int,
    spec: MagnetSpec,
    oxide: MeOxideSpec | None,
    duration: float,
    dt: float = DT_DEFAULT,
    *,
    v_me=0.0,
    threads: int = 1,
    chunk: int = 512,
    **kw,
) -> BatchResult:
    """Integrate rows whose noise streams are keyed by ``(base_seed, *keys[i])``.

    Rows are split into fixed chunks and optionally farmed out to
    ``threads`` worker processes; the result does not depend on either.
    """
    m0 = np.atleast_2d(np.asarray(m0, dtype=float))
    n = m0.shape[0]
    keys = [tuple(k) for k in keys]
    if len(keys) != n:
        raise ValueError("need one key per row")
    v = np.broadcast_to(np.asarray(v_me, dtype=float), (n,))
    target = kw.pop("target", (1.0, 0.0, 0.0))
    target = np.asarray(target, dtype=float)
    jobs = []
    for lo in range(0, n, chunk):
        hi = min(n, lo + chunk)
        tk = dict(kw)
        tk["target"] = target[lo:hi] if target.ndim == 2 else target
        jobs.append((m0[lo:hi], keys[lo:hi], base_seed, spec, oxide, duration, dt, v[lo:hi].copy(), tk))
    if threads > 1 and len(jobs) > 1:
        from concurrent.futures import ProcessPoolExecutor

        with ProcessPoolExecutor(max_workers=threads) as pool:
            parts = list(pool.map(_ensemble_chunk, jobs))
    else:
        parts = [_ensemble_chunk(j) for j in jobs]
    if not parts:
        return BatchResult(np.empty((0, 3)), np.empty(0, bool), np.empty(0))
    return BatchResult(
        final_m=np.concatenate([p[0] for p in parts]),
        switched=np.concatenate([p[1] for p in parts]),
        switching_time=np.concatenate([p[2] for p in parts]),
        max_norm_error=max(p[3] for p in parts),
    )


def deterministic_switching_time(spec: MagnetSpec, oxide: MeOxideSpec, v_me: float, dt: float = DT_DEFAULT,
                                 window: float = 5e-9, tilt_deg: float = INITIAL_TILT_DEG) -> float | None:
    """Zero-temperature switching time from a tilted start against ``sign(v_me)``."""
    from dataclasses import replace

    sign = 1.0 if v_me >= 0 else -1.0
    cold = replace(spec, temperature=0.0)
    m0 = tilted((-sign, 0.0, 0.0), tilt_deg)
    res = integrate(m0[None, :], cold, oxide, window, dt, v_me=v_me, target=(sign, 0.0, 0.0))
    return float(res.switching_time[0]) if res.switched[0] else None
