"""MESL gates (XNOR, NAND, NOR), global reset and domino-clocked cascades.

Magnet states carry a leading trial axis: every :class:`Magnet` holds an
``(n, 3)`` array, so one gate object runs ``n`` Monte Carlo trials at once.
Logic levels map to write voltages as ``1 -> +v_data`` and ``0 -> -v_data``.
"""

from __future__ import annotations

import enum
import itertools
import math
import zlib
from dataclasses import dataclass, field, replace
from functools import lru_cache

import numpy as np

from .errors import ReadDisturbError, ScheduleError
from .llg import DT_DEFAULT, INITIAL_TILT_DEG, deterministic_switching_time, run_ensemble, tilted
from .magnet import MagnetSpec, MeOxideSpec
from .mtj import (
    V_DATA_DEFAULT,
    MtjModel,
    ReadCircuit,
    check_disturb,
    inverter_out,
    read_circuit,
    series,
    solve_divider,
)

WRITE_PULSE_DEFAULT = 2e-9
RESET_OK = -0.9  # m_x at or below this counts as reset

PHASE_RESET = 0
PHASE_DATA = 1
PHASE_IDLE = 2
PHASE_EVAL = 16  # evaluate phases are PHASE_EVAL + stage depth


class GateKind(str, enum.Enum):
    XNOR = "xnor"
    NAND = "nand"
    NOR = "nor"

    def reference(self, a: int, b: int) -> int:
        if self is GateKind.XNOR:
            return int(a == b)
        if self is GateKind.NAND:
            return int(not (a and b))
        return int(not (a or b))


def level_voltage(level: int, v_data: float) -> float:
    if level not in (0, 1):
        raise ValueError(f"logic level must be 0 or 1, got {level!r}")
    return v_data if level else -v_data


def _uid(name: str) -> int:
    return zlib.crc32(name.encode())


@dataclass
class Magnet:
    name: str
    state: np.ndarray  # (n, 3)
    fixed: bool = False

    @property
    def uid(self) -> int:
        return _uid(self.name)

    def levels(self) -> np.ndarray:
        return (self.state[:, 0] > 0).astype(int)


@dataclass
class MeslDevice:
    """Two magnets sandwiching an MgO barrier; each free magnet has its own ME capacitor."""

    top: Magnet
    bottom: Magnet
    mtj: MtjModel

    def theta(self) -> np.ndarray:
        dot = np.sum(self.top.state * self.bottom.state, axis=1)
        return np.arccos(np.clip(dot, -1.0, 1.0))

    def resistance(self, trial: int):
        th = float(self.theta()[trial])
        return lambda v: self.mtj.resistance(th, v)


@dataclass
class GateInstance:
    name: str
    kind: GateKind
    devices: list[MeslDevice]
    circuit: ReadCircuit
    inputs: dict[str, Magnet]  # local input name ("A", "B") -> driven free magnet

    @property
    def n(self) -> int:
        return self.devices[0].top.state.shape[0]

    def free_magnets(self) -> list[Magnet]:
        out = []
        for d in self.devices:
            out.extend(m for m in (d.top, d.bottom) if not m.fixed)
        return out

    def stack(self, trial: int):
        return series(*(d.resistance(trial) for d in self.devices))


def _axis_states(n: int, sign: float) -> np.ndarray:
    s = np.zeros((n, 3))
    s[:, 0] = sign
    return s


def class_voltages(mtj: MtjModel, circuit: ReadCircuit) -> tuple[float, float, float]:
    """Divider outputs for two series stacks in the {P+P, P+AP, AP+AP} classes."""
    rp = lambda v: mtj.resistance(0.0, v)
    rap = lambda v: mtj.resistance(math.pi, v)
    return tuple(solve_divider(circuit.r_ref, series(a, b), circuit.v_read) for a, b in ((rp, rp), (rp, rap), (rap, rap)))


def sized_trip(kind: GateKind, mtj: MtjModel, circuit: ReadCircuit) -> float:
    """Inverter trip point for the series-stack gates: midpoint of the relevant gap."""
    v_pp, v_pa, v_aa = class_voltages(mtj, circuit)
    if kind is GateKind.NAND:
        return 0.5 * (v_pa + v_aa)
    if kind is GateKind.NOR:
        return 0.5 * (v_pp + v_pa)
    raise ValueError("only NAND and NOR use a sized trip point")


def default_circuit(kind: GateKind, mtj: MtjModel, v_read: float = 0.85, **kw) -> ReadCircuit:
    """Read circuit for ``kind`` with unset values filled from the MTJ model.

    Series-stack gates get twice the single-stack reference resistance so the
    divider stays centered on their doubled stack.
    """
    r_ref = kw.pop("r_ref", None)
    trip = kw.pop("inverter_trip", None)
    if r_ref is None:
        r_ref = math.sqrt(mtj.r_p(0.0) * mtj.r_ap(0.0))
        if kind is not GateKind.XNOR:
            r_ref *= 2.0
    circuit = read_circuit(mtj, v_read, r_ref=r_ref, inverter_trip=trip if trip is not None else 0.5 * v_read, **kw)
    if kind is not GateKind.XNOR and trip is None:
        circuit = replace(circuit, inverter_trip=sized_trip(kind, mtj, circuit))
    return circuit


def make_gate(kind: GateKind | str, name: str = "g", n: int = 1, *, mtj: MtjModel | None = None,
              circuit: ReadCircuit | None = None) -> GateInstance:
    """Build a gate with every free magnet at -x (the reset state)."""
    kind = GateKind(kind)
    mtj = mtj or MtjModel()
    circuit = circuit or default_circuit(kind, mtj)
    if kind is GateKind.XNOR:
        top = Magnet(f"{name}.A", _axis_states(n, -1.0))
        bot = Magnet(f"{name}.B", _axis_states(n, -1.0))
        devices = [MeslDevice(top, bot, mtj)]
        inputs = {"A": top, "B": bot}
    else:
        devices, inputs = [], {}
        for label in ("A", "B"):
            free = Magnet(f"{name}.{label}", _axis_states(n, -1.0))
            pinned = Magnet(f"{name}.{label}.fixed", _axis_states(n, -1.0), fixed=True)
            devices.append(MeslDevice(free, pinned, mtj))
            inputs[label] = free
    return GateInstance(name, kind, devices, circuit, inputs)


@dataclass
class Event:
    t: float
    node: str
    value: float


@dataclass
class Failure:
    kind: str  # "reset", "write"
    magnet: str
    trials: list[int]


@dataclass
class Environment:
    """Shared physics and drive settings for gate-level simulation."""

    spec: MagnetSpec = field(default_factory=MagnetSpec)
    oxide: MeOxideSpec = field(default_factory=MeOxideSpec)
    dt: float = DT_DEFAULT
    write_pulse: float = WRITE_PULSE_DEFAULT
    v_data: float = V_DATA_DEFAULT
    v_reset: float = -V_DATA_DEFAULT
    seed: int = 0
    context: int = 0  # extra stream key, e.g. truth-table row
    threads: int = 1
    tilt_deg: float = INITIAL_TILT_DEG
    failures: list[Failure] = field(default_factory=list)

    def drive(self, magnets: list[Magnet], voltages: list, duration: float, phase: int) -> None:
        """Apply per-magnet ME voltages (scalar or per-trial arrays) for ``duration``."""
        magnets = [m for m in magnets if not m.fixed]
        if not magnets:
            return
        n = magnets[0].state.shape[0]
        states, volts, keys = [], [], []
        for mag, v in zip(magnets, voltages):
            s = mag.state
            if self.spec.temperature == 0:
                s = _retilt(s, self.tilt_deg)
            states.append(s)
            volts.append(np.broadcast_to(np.asarray(v, dtype=float), (n,)))
            keys.extend((trial, self.context, mag.uid, phase) for trial in range(n))
        res = run_ensemble(np.concatenate(states), keys, self.seed, self.spec, self.oxide, duration, self.dt,
                           v_me=np.concatenate(volts), threads=self.threads)
        for i, mag in enumerate(magnets):
            mag.state = res.final_m[i * n:(i + 1) * n]

    def idle(self, magnets: list[Magnet], duration: float, phase: int = PHASE_IDLE) -> None:
        self.drive(magnets, [0.0] * len(magnets), duration, phase)


def _retilt(states: np.ndarray, deg: float) -> np.ndarray:
    """Give magnets sitting within ``deg`` of +-x a ``deg`` tilt toward +z (T = 0 only)."""
    out = states.copy()
    near = np.abs(out[:, 0]) >= math.cos(math.radians(deg))
    for i in np.nonzero(near)[0]:
        out[i] = tilted((math.copysign(1.0, out[i, 0]), 0.0, 0.0), deg)
    return out


@lru_cache(maxsize=64)
def _t_switch(spec: MagnetSpec, oxide: MeOxideSpec, v: float, dt: float) -> float | None:
    return deterministic_switching_time(spec, oxide, v, dt)


def apply_reset(gates: list[GateInstance], env: Environment, v_reset: float | None = None,
                duration: float | None = None, *, phase: int = PHASE_RESET) -> list[Failure]:
    """Drive every free magnet with a negative pulse; report magnets left above m_x = -0.9."""
    v_reset = env.v_reset if v_reset is None else v_reset
    duration = env.write_pulse if duration is None else duration
    if not v_reset < 0:
        raise ScheduleError(f"reset voltage must be negative, got {v_reset!r}")
    t_sw = _t_switch(env.spec, env.oxide, float(v_reset), env.dt)
    if t_sw is None or duration < t_sw:
        raise ScheduleError(f"reset pulse {duration:.3g} s is shorter than the deterministic switching time "
                            f"at {v_reset} V ({t_sw})")
    magnets = [m for g in gates for m in g.free_magnets()]
    env.drive(magnets, [v_reset] * len(magnets), duration, phase)
    failures = []
    for m in magnets:
        bad = np.nonzero(m.state[:, 0] > RESET_OK)[0]
        if bad.size:
            failures.append(Failure("reset", m.name, bad.tolist()))
    env.failures.extend(failures)
    return failures


def write_inputs(gate: GateInstance, levels, env: Environment, duration: float | None = None, *,
                 phase: int = PHASE_DATA) -> list[Failure]:
    """Write logic levels onto the gate's input magnets (dict by input name or ordered tuple)."""
    duration = env.write_pulse if duration is None else duration
    if not isinstance(levels, dict):
        levels = dict(zip(gate.inputs, levels))
    mags = [gate.inputs[k] for k in levels]
    volts = [level_voltage(levels[k], env.v_data) for k in levels]
    env.drive(mags, volts, duration, phase)
    return _check_writes(mags, [levels[k] for k in levels], env)


def _check_writes(mags: list[Magnet], wanted: list, env: Environment) -> list[Failure]:
    failures = []
    for m, lv in zip(mags, wanted):
        lv = np.broadcast_to(np.asarray(lv), (m.state.shape[0],))
        bad = np.nonzero(m.levels() != lv)[0]
        if bad.size:
            failures.append(Failure("write", m.name, bad.tolist()))
    env.failures.extend(failures)
    return failures


def sense(gate: GateInstance, v_read: float | None = None) -> tuple[np.ndarray, np.ndarray]:
    """Per-trial (divider node voltage, inverter output voltage).

    Raises ReadDisturbError if any trial's node voltage could rewrite a
    free magnet.
    """
    circuit = gate.circuit if v_read is None else replace(gate.circuit, v_read=v_read)
    v_node = np.empty(gate.n)
    v_out = np.empty(gate.n)
    cache: dict[tuple, tuple[float, float]] = {}
    thetas = np.stack([d.theta() for d in gate.devices], axis=1)
    for t in range(gate.n):
        key = tuple(thetas[t])
        if key not in cache:
            vn = solve_divider(circuit.r_ref, gate.stack(t), circuit.v_read)
            if not check_disturb(vn, circuit):
                raise ReadDisturbError(f"{gate.name}: sense node at {vn:.4f} V reaches the switching "
                                       f"threshold {circuit.v_switch_min} V", v_node=vn,
                                       v_switch_min=circuit.v_switch_min)
            cache[key] = (vn, inverter_out(vn, circuit))
        v_node[t], v_out[t] = cache[key]
    return v_node, v_out


def read_gate(gate: GateInstance, v_read: float | None = None) -> np.ndarray:
    """Logic level of the inverter output for each trial; magnet states are untouched."""
    _, v_out = sense(gate, v_read)
    return (v_out == gate.circuit.v_out_high).astype(int)


# --- cascades -------------------------------------------------------------


@dataclass
class Stage:
    gate: GateInstance
    wiring: dict[str, str]  # gate input name -> primary terminal or upstream stage name


@dataclass(frozen=True)
class Pulse:
    stage: str
    v_pulse: float
    start: float
    duration: float


@dataclass(frozen=True)
class CascadeSchedule:
    v_reset: float
    reset_duration: float
    data_start: float
    data_duration: float
    pulses: tuple[Pulse, ...]
    reset_start: float = 0.0

    @classmethod
    def domino(cls, stage_names, env: Environment, v_read: float = 0.85) -> "CascadeSchedule":
        """Reset, data, then one evaluate pulse per stage, each ``env.write_pulse`` long."""
        w = env.write_pulse
        pulses = tuple(Pulse(s, v_read, (2 + i) * w, w) for i, s in enumerate(stage_names))
        return cls(env.v_reset, w, w, w, pulses)


@dataclass
class CascadeResult:
    outputs: dict[str, np.ndarray]  # stage name -> (n,) levels
    times: dict[str, float]  # stage name -> time the output is valid
    events: list[Event]
    failures: list[Failure]


def stage_depths(stages: list[Stage]) -> dict[str, int]:
    """Longest path from primary terminals; raises ScheduleError on cycles or unknown stages."""
    by_name = {s.gate.name: s for s in stages}
    depth: dict[str, int] = {}
    visiting: set[str] = set()

    def visit(name: str) -> int:
        if name in depth:
            return depth[name]
        if name in visiting:
            raise ScheduleError(f"combinational loop through stage {name!r}")
        visiting.add(name)
        d = 0
        for src in by_name[name].wiring.values():
            if src in by_name:
                d = max(d, visit(src) + 1)
        visiting.discard(name)
        depth[name] = d
        return d

    for s in stages:
        visit(s.gate.name)
    return depth


def validate_schedule(stages: list[Stage], schedule: CascadeSchedule) -> dict[str, int]:
    depth = stage_depths(stages)
    if not schedule.v_reset < 0:
        raise ScheduleError(f"reset voltage must be negative, got {schedule.v_reset}")
    reset_end = schedule.reset_start + schedule.reset_duration
    if schedule.data_start < reset_end - 1e-18:
        raise ScheduleError("data phase starts before reset ends")
    t = schedule.data_start + schedule.data_duration
    last_depth = -1
    seen = set()
    for p in schedule.pulses:
        if p.stage not in depth:
            raise ScheduleError(f"pulse for unknown stage {p.stage!r}")
        if p.start < t - 1e-18:
            raise ScheduleError(f"pulse for {p.stage!r} at {p.start} s overlaps the previous phase")
        if depth[p.stage] < last_depth:
            raise ScheduleError(f"pulse for {p.stage!r} (depth {depth[p.stage]}) follows a deeper stage")
        if p.stage in seen:
            raise ScheduleError(f"stage {p.stage!r} pulsed twice")
        seen.add(p.stage)
        last_depth = depth[p.stage]
        t = p.start + p.duration
    missing = set(depth) - seen
    if missing:
        raise ScheduleError(f"stages without evaluate pulse: {sorted(missing)}")
    return depth


def run_cascade(stages: list[Stage], schedule: CascadeSchedule, inputs: dict[str, int], env: Environment, *,
                reset: bool = True) -> CascadeResult:
    """Global reset, data write, then domino evaluation in pulse order.

    A stage whose inverter output is high writes +v_out_high onto every
    downstream magnet wired to it; a low (0 V) output leaves them idle.
    """
    depth = validate_schedule(stages, schedule)
    by_name = {s.gate.name: s for s in stages}
    events: list[Event] = []
    failures: list[Failure] = []

    terminals = sorted({src for s in stages for src in s.wiring.values() if src not in by_name})
    missing = [t for t in terminals if t not in inputs]
    if missing:
        raise ScheduleError(f"no level for terminals {missing}")

    if reset:
        t0, t1 = schedule.reset_start, schedule.reset_start + schedule.reset_duration
        for node in terminals + [f"Out.{n}" for n in by_name]:
            events.append(Event(t0, node, schedule.v_reset))
        failures += apply_reset([s.gate for s in stages], env, schedule.v_reset, schedule.reset_duration)
        for node in terminals + [f"Out.{n}" for n in by_name]:
            events.append(Event(t1, node, 0.0))

    # data phase: every magnet wired to a primary terminal
    mags, levels = [], []
    for s in stages:
        for local, src in s.wiring.items():
            if src not in by_name:
                mags.append(s.gate.inputs[local])
                levels.append(inputs[src])
    t0 = schedule.data_start
    for term in terminals:
        events.append(Event(t0, term, level_voltage(inputs[term], env.v_data)))
    env.drive(mags, [level_voltage(lv, env.v_data) for lv in levels], schedule.data_duration, PHASE_DATA)
    failures += _check_writes(mags, levels, env)
    for term in terminals:
        events.append(Event(t0 + schedule.data_duration, term, 0.0))

    outputs: dict[str, np.ndarray] = {}
    times: dict[str, float] = {}
    for p in schedule.pulses:
        stage = by_name[p.stage]
        events.append(Event(p.start, f"V.{p.stage}", p.v_pulse))
        _, v_out = sense(stage.gate, p.v_pulse)
        level = (v_out == stage.gate.circuit.v_out_high).astype(int)
        outputs[p.stage] = level
        times[p.stage] = p.start + p.duration
        events.append(Event(p.start, f"Out.{p.stage}", float(v_out[0])))
        sinks = [by_name[d].gate.inputs[local] for d in by_name for local, src in by_name[d].wiring.items()
                 if src == p.stage]
        if sinks:
            env.drive(sinks, [v_out] * len(sinks), p.duration, PHASE_EVAL + depth[p.stage])
        events.append(Event(p.start + p.duration, f"V.{p.stage}", 0.0))
    return CascadeResult(outputs, times, events, failures)


@dataclass(frozen=True)
class StageDef:
    """Netlist entry: gate kind plus wiring of its inputs to terminals or upstream stages.

    ``start`` and ``duration`` pin the evaluate pulse; None means domino
    placement right after the previous pulse.
    """

    name: str
    kind: str
    wiring: tuple[tuple[str, str], ...]
    start: float | None = None
    duration: float | None = None


XNOR_CHAIN = (
    StageDef("s1", "xnor", (("A", "A"), ("B", "B"))),
    StageDef("s2", "xnor", (("A", "s1"), ("B", "C"))),
)


def netlist_reference(defs, inputs: dict[str, int]) -> dict[str, int]:
    """Boolean value of every stage by direct evaluation of the netlist."""
    by_name = {d.name: d for d in defs}
    memo: dict[str, int] = {}

    def value(src: str) -> int:
        if src not in by_name:
            return int(inputs[src])
        if src not in memo:
            d = by_name[src]
            w = dict(d.wiring)
            memo[src] = GateKind(d.kind).reference(value(w["A"]), value(w["B"]))
        return memo[src]

    return {d.name: value(d.name) for d in defs}


def netlist_terminals(defs) -> list[str]:
    names = {d.name for d in defs}
    return sorted({src for d in defs for _, src in d.wiring if src not in names})


def build_cascade(defs, env: Environment, n: int = 1, mtj: MtjModel | None = None,
                  circuit_for=None) -> tuple[list[Stage], CascadeSchedule]:
    """Gates, wiring and a domino schedule for a netlist.

    ``circuit_for(kind)`` supplies each gate's read circuit (default:
    :func:`default_circuit` with ``v_out_high = env.v_data``).
    """
    mtj = mtj or MtjModel()
    if circuit_for is None:
        def circuit_for(kind):
            return default_circuit(kind, mtj, v_out_high=env.v_data)
    stages = []
    for d in defs:
        kind = GateKind(d.kind)
        wiring = dict(d.wiring)
        if set(wiring) != {"A", "B"}:
            raise ScheduleError(f"stage {d.name!r} must wire exactly inputs A and B, got {sorted(wiring)}")
        stages.append(Stage(make_gate(kind, d.name, n, mtj=mtj, circuit=circuit_for(kind)), wiring))
    depth = stage_depths(stages)
    by_name = {d.name: d for d in defs}
    w = env.write_pulse
    t = 2 * w
    pulses = []
    for s in sorted(stages, key=lambda s: depth[s.gate.name]):
        d = by_name[s.gate.name]
        start = t if d.start is None else d.start
        dur = w if d.duration is None else d.duration
        pulses.append(Pulse(d.name, s.gate.circuit.v_read, start, dur))
        t = start + dur
    return stages, CascadeSchedule(env.v_reset, w, w, w, tuple(pulses))


def xnor_chain(env: Environment, n: int = 1, mtj: MtjModel | None = None) -> tuple[list[Stage], CascadeSchedule]:
    """Two cascaded XNOR gates: Out2 = XNOR(XNOR(A, B), C)."""
    return build_cascade(XNOR_CHAIN, env, n, mtj)


def _set_levels(mags: list[Magnet], levels: list[int]) -> None:
    for m, lv in zip(mags, levels):
        m.state = _axis_states(m.state.shape[0], 1.0 if lv else -1.0)


@dataclass
class TruthRow:
    inputs: tuple[int, ...]
    expected: int
    output: int  # majority observed level
    success_rate: float


def truth_table(kind: GateKind | str, env: Environment, trials: int = 1, *,
                mtj: MtjModel | None = None, circuit: ReadCircuit | None = None) -> list[TruthRow]:
    """Exhaustive check of a gate (or ``kind="cascade"`` for the two-XNOR chain).

    Each row starts from the complementary stored data, so the reset and
    the write both have to switch magnets.
    """
    if trials < 1:
        raise ValueError("trials must be >= 1")
    rows = []
    if kind == "cascade":
        return cascade_truth_table(env, trials, mtj=mtj)
    kind = GateKind(kind)
    circuit = circuit or default_circuit(kind, mtj or MtjModel(), v_out_high=env.v_data)
    for idx, ab in enumerate(itertools.product((0, 1), repeat=2)):
        e = replace(env, context=idx, failures=[])
        gate = make_gate(kind, kind.value, trials, mtj=mtj, circuit=circuit)
        _set_levels([gate.inputs["A"], gate.inputs["B"]], [1 - v for v in ab])
        apply_reset([gate], e)
        write_inputs(gate, ab, e)
        rows.append(_row(ab, kind.reference(*ab), read_gate(gate)))
    return rows


def cascade_truth_table(env: Environment, trials: int = 1, defs=XNOR_CHAIN, *, mtj: MtjModel | None = None,
                        circuit_for=None) -> list[TruthRow]:
    """Every terminal combination through the netlist; the row output is the last stage.

    Magnets start from the complement of the value they should end up
    holding, so every write and the reset are exercised.
    """
    if trials < 1:
        raise ValueError("trials must be >= 1")
    defs = tuple(defs)
    terms = netlist_terminals(defs)
    last = defs[-1].name
    rows = []
    for idx, combo in enumerate(itertools.product((0, 1), repeat=len(terms))):
        inputs = dict(zip(terms, combo))
        ref = netlist_reference(defs, inputs)
        values = {**inputs, **ref}
        e = replace(env, context=idx, failures=[])
        stages, sched = build_cascade(defs, e, trials, mtj, circuit_for)
        for s in stages:
            _set_levels([s.gate.inputs[k] for k in s.wiring], [1 - values[src] for src in s.wiring.values()])
        res = run_cascade(stages, sched, inputs, e)
        rows.append(_row(combo, ref[last], res.outputs[last]))
    return rows


def _row(inputs, expected: int, observed: np.ndarray) -> TruthRow:
    ones = int(observed.sum())
    majority = int(ones * 2 > observed.size)
    return TruthRow(tuple(int(v) for v in inputs), expected, majority, float(np.mean(observed == expected)))


def reset_omission(env: Environment, order=None, *, reset_each: bool = False) -> list[tuple[tuple[int, int, int], int, int]]:
    """Apply input triples back to back on one two-XNOR chain.

    With ``reset_each`` false only the first triple is preceded by a global
    reset.  Returns ``(triple, expected, observed)`` for every triple.
    """
    order = list(order or itertools.product((0, 1), repeat=3))
    stages, sched = xnor_chain(env, 1)
    out = []
    for i, abc in enumerate(order):
        e = replace(env, context=i)
        res = run_cascade(stages, sched, dict(zip("ABC", abc)), e, reset=reset_each or i == 0)
        want = GateKind.XNOR.reference(GateKind.XNOR.reference(abc[0], abc[1]), abc[2])
        out.append((tuple(abc), want, int(res.outputs["s2"][0])))
    return out


def trip_gaps(kind: GateKind, gate: GateInstance) -> tuple[float, float, float, float]:
    """(v_PP, v_PAP, v_APAP, trip) for a series-stack gate."""
    v = class_voltages(gate.devices[0].mtj, gate.circuit)
    return (*v, gate.circuit.inverter_trip)
