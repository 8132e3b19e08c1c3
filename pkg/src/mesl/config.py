"""TOML run configuration with unit-suffixed physical values.

Every value is stored in SI.  Strings such as ``"2.5nm"``, ``"500ps"``,
``"5kOhm"`` or ``"0.15/c"`` (a coefficient divided by the speed of light)
are converted on load; bare numbers are taken as SI already.  Keys that a
file leaves out fall back to the defaults below and are listed in
``SimConfig.defaulted`` so the run manifest can report them.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field, replace
from pathlib import Path

import tomli
import tomli_w

from .constants import C_LIGHT
from .errors import ConfigError
from .gates import XNOR_CHAIN, GateKind, StageDef, default_circuit
from .magnet import MagnetSpec, MeOxideSpec
from .mtj import V_DATA_DEFAULT, V_SWITCH_MIN_DEFAULT, MtjModel, ReadCircuit

AUTO = "auto"

_PREFIX = {"f": 1e-15, "p": 1e-12, "n": 1e-9, "u": 1e-6, "µ": 1e-6, "μ": 1e-6, "m": 1e-3,
           "k": 1e3, "M": 1e6, "G": 1e9, "T": 1e12}
_NUMBER = re.compile(r"^\s*([+-]?(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)\s*(.*?)\s*$")
_ALIASES = {"ohm": "Ohm", "Ω": "Ohm", "ohms": "Ohm", "m2": "m^2", "J/m2": "J/m^2", "A/m2": "A/m^2",
            "rad/s/T": "rad/(s*T)", "1/(s*T)": "rad/(s*T)"}


def parse_quantity(value, unit: str, key: str) -> float:
    """Convert a number or unit-suffixed string to an SI float in ``unit``."""
    if isinstance(value, bool):
        raise ConfigError(f"{key}: expected a number, got a boolean", key=key)
    if isinstance(value, (int, float)):
        return float(value)
    if not isinstance(value, str):
        raise ConfigError(f"{key}: expected a number or string with units, got {type(value).__name__}", key=key)
    m = _NUMBER.match(value)
    if not m:
        raise ConfigError(f"{key}: cannot read a number from {value!r}", key=key)
    number, suffix = float(m.group(1)), m.group(2)
    suffix = _ALIASES.get(suffix, suffix)
    for alias, canon in _ALIASES.items():
        if suffix.endswith(alias) and len(suffix) == len(alias) + 1 and suffix[0] in _PREFIX:
            suffix = suffix[0] + canon
    if suffix == "":
        return number
    if unit == "" and suffix == "%":
        return number * 1e-2
    if unit == "s/m" and suffix == "/c":
        return number / C_LIGHT
    if suffix == unit:
        return number
    if unit and suffix.endswith(unit) and suffix[:-len(unit)] in _PREFIX:
        factor = _PREFIX[suffix[:-len(unit)]]
        return number * (factor**2 if unit == "m^2" else factor)
    raise ConfigError(f"{key}: unit {suffix!r} does not match expected {unit or 'dimensionless'!r}", key=key)


# constraint helpers -------------------------------------------------------

def _positive(x):
    return x > 0


def _nonneg(x):
    return x >= 0


def _open_unit(x):
    return 0 < x < 1


def _any(x):
    return True


_CONSTRAINT_TEXT = {_positive: "must be > 0", _nonneg: "must be >= 0", _open_unit: "must lie in (0, 1)",
                    _any: ""}


@dataclass(frozen=True)
class _Key:
    name: str  # key in the file
    attr: str  # dataclass attribute
    unit: str
    check: object = _positive
    integer: bool = False
    auto: bool = False  # accepts "auto"


SECTIONS: dict[str, tuple[_Key, ...]] = {
    "magnet": (
        _Key("length_x", "length_x", "m"),
        _Key("width_y", "width_y", "m"),
        _Key("t_FL", "thickness_z", "m"),
        _Key("Ms", "ms", "A/m"),
        _Key("alpha", "alpha", "", _open_unit),
        _Key("K_i", "k_i", "J/m^2", _nonneg),
        _Key("gamma", "gamma", "rad/(s*T)"),
        _Key("temperature", "temperature", "K", _nonneg),
    ),
    "me_oxide": (
        _Key("alpha_ME", "me_coefficient", "s/m"),
        _Key("t_ME", "oxide_thickness", "m"),
        _Key("eps_ME", "relative_permittivity", ""),
        _Key("plate_area", "plate_area", "m^2"),
    ),
    "mtj": (
        _Key("r_p0", "r_p0", "Ohm"),
        _Key("tmr0", "tmr0", ""),
        _Key("v_h", "v_h", "V"),
    ),
    "read_circuit": (
        _Key("v_read", "v_read", "V"),
        _Key("r_ref", "r_ref", "Ohm", auto=True),
        _Key("inverter_trip", "inverter_trip", "V", _any, auto=True),
        _Key("v_out_high", "v_out_high", "V", _any, auto=True),
        _Key("v_out_low", "v_out_low", "V", _any),
        _Key("c_g", "c_g", "F", _nonneg),
        _Key("v_g", "v_g", "V", _any),
        _Key("v_switch_min", "v_switch_min", "V"),
    ),
    "sim": (
        _Key("dt", "dt", "s"),
        _Key("write_pulse", "write_pulse", "s"),
        _Key("v_data", "v_data", "V"),
        _Key("v_reset", "v_reset", "V", _any),
        _Key("seed", "seed", "", _nonneg, integer=True),
        _Key("tilt_deg", "tilt_deg", "", _nonneg),
        _Key("polarization", "polarization", "", _open_unit),
        _Key("duration", "duration", "s"),
        _Key("v_me", "v_me", "V", _any, auto=True),
        _Key("record_every", "record_every", "", _nonneg, integer=True),
        _Key("stt_current_density", "stt_current_density", "A/m^2", _nonneg),
        _Key("read_duration", "read_duration", "s"),
    ),
    "sweep": (
        _Key("v_start", "v_start", "V", _nonneg),
        _Key("v_stop", "v_stop", "V"),
        _Key("v_step", "v_step", "V"),
        _Key("pulse_width", "pulse_width", "s"),
        _Key("trials", "trials", "", _positive, integer=True),
        _Key("bins", "bins", "", _positive, integer=True),
        _Key("stt_window", "stt_window", "s"),
        _Key("me_voltage", "me_voltage", "V", _any, auto=True),
    ),
}


@dataclass(frozen=True)
class ReadSettings:
    v_read: float = 0.85
    r_ref: float | None = None  # None: derived per gate kind
    inverter_trip: float | None = None
    v_out_high: float | None = None  # None: follows sim.v_data
    v_out_low: float = 0.0
    c_g: float = 0.1e-15
    v_g: float = 1.0
    v_switch_min: float = V_SWITCH_MIN_DEFAULT

    def circuit(self, kind: GateKind | str, mtj: MtjModel, v_data: float) -> ReadCircuit:
        return default_circuit(GateKind(kind), mtj, self.v_read, r_ref=self.r_ref, inverter_trip=self.inverter_trip,
                               v_out_high=v_data if self.v_out_high is None else self.v_out_high,
                               v_out_low=self.v_out_low, c_g=self.c_g, v_g=self.v_g,
                               v_switch_min=self.v_switch_min)


@dataclass(frozen=True)
class SimSettings:
    dt: float = 1e-13
    write_pulse: float = 2e-9
    v_data: float = V_DATA_DEFAULT
    v_reset: float = -V_DATA_DEFAULT
    seed: int = 0
    tilt_deg: float = 1.0
    polarization: float = 0.5
    duration: float = 2e-9
    v_me: float | None = None  # None: sim.v_data
    record_every: int = 1
    stt_current_density: float = 2.7e11
    read_duration: float = 500e-12


@dataclass(frozen=True)
class SweepSettings:
    v_start: float = 0.0
    v_stop: float = 1.2
    v_step: float = 0.05
    pulse_width: float = 500e-12
    trials: int = 1000
    bins: int = 50
    stt_window: float = 20e-9
    me_voltage: float | None = None  # None: sim.v_data

    def voltages(self) -> tuple[float, ...]:
        count = int(math.floor((self.v_stop - self.v_start) / self.v_step + 1e-9)) + 1
        return tuple(round(self.v_start + i * self.v_step, 12) for i in range(count))


@dataclass(frozen=True)
class SimConfig:
    magnet: MagnetSpec = field(default_factory=MagnetSpec)
    me_oxide: MeOxideSpec = field(default_factory=MeOxideSpec)
    mtj: MtjModel = field(default_factory=MtjModel)
    read_circuit: ReadSettings = field(default_factory=ReadSettings)
    sim: SimSettings = field(default_factory=SimSettings)
    netlist: tuple[StageDef, ...] = XNOR_CHAIN
    sweep: SweepSettings = field(default_factory=SweepSettings)
    defaulted: tuple[str, ...] = field(default=(), compare=False)


_SECTION_TYPES = {"magnet": MagnetSpec, "me_oxide": MeOxideSpec, "mtj": MtjModel, "read_circuit": ReadSettings,
                  "sim": SimSettings, "sweep": SweepSettings}


def _key_line(text: str, section: str, key: str) -> int | None:
    """Line number (1-based) of ``key = ...`` inside ``[section]``, best effort."""
    current = None
    for i, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if line.startswith("["):
            current = line.strip("[] ")
        elif current == section and re.match(rf"{re.escape(key)}\s*=", line):
            return i
    return None


def _convert(k: _Key, raw, section: str, text: str):
    dotted = f"{section}.{k.name}"
    line = _key_line(text, section, k.name)
    if k.auto and raw == AUTO:
        return None
    try:
        if k.integer:
            if isinstance(raw, bool) or not isinstance(raw, int):
                raise ConfigError(f"{dotted}: expected an integer, got {raw!r}", key=dotted)
            value = raw
        else:
            value = parse_quantity(raw, k.unit, dotted)
    except ConfigError as exc:
        raise ConfigError(str(exc), key=dotted, line=line) from None
    if not (math.isfinite(value) and k.check(value)):
        raise ConfigError(f"{dotted} = {raw!r}: {_CONSTRAINT_TEXT[k.check]}", key=dotted, line=line)
    return value


def _parse_stages(raw, text: str) -> tuple[StageDef, ...]:
    if not isinstance(raw, list) or not raw:
        raise ConfigError("netlist.stages must be a non-empty array of tables", key="netlist.stages")
    defs = []
    for i, entry in enumerate(raw):
        where = f"netlist.stages[{i}]"
        if not isinstance(entry, dict):
            raise ConfigError(f"{where} must be a table", key=where)
        unknown = set(entry) - {"name", "kind", "A", "B", "start", "duration"}
        if unknown:
            raise ConfigError(f"{where}: unknown keys {sorted(unknown)}", key=where)
        for need in ("name", "kind", "A", "B"):
            if not isinstance(entry.get(need), str):
                raise ConfigError(f"{where}.{need} must be a string", key=f"{where}.{need}")
        try:
            GateKind(entry["kind"])
        except ValueError:
            raise ConfigError(f"{where}.kind must be one of xnor, nand, nor", key=f"{where}.kind") from None
        start = duration = None
        if "start" in entry:
            start = parse_quantity(entry["start"], "s", f"{where}.start")
            if start < 0:
                raise ConfigError(f"{where}.start must be >= 0", key=f"{where}.start")
        if "duration" in entry:
            duration = parse_quantity(entry["duration"], "s", f"{where}.duration")
            if duration <= 0:
                raise ConfigError(f"{where}.duration must be > 0", key=f"{where}.duration")
        defs.append(StageDef(entry["name"], entry["kind"], (("A", entry["A"]), ("B", entry["B"])), start, duration))
    names = [d.name for d in defs]
    if len(set(names)) != len(names):
        raise ConfigError("netlist stage names must be unique", key="netlist.stages")
    return tuple(defs)


def loads(text: str) -> SimConfig:
    """Parse configuration text; see :func:`parse_config`."""
    try:
        data = tomli.loads(text)
    except tomli.TOMLDecodeError as exc:
        m = re.search(r"line (\d+)", str(exc))
        raise ConfigError(f"TOML parse error: {exc}", line=int(m.group(1)) if m else None) from None

    unknown = set(data) - set(SECTIONS) - {"netlist", "run"}
    if unknown:
        name = sorted(unknown)[0]
        line = next((i for i, raw in enumerate(text.splitlines(), 1) if raw.strip().strip("[]").strip() == name), None)
        raise ConfigError(f"unknown section [{name}]", key=name, line=line)

    defaulted = []
    parts = {}
    for section, keys in SECTIONS.items():
        table = data.get(section, {})
        if not isinstance(table, dict):
            raise ConfigError(f"[{section}] must be a table", key=section)
        known = {k.name for k in keys}
        for name in table:
            if name not in known:
                raise ConfigError(f"unknown key {section}.{name}", key=f"{section}.{name}",
                                  line=_key_line(text, section, name))
        kwargs = {}
        for k in keys:
            if k.name in table:
                kwargs[k.attr] = _convert(k, table[k.name], section, text)
            else:
                defaulted.append(f"{section}.{k.name}")
        try:
            parts[section] = _SECTION_TYPES[section](**kwargs)
        except ValueError as exc:
            raise ConfigError(f"[{section}]: {exc}", key=section) from None

    net = data.get("netlist", {})
    if not isinstance(net, dict) or set(net) - {"stages"}:
        raise ConfigError("[netlist] accepts only 'stages'", key="netlist")
    if "stages" in net:
        netlist = _parse_stages(net["stages"], text)
    else:
        netlist = XNOR_CHAIN
        defaulted.append("netlist.stages")

    sw = parts["sweep"]
    if sw.v_stop < sw.v_start:
        raise ConfigError("sweep.v_stop must be >= sweep.v_start", key="sweep.v_stop")
    if parts["sim"].v_reset >= 0:
        raise ConfigError("sim.v_reset must be negative", key="sim.v_reset",
                          line=_key_line(text, "sim", "v_reset"))
    cfg = SimConfig(parts["magnet"], parts["me_oxide"], parts["mtj"], parts["read_circuit"], parts["sim"],
                    netlist, parts["sweep"], tuple(defaulted))
    _check_circuits(cfg)
    return cfg


def _check_circuits(cfg: SimConfig) -> None:
    for kind in GateKind:
        try:
            cfg.read_circuit.circuit(kind, cfg.mtj, cfg.sim.v_data)
        except ValueError as exc:
            raise ConfigError(f"[read_circuit] invalid for {kind.value}: {exc}", key="read_circuit") from None


def parse_config(path=None) -> SimConfig:
    """Load a configuration file; ``None`` gives the built-in defaults."""
    if path is None:
        return loads("")
    p = Path(path)
    try:
        text = p.read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config {p}: {exc.strerror}", key="config") from None
    return loads(text)


def with_overrides(cfg: SimConfig, *, seed=None, trials=None, temperature=None) -> SimConfig:
    """Apply command-line overrides (None leaves a value alone)."""
    if seed is not None:
        if seed < 0 or seed >= 2**64:
            raise ConfigError("--seed must be an unsigned 64-bit integer", key="seed")
        cfg = replace(cfg, sim=replace(cfg.sim, seed=int(seed)))
    if trials is not None:
        if trials < 1:
            raise ConfigError("--trials must be >= 1", key="trials")
        cfg = replace(cfg, sweep=replace(cfg.sweep, trials=int(trials)))
    if temperature is not None:
        try:
            cfg = replace(cfg, magnet=replace(cfg.magnet, temperature=float(temperature)))
        except ValueError as exc:
            raise ConfigError(f"--temp: {exc}", key="temperature") from None
    return cfg


def to_dict(cfg: SimConfig) -> dict:
    """Resolved configuration as plain TOML-ready values (SI floats, ``"auto"`` for derived ones)."""
    out = {}
    for section, keys in SECTIONS.items():
        obj = getattr(cfg, section)
        table = {}
        for k in keys:
            value = getattr(obj, k.attr)
            table[k.name] = AUTO if value is None else value
        out[section] = table
    stages = []
    for d in cfg.netlist:
        entry = {"name": d.name, "kind": d.kind, **dict(d.wiring)}
        if d.start is not None:
            entry["start"] = d.start
        if d.duration is not None:
            entry["duration"] = d.duration
        stages.append(entry)
    out["netlist"] = {"stages": stages}
    return out


def manifest(cfg: SimConfig, run: dict) -> str:
    """TOML text that re-parses to ``cfg``; ``run`` goes into a [run] metadata table."""
    data = to_dict(cfg)
    data["run"] = {**run, "defaulted": list(cfg.defaulted)}
    return tomli_w.dumps(data)
