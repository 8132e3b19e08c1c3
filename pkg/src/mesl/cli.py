"""Command line front end.

Every subcommand writes its artifacts plus ``manifest.toml`` into ``--out``
and nothing else.  Failures print a one-line JSON payload on stderr and exit
with the error class's code.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
from dataclasses import replace
from importlib import metadata
from pathlib import Path

import numpy as np

from . import characterization as ch
from .config import SimConfig, manifest, parse_config, with_overrides
from .demag import demag_factors
from .errors import MeslError
from .gates import (
    Environment,
    GateKind,
    build_cascade,
    cascade_truth_table,
    make_gate,
    netlist_terminals,
    reset_omission,
    run_cascade,
    truth_table,
)
from .llg import DriveWaveform, export_trajectory, simulate, tilted

EXIT_USAGE = 64
EXIT_IO = 74


def _version() -> str:
    try:
        return metadata.version("artifact")
    except metadata.PackageNotFoundError:
        return "0+unknown"


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        _fail("UsageError", message, EXIT_USAGE)


def _fail(kind: str, message: str, code: int, **extra) -> None:
    payload = {"error": kind, "message": message, "exit_code": code, **extra}
    sys.stderr.write(json.dumps(payload, sort_keys=True) + "\n")
    raise SystemExit(code)


def _common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", type=Path, help="TOML configuration file")
    p.add_argument("--seed", type=int, help="base seed (u64), overrides sim.seed")
    p.add_argument("--out", type=Path, default=Path("out"), help="output directory")
    p.add_argument("--trials", type=int, help="Monte Carlo trials, overrides sweep.trials")
    p.add_argument("--temp", type=float, help="temperature in K, overrides magnet.temperature")
    p.add_argument("--threads", type=int, default=1, help="worker processes for ensembles")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="mesl", description="Macrospin ME spin-logic simulator")
    parser.add_argument("--version", action="version", version=_version())
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("simulate", help="single trajectory -> trajectory.csv")
    _common(p)
    p.add_argument("--drive", choices=("me", "stt"), default="me")
    p.add_argument("--v-me", type=float, help="ME voltage (V), overrides sim.v_me")
    p.add_argument("--duration", type=float, help="pulse length (s), overrides sim.duration")
    p.add_argument("--decimate", type=int, default=1, help="keep every n-th recorded row (0: header only)")

    p = sub.add_parser("sweep", help="switching probability vs voltage -> sweep.csv")
    _common(p)

    p = sub.add_parser("tdist", help="switching-time histogram -> tdist.csv")
    _common(p)
    p.add_argument("--drive", choices=("me", "stt"), default="me")

    p = sub.add_parser("truth-table", help="exhaustive gate check -> truth_table.csv")
    _common(p)
    p.add_argument("--kind", choices=[k.value for k in GateKind], required=True)

    p = sub.add_parser("cascade", help="netlist truth table, event log and reset-omission demo")
    _common(p)

    p = sub.add_parser("energy", help="switching and read energy -> energy.json")
    _common(p)
    p.add_argument("--kind", choices=[k.value for k in GateKind], default="xnor")

    p = sub.add_parser("demag", help="demagnetization factors -> demag.json")
    _common(p)
    return parser


# helpers --------------------------------------------------------------------

def _env(cfg: SimConfig, threads: int) -> Environment:
    s = cfg.sim
    return Environment(spec=cfg.magnet, oxide=cfg.me_oxide, dt=s.dt, write_pulse=s.write_pulse, v_data=s.v_data,
                       v_reset=s.v_reset, seed=s.seed, threads=threads, tilt_deg=s.tilt_deg)


def _gate_trials(cfg: SimConfig, explicit: int | None) -> int:
    # zero temperature makes every trial identical
    if explicit is None and cfg.magnet.temperature == 0:
        return 1
    return cfg.sweep.trials


def _write_rows(path: Path, header: list[str], rows) -> None:
    with path.open("w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        w.writerows(rows)


def _g(x: float) -> str:
    return repr(float(x))


def _json(path: Path, data) -> None:
    path.write_text(json.dumps(_clean(data), indent=2, sort_keys=True) + "\n")


# subcommands ----------------------------------------------------------------

def cmd_simulate(cfg: SimConfig, args, out: Path) -> dict:
    s = cfg.sim
    duration = args.duration if args.duration is not None else s.duration
    m0 = tilted((-1.0, 0.0, 0.0), s.tilt_deg) if cfg.magnet.temperature == 0 else np.array([-1.0, 0.0, 0.0])
    if args.drive == "me":
        v = args.v_me if args.v_me is not None else (s.v_data if s.v_me is None else s.v_me)
        wave = DriveWaveform.pulse(v, duration)
        summary = {"drive": "me", "v_me_V": v}
    else:
        wave = DriveWaveform.stt(s.stt_current_density, duration)
        summary = {"drive": "stt", "stt_current_density_A_m2": s.stt_current_density}
    rec = max(1, s.record_every)
    outcome = simulate(m0, cfg.magnet, cfg.me_oxide, wave, s.dt, s.seed, record_every=rec,
                       polarization=s.polarization)
    export_trajectory(outcome, out / "trajectory.csv", args.decimate)
    summary.update(duration_s=outcome.total_duration, switched=outcome.switched,
                   switching_time_s=outcome.switching_time, final_m=[float(v) for v in outcome.final_m])
    _json(out / "summary.json", summary)
    return summary


def cmd_sweep(cfg: SimConfig, args, out: Path) -> dict:
    sw = cfg.sweep
    spec = ch.SweepSpec(sw.voltages(), sw.pulse_width, sw.trials, cfg.magnet.temperature, cfg.sim.seed)
    curve = ch.switching_probability_sweep(cfg.magnet, cfg.me_oxide, spec, cfg.sim.dt, args.threads)
    ch.write_sweep_csv(curve, out / "sweep.csv")
    summary = {"v_op_V": ch.operating_voltage(curve), "v_switch_min_V": ch.switch_threshold_voltage(curve),
               "pulse_width_s": sw.pulse_width, "trials": sw.trials}
    _json(out / "sweep_summary.json", summary)
    return summary


def cmd_tdist(cfg: SimConfig, args, out: Path) -> dict:
    sw, s = cfg.sweep, cfg.sim
    if args.drive == "me":
        v = s.v_data if sw.me_voltage is None else sw.me_voltage
        window = s.write_pulse  # the ME write pulse; 500 ps is too short for the sustained criterion
        dist = ch.switching_time_distribution(cfg.magnet, cfg.me_oxide, sw.trials, window, v_me=v, bins=sw.bins,
                                              base_seed=s.seed, dt=s.dt, threads=args.threads)
        drive = {"drive": "me", "v_me_V": v}
    else:
        window = sw.stt_window
        dist = ch.switching_time_distribution(cfg.magnet, None, sw.trials, window,
                                              stt_current_density=s.stt_current_density,
                                              polarization=s.polarization, bins=sw.bins, base_seed=s.seed,
                                              dt=s.dt, threads=args.threads)
        drive = {"drive": "stt", "stt_current_density_A_m2": s.stt_current_density}
    ch.write_tdist_csv(dist, out / "tdist.csv")
    summary = {**drive, "window_s": window, "trials": sw.trials, "switched_fraction": dist.switched_fraction,
               "mean_s": dist.mean, "std_s": dist.std, "cv": dist.cv, "reliable": dist.reliable}
    _json(out / "tdist_summary.json", summary)
    return summary


def cmd_truth_table(cfg: SimConfig, args, out: Path) -> dict:
    env = _env(cfg, args.threads)
    trials = _gate_trials(cfg, args.trials)
    circuit = cfg.read_circuit.circuit(args.kind, cfg.mtj, cfg.sim.v_data)
    rows = truth_table(args.kind, env, trials, mtj=cfg.mtj, circuit=circuit)
    _write_rows(out / "truth_table.csv", ["A", "B", "expected", "output", "success_rate", "trials"],
                [[*r.inputs, r.expected, r.output, _g(r.success_rate), trials] for r in rows])
    return {"kind": args.kind, "trials": trials,
            "rows": [{"inputs": list(r.inputs), "expected": r.expected, "output": r.output,
                      "success_rate": r.success_rate} for r in rows]}


def cmd_cascade(cfg: SimConfig, args, out: Path) -> dict:
    env = _env(cfg, args.threads)
    trials = _gate_trials(cfg, args.trials)

    def circuit_for(kind):
        return cfg.read_circuit.circuit(kind, cfg.mtj, cfg.sim.v_data)

    rows = cascade_truth_table(env, trials, cfg.netlist, mtj=cfg.mtj, circuit_for=circuit_for)
    terms = netlist_terminals(cfg.netlist)
    _write_rows(out / "cascade.csv", [*terms, "expected", "output", "success_rate", "trials"],
                [[*r.inputs, r.expected, r.output, _g(r.success_rate), trials] for r in rows])

    # one trial's full timeline for an all-ones input, as an event log
    e = replace(env, context=1 << 20, failures=[])
    stages, sched = build_cascade(cfg.netlist, e, 1, cfg.mtj, circuit_for)
    res = run_cascade(stages, sched, {t: 1 for t in terms}, e)
    _write_rows(out / "events.csv", ["t_s", "node", "value_V"],
                [[_g(ev.t), ev.node, _g(ev.value)] for ev in sorted(res.events, key=lambda ev: ev.t)])

    summary = {"trials": trials, "terminals": terms,
               "rows": [{"inputs": list(r.inputs), "expected": r.expected, "output": r.output,
                         "success_rate": r.success_rate} for r in rows]}
    if [d.kind for d in cfg.netlist] == ["xnor", "xnor"] and terms == ["A", "B", "C"]:
        cold = replace(env, spec=replace(cfg.magnet, temperature=0.0), context=1 << 21, failures=[])
        demo = reset_omission(cold)
        _write_rows(out / "reset_omission.csv", ["A", "B", "C", "expected", "observed"],
                    [[*abc, want, got] for abc, want, got in demo])
        summary["reset_omission_failures"] = [list(abc) for abc, want, got in demo if want != got]
    return summary


def cmd_energy(cfg: SimConfig, args, out: Path) -> dict:
    s = cfg.sim
    circuit = cfg.read_circuit.circuit(args.kind, cfg.mtj, s.v_data)
    gate = make_gate(args.kind, args.kind, 1, mtj=cfg.mtj, circuit=circuit)
    report = ch.energy_report(cfg.me_oxide, gate, s.v_data, s.v_reset, s.read_duration)
    report["read"]["gate_kind"] = args.kind
    report["read"]["stack_state"] = "reset (all free magnets at -x)"
    ch.write_energy_json(report, out / "energy.json")
    return report


def cmd_demag(cfg: SimConfig, args, out: Path) -> dict:
    m = cfg.magnet
    nxx, nyy, nzz = demag_factors(m.length_x, m.width_y, m.thickness_z)
    data = {"Nxx": nxx, "Nyy": nyy, "Nzz": nzz, "sum": nxx + nyy + nzz,
            "dims_m": [m.length_x, m.width_y, m.thickness_z]}
    _json(out / "demag.json", data)
    return data


COMMANDS = {
    "simulate": cmd_simulate,
    "sweep": cmd_sweep,
    "tdist": cmd_tdist,
    "truth-table": cmd_truth_table,
    "cascade": cmd_cascade,
    "energy": cmd_energy,
    "demag": cmd_demag,
}

_RUN_ARGS = ("drive", "v_me", "duration", "decimate", "kind")


def dispatch(args) -> dict:
    cfg = parse_config(args.config)
    cfg = with_overrides(cfg, seed=args.seed, trials=args.trials, temperature=args.temp)
    if args.threads < 1:
        raise MeslError("--threads must be >= 1")
    out = args.out
    out.mkdir(parents=True, exist_ok=True)
    summary = COMMANDS[args.command](cfg, args, out)
    run = {"command": args.command, "seed": cfg.sim.seed, "version": _version()}
    extra = {k: getattr(args, k) for k in _RUN_ARGS if getattr(args, k, None) is not None}
    if extra:
        run["args"] = extra
    (out / "manifest.toml").write_text(manifest(cfg, run))
    return summary


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        summary = dispatch(args)
    except MeslError as exc:
        extra = {k: v for k, v in vars(exc).items() if isinstance(v, (int, float, str)) or v is None}
        _fail(type(exc).__name__, str(exc), exc.exit_code, **extra)
    except OSError as exc:
        _fail("IOError", str(exc), EXIT_IO, path=str(exc.filename) if exc.filename else None)
    sys.stdout.write(json.dumps(_clean(summary), sort_keys=True) + "\n")
    return 0


def _clean(x):
    if isinstance(x, dict):
        return {k: _clean(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_clean(v) for v in x]
    if isinstance(x, float) and not np.isfinite(x):
        return None
    return x


if __name__ == "__main__":
    raise SystemExit(main())
