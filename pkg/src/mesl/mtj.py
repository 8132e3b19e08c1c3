"""Behavioral MTJ resistance, read-path dividers and the ideal sense inverter."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Union

from .errors import ConvergenceError

Resistance = Union[float, Callable[[float], float]]

V_DATA_DEFAULT = 0.725  # smallest 25 mV grid voltage with p_switch >= 0.999 over a 2 ns write
V_SWITCH_MIN_DEFAULT = 0.525  # largest 25 mV grid voltage with p_switch < 1e-3 over 2 ns


@dataclass(frozen=True)
class MtjModel:
    r_p0: float = 5e3
    tmr0: float = 1.0
    v_h: float = 0.5

    def __post_init__(self):
        for name in ("r_p0", "tmr0", "v_h"):
            value = getattr(self, name)
            if not (math.isfinite(value) and value > 0):
                raise ValueError(f"{name} must be positive, got {value!r}")

    def r_p(self, v: float = 0.0) -> float:
        return self.r_p0

    def tmr(self, v: float = 0.0) -> float:
        return self.tmr0 / (1.0 + (v / self.v_h) ** 2)

    def r_ap(self, v: float = 0.0) -> float:
        return self.r_p0 * (1.0 + self.tmr(v))

    def resistance(self, theta: float, v: float = 0.0) -> float:
        return mtj_resistance(self, theta, v)


def mtj_resistance(model: MtjModel, theta: float, v: float = 0.0) -> float:
    """Resistance at relative angle ``theta`` (rad) and bias ``v``.

    Conductances interpolate as cos(theta) between the parallel and
    anti-parallel endpoints.
    """
    if not math.isfinite(v):
        raise ValueError(f"bias must be finite, got {v!r}")
    g_p = 1.0 / model.r_p(v)
    g_ap = 1.0 / model.r_ap(v)
    c = math.cos(theta)
    return 2.0 / (g_p * (1.0 + c) + g_ap * (1.0 - c))


def _as_func(r: Resistance) -> Callable[[float], float]:
    if callable(r):
        return r
    value = float(r)
    return lambda v: value


def series(*elements: Resistance, damping: float = 0.5, max_iter: int = 200, tol: float = 1e-12):
    """Series chain of (possibly bias-dependent) resistances as one R(V) callable.

    The applied voltage splits so that one current flows through every
    element; the split is found by damped fixed-point iteration.
    """
    funcs = [_as_func(e) for e in elements]
    if len(funcs) == 1:
        return funcs[0]

    def r_total(v_total: float) -> float:
        n = len(funcs)
        parts = [v_total / n] * n
        for _ in range(max_iter):
            rs = [f(p) for f, p in zip(funcs, parts)]
            total = sum(rs)
            new = [v_total * r / total for r in rs]
            delta = max(abs(a - b) for a, b in zip(new, parts))
            parts = [(1 - damping) * p + damping * q for p, q in zip(parts, new)]
            if delta < tol * max(1.0, abs(v_total)):
                return sum(f(p) for f, p in zip(funcs, parts))
        raise ConvergenceError("series split did not converge", iterations=max_iter, residual=delta)

    return r_total


def solve_divider(r_top: Resistance, r_bottom: Resistance, v_read: float, *,
                  damping: float = 0.5, max_iter: int = 200, tol: float = 1e-9) -> float:
    """Node voltage of ``v_read -- r_top -- node -- r_bottom -- ground``.

    Each resistance may depend on the voltage across itself.  Damped
    fixed-point iteration, stopped once the undamped update moves less than
    ``tol``; raises ConvergenceError after ``max_iter``.
    """
    top, bottom = _as_func(r_top), _as_func(r_bottom)
    v = 0.5 * v_read
    delta = float("inf")
    for i in range(1, max_iter + 1):
        rt, rb = top(v_read - v), bottom(v)
        if not (rt > 0 and rb > 0):
            raise ConvergenceError(f"non-positive resistance during divider solve (r_top={rt}, r_bottom={rb})",
                                   iterations=i)
        if math.isinf(rb):
            target = v_read
        else:
            target = v_read * rb / (rt + rb)
        # converged when the undamped image is within tol; return that image
        delta = abs(target - v)
        if delta < tol:
            return target
        v = (1 - damping) * v + damping * target
    raise ConvergenceError(f"divider did not converge in {max_iter} iterations (|dv| = {delta:.3g} V)",
                           iterations=max_iter, residual=delta)


def divider_residual(r_top: Resistance, r_bottom: Resistance, v_read: float, v_node: float) -> float:
    """Relative Kirchhoff current mismatch at the divider node."""
    top, bottom = _as_func(r_top), _as_func(r_bottom)
    i_in = (v_read - v_node) / top(v_read - v_node)
    i_out = v_node / bottom(v_node)
    return abs(i_in - i_out) / max(abs(i_in), abs(i_out), 1e-300)


@dataclass(frozen=True)
class ReadCircuit:
    """Sense path: reference MTJ over the device stack, feeding an ideal inverter.

    ``r_ref`` and ``inverter_trip`` default to the geometric mean of the
    zero-bias P/AP resistances and ``v_read / 2``; use :func:`read_circuit`
    to fill them from an MtjModel.
    """

    v_read: float = 0.85
    r_ref: float = math.sqrt(5e3 * 10e3)
    inverter_trip: float = 0.425
    v_out_high: float = V_DATA_DEFAULT
    v_out_low: float = 0.0
    c_g: float = 0.1e-15
    v_g: float = 1.0
    v_switch_min: float = V_SWITCH_MIN_DEFAULT

    def __post_init__(self):
        if not self.v_read > 0:
            raise ValueError(f"v_read must be positive, got {self.v_read!r}")
        if not self.r_ref > 0:
            raise ValueError(f"r_ref must be positive, got {self.r_ref!r}")
        if not self.v_out_low < self.inverter_trip < self.v_out_high:
            raise ValueError("need v_out_low < inverter_trip < v_out_high "
                             f"(got {self.v_out_low}, {self.inverter_trip}, {self.v_out_high})")
        if self.c_g < 0:
            raise ValueError("c_g must be non-negative")
        if not self.v_switch_min > 0:
            raise ValueError("v_switch_min must be positive")


def read_circuit(model: MtjModel, v_read: float = 0.85, *, r_ref: float | None = None,
                 inverter_trip: float | None = None, **kw) -> ReadCircuit:
    if r_ref is None:
        r_ref = math.sqrt(model.r_p(0.0) * model.r_ap(0.0))
    if inverter_trip is None:
        inverter_trip = 0.5 * v_read
    return ReadCircuit(v_read=v_read, r_ref=r_ref, inverter_trip=inverter_trip, **kw)


def inverter_out(v_in: float, circuit: ReadCircuit) -> float:
    """Ideal static inverter; an input exactly at the trip point reads as high input (output low)."""
    if not math.isfinite(v_in):
        raise ValueError(f"inverter input must be finite, got {v_in!r}")
    return circuit.v_out_high if v_in < circuit.inverter_trip else circuit.v_out_low


def check_disturb(v_node: float, circuit: ReadCircuit) -> bool:
    """True when the sense node is safely below the magnet switching voltage."""
    return abs(v_node) < circuit.v_switch_min
