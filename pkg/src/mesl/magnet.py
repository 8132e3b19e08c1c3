"""Nano-magnet records and the effective-field terms acting on them.

Field functions accept magnetizations of shape ``(3,)`` or ``(..., 3)`` and
return fields in A/m with the same leading shape.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .constants import C_LIGHT, E_CHARGE, GAMMA_E, HBAR, KB, MU0
from .demag import demag_factors
from .errors import InvalidGeometryError


@dataclass(frozen=True)
class MagnetSpec:
    """Geometry and material of a mono-domain free layer (defaults: the reference device)."""

    length_x: float = 112.5e-9
    width_y: float = 45e-9
    thickness_z: float = 2.5e-9
    ms: float = 1257.3e3
    alpha: float = 0.03
    k_i: float = 1e-3
    gamma: float = GAMMA_E
    temperature: float = 300.0

    def __post_init__(self):
        for name in ("length_x", "width_y", "thickness_z"):
            value = getattr(self, name)
            if not (math.isfinite(value) and value > 0):
                raise InvalidGeometryError(f"{name} must be positive, got {value!r}")
        if not self.ms > 0:
            raise ValueError(f"ms must be positive, got {self.ms!r}")
        if not 0 < self.alpha < 1:
            raise ValueError(f"alpha must lie in (0, 1), got {self.alpha!r}")
        if not self.gamma > 0:
            raise ValueError(f"gamma must be positive, got {self.gamma!r}")
        if not self.temperature >= 0:
            raise ValueError(f"temperature must be >= 0, got {self.temperature!r}")

    @property
    def volume(self) -> float:
        return self.length_x * self.width_y * self.thickness_z

    @property
    def gamma_prime(self) -> float:
        """Damping-scaled gyromagnetic ratio gamma / (1 + alpha**2)."""
        return self.gamma / (1.0 + self.alpha**2)

    @cached_property
    def factors(self) -> tuple[float, float, float]:
        return demag_factors(self.length_x, self.width_y, self.thickness_z)

    def with_temperature(self, temperature: float) -> "MagnetSpec":
        from dataclasses import replace

        return replace(self, temperature=temperature)


@dataclass(frozen=True)
class MeOxideSpec:
    """Magneto-electric capacitor on top of a free layer."""

    me_coefficient: float = 0.15 / C_LIGHT  # s/m
    oxide_thickness: float = 5e-9
    relative_permittivity: float = 500.0
    plate_area: float = 112.5e-9 * 45e-9

    def __post_init__(self):
        if not self.me_coefficient > 0:
            raise ValueError(f"me_coefficient must be positive, got {self.me_coefficient!r}")
        if not self.oxide_thickness > 0:
            raise ValueError(f"oxide_thickness must be positive, got {self.oxide_thickness!r}")
        if not self.relative_permittivity >= 1:
            raise ValueError(f"relative_permittivity must be >= 1, got {self.relative_permittivity!r}")
        if not self.plate_area > 0:
            raise ValueError(f"plate_area must be positive, got {self.plate_area!r}")

    @property
    def field_per_volt(self) -> float:
        """H_ME per applied volt, A/m/V."""
        return self.me_coefficient / (self.oxide_thickness * MU0)


def h_demag(m, spec: MagnetSpec, factors=None) -> np.ndarray:
    """Shape-anisotropy field -Ms * (Nxx mx, Nyy my, Nzz mz)."""
    n = np.asarray(spec.factors if factors is None else factors, dtype=float)
    return -spec.ms * (n * np.asarray(m, dtype=float))


def interface_field_max(spec: MagnetSpec) -> float:
    """2 K_i / (mu0 Ms t_FL), the interface field at mz = 1."""
    return 2.0 * spec.k_i / (MU0 * spec.ms * spec.thickness_z)


def h_interface(m, spec: MagnetSpec) -> np.ndarray:
    m = np.asarray(m, dtype=float)
    out = np.zeros_like(m)
    out[..., 2] = interface_field_max(spec) * m[..., 2]
    return out


def h_me(v_me, oxide: MeOxideSpec) -> np.ndarray:
    """ME field along x.  alpha_ME * E is a flux density; divide by mu0 for A/m."""
    v = np.asarray(v_me, dtype=float)
    out = np.zeros(v.shape + (3,))
    out[..., 0] = oxide.field_per_volt * v
    return out


def thermal_sigma(spec: MagnetSpec, dt: float) -> float:
    """Per-component standard deviation of the thermal field, A/m.

    sqrt(2 alpha kB T / (gamma' Ms V dt)) is a flux density in tesla; the
    result is divided by mu0.
    """
    if not dt > 0:
        raise ValueError(f"dt must be positive, got {dt!r}")
    if spec.temperature == 0:
        return 0.0
    var_b = 2.0 * spec.alpha * KB * spec.temperature / (spec.gamma_prime * spec.ms * spec.volume * dt)
    return math.sqrt(var_b) / MU0


def h_thermal(spec: MagnetSpec, dt: float, rng: np.random.Generator, size=None) -> np.ndarray:
    """Draw one (or ``size``) thermal field realizations."""
    shape = (3,) if size is None else tuple(np.atleast_1d(size)) + (3,)
    sigma = thermal_sigma(spec, dt)
    if sigma == 0.0:
        return np.zeros(shape)
    return sigma * rng.standard_normal(shape)


def stt_strength(current_density: float, spec: MagnetSpec, polarization: float = 0.5) -> float:
    """Slonczewski amplitude hbar P J / (2 e mu0 Ms t_FL), in A/m."""
    return HBAR * polarization * current_density / (2.0 * E_CHARGE * MU0 * spec.ms * spec.thickness_z)


def h_stt(m, current_density: float, axis, spec: MagnetSpec, polarization: float = 0.5) -> np.ndarray:
    """Effective STT field beta * (m x p).

    Added to H_EFF inside both LLG terms it yields the damping-like torque
    -gamma' mu0 beta m x (m x p) plus its alpha-scaled field-like partner.
    """
    m = np.asarray(m, dtype=float)
    beta = stt_strength(current_density, spec, polarization)
    if beta == 0.0:
        return np.zeros_like(m)
    return beta * np.cross(m, np.asarray(axis, dtype=float))


def effective_field(m, spec: MagnetSpec, oxide: MeOxideSpec, v_me=0.0, h_th=None, h_ext=None) -> np.ndarray:
    """H_demag + H_interface + H_thermal + H_ME (+ optional applied field)."""
    m = np.asarray(m, dtype=float)
    h = h_demag(m, spec) + h_interface(m, spec) + h_me(v_me, oxide)
    if h_th is not None:
        h = h + h_th
    if h_ext is not None:
        h = h + np.asarray(h_ext, dtype=float)
    return h
