"""Demagnetization factors of a uniformly magnetized rectangular prism.

The closed form is Aharoni's expression (J. Appl. Phys. 83, 3432, 1998) for
a prism of half-sides ``a, b, c`` magnetized along ``c``.  The logarithms are
rewritten so that thin plates (``c << a, b``) do not lose precision to
cancellation in ``sqrt(x**2 + s) - x``.
"""

from __future__ import annotations

import math

from .errors import InvalidGeometryError


def _log_ratio(x: float, s: float) -> float:
    """ln((R - x) / (R + x)) with R = sqrt(x**2 + s), computed without cancellation."""
    r = math.sqrt(x * x + s)
    return math.log(s) - 2.0 * math.log(r + x)


def prism_factor(a: float, b: float, c: float) -> float:
    """Demagnetization factor along ``c`` for a prism of half-sides a, b, c."""
    a2, b2, c2 = a * a, b * b, c * c
    abc = a * b * c
    r_abc = math.sqrt(a2 + b2 + c2)
    r_ab = math.sqrt(a2 + b2)
    r_bc = math.sqrt(b2 + c2)
    r_ac = math.sqrt(a2 + c2)

    total = (
        (b2 - c2) / (2 * b * c) * _log_ratio(a, b2 + c2)
        + (a2 - c2) / (2 * a * c) * _log_ratio(b, a2 + c2)
        - b / (2 * c) * _log_ratio(a, b2)
        - a / (2 * c) * _log_ratio(b, a2)
        + c / (2 * a) * _log_ratio(b, c2)
        + c / (2 * b) * _log_ratio(a, c2)
        + 2 * math.atan(a * b / (c * r_abc))
        + (a2 * a + b2 * b - 2 * c2 * c) / (3 * abc)
        + (a2 + b2 - 2 * c2) / (3 * abc) * r_abc
        + c / (a * b) * (r_ac + r_bc)
        - (r_ab**3 + r_bc**3 + r_ac**3) / (3 * abc)
    )
    return total / math.pi


def demag_factors(length_x: float, width_y: float, thickness_z: float) -> tuple[float, float, float]:
    """Return ``(Nxx, Nyy, Nzz)`` for a prism with the given full edge lengths.

    The three factors sum to one.  Raises InvalidGeometryError for
    non-positive or non-finite edges.
    """
    dims = (length_x, width_y, thickness_z)
    for name, value in zip(("length_x", "width_y", "thickness_z"), dims):
        if not (math.isfinite(value) and value > 0):
            raise InvalidGeometryError(f"{name} must be positive and finite, got {value!r}")
    # scale-free: normalize so the largest half-side is 1
    scale = max(dims) / 2
    x, y, z = (d / 2 / scale for d in dims)
    return (
        prism_factor(y, z, x),
        prism_factor(z, x, y),
        prism_factor(x, y, z),
    )
