"""Physical constants (SI)."""

MU0 = 1.25663706212e-6  # vacuum permeability [T m / A]
EPS0 = 8.8541878128e-12  # vacuum permittivity [F / m]
KB = 1.380649e-23  # Boltzmann constant [J / K]
HBAR = 1.054571817e-34  # reduced Planck constant [J s]
E_CHARGE = 1.602176634e-19  # elementary charge [C]
C_LIGHT = 299792458.0  # speed of light [m / s]
GAMMA_E = 1.76e11  # electron gyromagnetic ratio magnitude [rad / (s T)]
