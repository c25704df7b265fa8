"""Physical constants (CODATA 2018).

All internal computation is in SI; configuration files use lab units
(amu, um, MHz, mK) and are converted at the boundary.
"""

import math

ELEMENTARY_CHARGE = 1.602176634e-19  # C (exact)
PLANCK = 6.62607015e-34              # J s (exact)
HBAR = PLANCK / (2.0 * math.pi)      # J s, kept exactly h/2pi for internal consistency
BOLTZMANN = 1.380649e-23             # J/K (exact)
EPSILON_0 = 8.8541878128e-12         # F/m
ATOMIC_MASS = 1.66053906660e-27      # kg
COULOMB = 1.0 / (4.0 * math.pi * EPSILON_0)  # N m^2 / C^2
