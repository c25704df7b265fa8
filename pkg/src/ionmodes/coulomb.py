"""Closed-form derivatives of the Coulomb pair potential 1/|r|.

Blocks are derivatives with respect to the components of the separation
vector r = r_i - r_j; derivatives with respect to ion coordinates follow by
flipping the sign once per index taken on ion j.
"""

import numpy as np

_EYE = np.eye(3)


def inv_r_d2(r: np.ndarray) -> np.ndarray:
    """d^2(1/|r|)/dr_a dr_b, shape (3, 3)."""
    rn = np.linalg.norm(r)
    return (3.0 * np.outer(r, r) - rn**2 * _EYE) / rn**5


def inv_r_d3(r: np.ndarray) -> np.ndarray:
    """d^3(1/|r|)/dr_a dr_b dr_c, shape (3, 3, 3)."""
    rn = np.linalg.norm(r)
    rr = np.multiply.outer(np.outer(r, r), r)  # r_a r_b r_c
    deltas = (np.multiply.outer(_EYE, r)
              + np.multiply.outer(_EYE, r).transpose(0, 2, 1)
              + np.multiply.outer(r, _EYE))
    return -3.0 * (5.0 * rr - rn**2 * deltas) / rn**7


def inv_r_d4(r: np.ndarray) -> np.ndarray:
    """d^4(1/|r|)/dr_a dr_b dr_c dr_d, shape (3, 3, 3, 3)."""
    rn = np.linalg.norm(r)
    rr = np.outer(r, r)
    r4 = np.multiply.outer(rr, rr)  # r_a r_b r_c r_d
    x = np.multiply.outer(_EYE, rr)  # delta_ab r_c r_d
    y = np.multiply.outer(rr, _EYE)  # r_a r_b delta_cd
    pair = (x + x.transpose(0, 2, 1, 3) + x.transpose(0, 3, 1, 2)
            + y.transpose(0, 3, 1, 2) + y.transpose(0, 2, 1, 3) + y)
    z = np.multiply.outer(_EYE, _EYE)  # delta_ab delta_cd
    dd = z + z.transpose(0, 2, 1, 3) + z.transpose(0, 3, 1, 2)
    return (105.0 * r4 - 15.0 * rn**2 * pair + 3.0 * rn**4 * dd) / rn**9


def inv_u_axial(order: int, u: float) -> float:
    """d^k(1/u)/du^k for a positive scalar separation u."""
    sign = -1.0 if order % 2 else 1.0
    fact = 1.0
    for k in range(1, order + 1):
        fact *= k
    return sign * fact / u ** (order + 1)
