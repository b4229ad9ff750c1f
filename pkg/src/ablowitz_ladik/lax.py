"""Bulk Lax structures of the generalised Ablowitz-Ladik chain.

Lax matrix ell(j, z) normalised to unit determinant, its classical r-matrix,
the time Lax matrix A(j, z), monodromy and transfer matrices, the conserved
charges they generate and the periodic Hamiltonian.
"""

from dataclasses import dataclass, field

import numpy as np

from .algebra import SIGMA3, SWAP4, det2, kron, laurent_extract, mat2
from .errors import PoleError, SingularFieldError
from .model import FIELD_FLOOR

POLE_FLOOR = 1e-12


def _check_z(z):
    if np.any(np.abs(np.asarray(z)) < POLE_FLOOR):
        raise SingularFieldError("spectral parameter z = 0")


def ell(q, r, z):
    """Lax matrix (1 - q r)^(-1/2) [[z, q], [r, 1/z]] (principal square root)."""
    _check_z(z)
    q = np.asarray(q, dtype=complex)
    r = np.asarray(r, dtype=complex)
    one_m = 1 - q * r
    if np.any(np.abs(one_m) < FIELD_FLOOR):
        raise SingularFieldError("1 - q r below floor")
    z = np.asarray(z, dtype=complex)
    return mat2(z, q, r, 1 / z) / np.sqrt(one_m)[..., None, None]


def ell_inverse(q, r, z):
    """Inverse of ell; exact because det ell = 1."""
    _check_z(z)
    q = np.asarray(q, dtype=complex)
    r = np.asarray(r, dtype=complex)
    z = np.asarray(z, dtype=complex)
    return mat2(1 / z, -q, -r, z) / np.sqrt(1 - q * r)[..., None, None]


def dell_dt(q, r, qdot, rdot, z):
    """Time derivative of ell(j, z) given the field velocities."""
    one_m = 1 - q * r
    z = np.asarray(z, dtype=complex)
    base = mat2(z, q, r, 1 / z)
    pref = 0.5 * (qdot * r + q * rdot) / one_m**1.5
    return pref * base + mat2(0, qdot, rdot, 0) / np.sqrt(one_m)


def r_matrix(z):
    """Classical r-matrix i/(2(1-z^2)) * [[z^2+1,0,0,0],[0,0,2z,0],[0,2z,0,0],[0,0,0,z^2+1]]."""
    z = np.asarray(z, dtype=complex)
    if np.any(np.abs(1 - z**2) < POLE_FLOOR):
        raise PoleError("r-matrix pole at z = +-1")
    out = np.zeros(z.shape + (4, 4), dtype=complex)
    diag = z**2 + 1
    out[..., 0, 0] = diag
    out[..., 3, 3] = diag
    out[..., 1, 2] = 2 * z
    out[..., 2, 1] = 2 * z
    return out * (0.5j / (1 - z**2))[..., None, None]


def swap_spaces(R):
    """r_ab -> r_ba for a 4x4 operator on C^2 (x) C^2."""
    return SWAP4 @ R @ SWAP4


def _embed3(R, spaces):
    """Embed a two-space operator into C^2 (x) C^2 (x) C^2 on ``spaces``."""
    T = np.asarray(R).reshape(2, 2, 2, 2)
    I = np.eye(2)
    if spaces == "ab":
        return np.einsum("ijkl,mn->ijmkln", T, I).reshape(8, 8)
    if spaces == "bc":
        return np.einsum("ijkl,mn->mijnkl", T, I).reshape(8, 8)
    if spaces == "ac":
        return np.einsum("ijkl,mn->imjknl", T, I).reshape(8, 8)
    raise ValueError(spaces)


def yang_baxter_residual(w, z, v):
    """Spectral norm of the classical Yang-Baxter combination at (w, z, v)."""
    rac = _embed3(r_matrix(w / v), "ac")
    rbc = _embed3(r_matrix(z / v), "bc")
    rab = _embed3(r_matrix(w / z), "ab")

    def comm(X, Y):
        return X @ Y - Y @ X

    total = comm(rac, rbc) + comm(rab, rac) + comm(rab, rbc)
    return float(np.linalg.norm(total, 2))


def omega(z, p):
    """Dispersion alpha z^2 + gamma + beta / z^2."""
    _check_z(z)
    z = np.asarray(z, dtype=complex)
    return p.alpha * z**2 + p.gamma + p.beta / z**2


def time_lax_A(q_j, r_j, q_jm1, r_jm1, z, p):
    """Time Lax matrix A(j, z); uses the fields at sites j and j-1."""
    _check_z(z)
    z = np.asarray(z, dtype=complex)
    al, be = p.alpha, p.beta
    w = omega(z, p)
    diag = w - be * r_j * q_jm1 - al * q_j * r_jm1
    return 1j * mat2(
        diag,
        2 * al * z * q_j - 2 * be * q_jm1 / z,
        2 * al * z * r_jm1 - 2 * be * r_j / z,
        -diag,
    )


def partial_monodromy(s, n, m, z):
    """ell(n) ... ell(m), identity when n = m - 1."""
    z = np.asarray(z, dtype=complex)
    out = np.broadcast_to(np.eye(2, dtype=complex), z.shape + (2, 2)).copy()
    for j in range(m, n + 1):
        out = ell(s.q[j], s.r[j], z) @ out
    return out


def monodromy(s, z):
    """Single-row monodromy L(z) = ell(N) ... ell(0)."""
    return partial_monodromy(s, s.N, 0, z)


def transfer(s, z):
    """Single-row transfer matrix tr L(z)."""
    L = monodromy(s, z)
    return L[..., 0, 0] + L[..., 1, 1]


@dataclass
class ChargeSet:
    C: complex
    I: dict = field(default_factory=dict)


def product_charge(s):
    return complex(np.prod(1 / np.sqrt(1 - s.q * s.r)))


def transfer_and_charges(s, p=None):
    """Charges of the periodic chain: C and the Laurent coefficients of tr L."""
    if s.topology != "periodic":
        raise ValueError("transfer charges are defined for periodic states")
    n1 = s.N + 1
    series = laurent_extract(lambda z: transfer(s, z), (-n1, n1), step=2, vectorized=True)
    return ChargeSet(product_charge(s), dict(series.coefficients))


def hamiltonian_periodic(s, p):
    """2 sum_j (-alpha r_j q_{j+1} - beta q_j r_{j+1} + gamma ln(1 - q_j r_j))."""
    one_m = 1 - s.q * s.r
    if np.any(np.abs(one_m) < FIELD_FLOOR):
        raise SingularFieldError("1 - q r below floor")
    qn = np.roll(s.q, -1)
    rn = np.roll(s.r, -1)
    return complex(2 * np.sum(-p.alpha * s.r * qn - p.beta * s.q * rn + p.gamma * np.log(one_m)))


def rhs_periodic(s, p):
    """Closed-form Hamilton equations of the periodic chain."""
    q, r = s.q, s.r
    qp, qm = np.roll(q, -1), np.roll(q, 1)
    rp, rm = np.roll(r, -1), np.roll(r, 1)
    al, be, ga = p.alpha, p.beta, p.gamma
    qdot = 2j * (al * qp + ga * q + be * qm - q * r * (al * qp + be * qm))
    rdot = -2j * (be * rp + ga * r + al * rm - q * r * (al * rm + be * rp))
    return qdot, rdot


def zero_curvature_residual_periodic(s, z, p, qdot=None, rdot=None):
    """Max over sites of |d/dt ell(j) - (A(j+1) ell(j) - ell(j) A(j))|."""
    if qdot is None:
        qdot, rdot = rhs_periodic(s, p)
    q, r = s.q, s.r
    worst = 0.0
    for j in range(s.N + 1):
        jn = (j + 1) % (s.N + 1)
        A_j = time_lax_A(q[j], r[j], q[j - 1], r[j - 1], z, p)
        A_n = time_lax_A(q[jn], r[jn], q[j], r[j], z, p)
        L = ell(q[j], r[j], z)
        res = dell_dt(q[j], r[j], qdot[j], rdot[j], z) - (A_n @ L - L @ A_j)
        worst = max(worst, float(np.max(np.abs(res))))
    return worst


def rll_commutator(w, z, ell_w, ell_z):
    """Right-hand side [r(w/z), ell_a(w) ell_b(z)] of the quadratic algebra."""
    R = r_matrix(w / z)
    P = kron(ell_w, np.eye(2)) @ kron(np.eye(2), ell_z)
    return R @ P - P @ R


__all__ = [
    "ChargeSet",
    "SIGMA3",
    "det2",
    "dell_dt",
    "ell",
    "ell_inverse",
    "hamiltonian_periodic",
    "monodromy",
    "omega",
    "partial_monodromy",
    "product_charge",
    "r_matrix",
    "rhs_periodic",
    "rll_commutator",
    "swap_spaces",
    "time_lax_A",
    "transfer",
    "transfer_and_charges",
    "yang_baxter_residual",
    "zero_curvature_residual_periodic",
]
