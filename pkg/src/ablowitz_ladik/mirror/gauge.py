"""Site-0 gauge transformation and the field-dependent reflection matrix.

Conjugating k-(z) by the gauge G(z) built from (q0, r0) gives K-(z), whose
entries depend on the extrinsic edge fields Q0, R0 and therefore on time.
"""

import numpy as np

from ..algebra import inv2, mat2
from ..boundary import boundary_lax, k_minus, tau
from ..dynamics import _conj_root, branch_of, flow_derivative, ghost_closure, make_rhs, to_extrinsic
from ..errors import BoundarySingularityError, SingularFieldError
from ..lax import dell_dt, ell, time_lax_A
from ..model import FIELD_FLOOR


def gauge_G(q0, r0, bp, z):
    """Unit-determinant gauge [[a+d q0, c/z], [-d z, a-c r0]] / sqrt(det)."""
    z = np.asarray(z, dtype=complex)
    det = (bp.a + bp.d * q0) * (bp.a - bp.c * r0) + bp.cd
    if abs(det) < FIELD_FLOOR:
        raise BoundarySingularityError("gauge determinant vanishes")
    return mat2(bp.a + bp.d * q0, bp.c / z, -bp.d * z, bp.a - bp.c * r0) / np.sqrt(det)


def K_minus_td(Q0, R0, z, bp, p):
    """Time-dependent reflection matrix in terms of the extrinsic edge fields.

    Uses (a + sigma S)/(2(1 - Q0 R0)) = -2cd/(a - sigma S) so that c = d = 0
    reduces smoothly to k-(z).
    """
    if abs(1 - Q0 * R0) < FIELD_FLOOR:
        raise SingularFieldError("1 - Q0 R0 below floor")
    z = np.asarray(z, dtype=complex)
    s, al = p.s, p.alpha
    diag = mat2(bp.a * z + bp.b / (al * z), 0, 0, bp.a * s / z + bp.b * z / (al * s))
    coef = -2 * bp.cd / _conj_root(Q0, R0, bp)
    scal = (s**2 / z**2 - z**2) * coef
    return diag + scal[..., None, None] * mat2(1 / z, Q0 / s, -R0, -z / s)


def K_minus_conjugated(q0, r0, z, bp, p):
    """G(z) k-(z) G(tau(z))^-1 from the intrinsic edge fields."""
    return gauge_G(q0, r0, bp, z) @ k_minus(z, bp, p) @ inv2(gauge_G(q0, r0, bp, tau(z, p)))


def extrinsic_A0(e, z, p):
    """Bulk-form time Lax matrix at site 0 fed with the ghost values."""
    Qg, Rg = ghost_closure(e, p)
    return time_lax_A(e.Q[0], e.R[0], Qg, Rg, z, p)


def extrinsic_lax(e, j, z, p):
    """Bulk-form time Lax matrix at site j in 0..N+1 of the extrinsic chain."""
    if j == 0:
        return extrinsic_A0(e, z, p)
    qj = e.Q[j] if j <= e.N else 0j
    rj = e.R[j] if j <= e.N else 0j
    return time_lax_A(qj, rj, e.Q[j - 1], e.R[j - 1], z, p)


def extrinsic_zero_curvature_residual(e, z, p, Qdot, Rdot):
    """Max over j = 0..N of |d/dt L(j) - (A(j+1) L(j) - L(j) A(j))| for extrinsic fields."""
    worst = 0.0
    for j in range(e.N + 1):
        L = ell(e.Q[j], e.R[j], z)
        res = dell_dt(e.Q[j], e.R[j], Qdot[j], Rdot[j], z) - (
            extrinsic_lax(e, j + 1, z, p) @ L - L @ extrinsic_lax(e, j, z, p)
        )
        worst = max(worst, float(np.max(np.abs(res))))
    return worst


def boundary_commutator(e, z, p):
    """A(0, z) K-(z) - K-(z) A(0, tau(z)) with the extrinsic A(0)."""
    K = K_minus_td(e.Q[0], e.R[0], z, e.bp, p)
    return extrinsic_A0(e, z, p) @ K - K @ extrinsic_A0(e, tau(z, p), p)


def time_dependent_boundary_residual(e, z, p, h=1e-4):
    """|dK-/dt - (A(0, z) K- - K- A(0, tau(z)))| along the extrinsic flow from ``e``."""
    n = e.N + 1
    y = np.concatenate([e.Q, e.R])
    Kdot = flow_derivative(lambda v: K_minus_td(v[0], v[n], z, e.bp, p), y, make_rhs("extrinsic", p, e.bp), h)
    return float(np.max(np.abs(Kdot - boundary_commutator(e, z, p))))


def gauge_consistency_residual(s, z, bp, p, h=1e-4):
    """|A(0) - (dG/dt G^-1 + G AA(0) G^-1)| for an intrinsic open state ``s``.

    The extrinsic fields are taken on the branch that ``s`` belongs to; dG/dt
    is differentiated along the intrinsic flow.
    """
    n = s.N + 1
    y = np.concatenate([s.q, s.r])
    G_of = lambda v: gauge_G(v[0], v[n], bp, z)  # noqa: E731
    Gdot = flow_derivative(G_of, y, make_rhs("intrinsic", p, bp, s.topology), h)
    G = G_of(y)
    Gi = inv2(G)
    e = to_extrinsic(s, bp.with_branch(branch_of(s, bp)))
    return float(np.max(np.abs(extrinsic_A0(e, z, p) - (Gdot @ Gi + G @ boundary_lax(s, 0, z, bp, p) @ Gi))))


__all__ = [
    "K_minus_conjugated",
    "K_minus_td",
    "boundary_commutator",
    "extrinsic_A0",
    "extrinsic_lax",
    "extrinsic_zero_curvature_residual",
    "gauge_G",
    "gauge_consistency_residual",
    "time_dependent_boundary_residual",
]
