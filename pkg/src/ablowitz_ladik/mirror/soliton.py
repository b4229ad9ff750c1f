"""Multisoliton solutions of the focusing DNLS on the half lattice.

The full-line solution is built from the folded octets by a 2k x 2k linear
solve; its restriction to j >= -1 satisfies the bulk equation for j >= 0 and
the boundary closure at j = -1.

Time convention: the library integrates dq/dt = 2i(alpha q_{j+1} + ...),
which for the focusing reduction is dQ/dt = i(Q_{j+1} - 2Q_j + Q_{j-1}
+ |Q_j|^2 (Q_{j+1} + Q_{j-1})). The exponentials below carry the signs
that solve this equation (the opposite sign gives its time reverse).
"""

import mpmath
import numpy as np

from ..dynamics import ExtrinsicState, ghost_closure
from ..errors import IllConditionedError
from .scattering import DiscreteData, f1_infinity_roots, octet_expand

COND_LIMIT = 1e12
# sites whose best double-precision system is worse than this are redone in
# extended precision
FALLBACK_COND = 1e5


def _omega_dnls(z):
    return 0.5 * (z - 1 / z) ** 2


def soliton_field(oct, j, t, extended=True):
    """Q_j(t) for an array of sites ``j`` at a single time ``t``.

    The system is mu x = rhs with mu = I - 4 diag(a) C1 diag(b) C2, where C1
    and C2 are Cauchy matrices and a_n, b_p carry the j and t dependence.
    Where |a| |b| is large (typically j < 0) the identity is negligible and
    the direct solve cancels, so the equivalent form
    x = -(1/4) C2^-1 (diag(b) - C1^-1 diag(1/a) C2^-1 / 4)^-1 C1^-1 w is also
    solved and the better conditioned of the two is kept per site. With
    several solitons the scales can be mixed so that both forms are poor;
    such sites are recomputed with mpmath when ``extended`` is true and
    otherwise raise IllConditionedError past COND_LIMIT.
    """
    j = np.atleast_1d(np.asarray(j))
    m = oct.z.size
    if m == 0:
        return np.zeros(j.shape, dtype=complex)
    z2, zb2 = oct.z**2, oct.zbar**2
    a = oct.Cbar[None, :] * oct.zbar[None, :] ** (2 * (j[:, None] + 1)) * np.exp(2j * _omega_dnls(oct.zbar) * t)
    b = oct.C[None, :] * oct.z[None, :] ** (-2 * j[:, None]) * np.exp(-2j * _omega_dnls(oct.z) * t)
    C1 = 1 / (zb2[:, None] - z2[None, :])
    C2 = 1 / (z2[:, None] - zb2[None, :])
    w = 1 / zb2
    C1i, C2i = np.linalg.inv(C1), np.linalg.inv(C2)
    # far from the origin one of the two forms overflows; it is then
    # reported with infinite condition number and never selected
    with np.errstate(divide="ignore", over="ignore", invalid="ignore"):
        mu = np.eye(m)[None] - 4 * a[:, :, None] * np.einsum("np,jp,pl->jnl", C1, b, C2)
        x_direct, cond_direct = _solve_equilibrated(mu, a * w[None, :])
        T = b[:, :, None] * np.eye(m)[None] - 0.25 * np.einsum("np,jp,pl->jnl", C1i, 1 / a, C2i)
        y, cond_inv = _solve_equilibrated(T, np.broadcast_to(C1i @ w, b.shape))
    cond_inv = cond_inv * np.linalg.cond(C1) * np.linalg.cond(C2)
    use_inv = cond_inv < cond_direct
    cond = np.where(use_inv, cond_inv, cond_direct)
    out = np.where(use_inv, 0.5 * (y @ C2i.T).sum(axis=-1), -2 * x_direct.sum(axis=-1))
    if extended:
        for k in np.flatnonzero(~(cond < FALLBACK_COND)):
            grade = np.abs(a[k]).max() * np.abs(b[k]).max()
            out[k] = _field_extended(oct, int(j[k]), t, grade)
    elif np.any(~np.isfinite(cond)) or np.any(cond > COND_LIMIT):
        raise IllConditionedError(f"mu-bar condition number {np.max(cond):.2e} exceeds {COND_LIMIT:g}")
    return out


def _field_extended(oct, j, t, grade):
    digits = 30 + 2 * int(np.ceil(np.log10(max(grade, 1.0) if np.isfinite(grade) else 1e300)))
    with mpmath.workdps(digits):
        z = [mpmath.mpc(v) for v in oct.z]
        zb = [mpmath.mpc(v) for v in oct.zbar]
        om = lambda x: (x - 1 / x) ** 2 / 2  # noqa: E731
        T = mpmath.mpf(t)
        a = [mpmath.mpc(c) * w ** (2 * (j + 1)) * mpmath.exp(2j * om(w) * T) for c, w in zip(oct.Cbar, zb)]
        b = [mpmath.mpc(c) * w ** (-2 * j) * mpmath.exp(-2j * om(w) * T) for c, w in zip(oct.C, z)]
        m = len(z)
        mu = mpmath.matrix(m, m)
        rhs = mpmath.matrix(m, 1)
        for n in range(m):
            rhs[n] = a[n] / zb[n] ** 2
            for l in range(m):
                acc = sum(b[q] / ((zb[n] ** 2 - z[q] ** 2) * (z[q] ** 2 - zb[l] ** 2)) for q in range(m))
                mu[n, l] = (1 if n == l else 0) - 4 * a[n] * acc
        try:
            x = mpmath.lu_solve(mu, rhs)
        except ZeroDivisionError as exc:
            raise IllConditionedError(f"mu-bar singular at site {j} even in extended precision") from exc
        return complex(-2 * sum(x))


def _solve_equilibrated(M, rhs):
    # Rows carry factors zbar^(2j), z^(-2j) and growing exponentials; scale
    # them out before judging the conditioning and solving.
    scale = np.abs(M).max(axis=-1)
    M = M / scale[..., None]
    rhs = rhs / scale
    finite = np.all(np.isfinite(M), axis=(-2, -1)) & np.all(np.isfinite(rhs), axis=-1)
    M = np.where(finite[..., None, None], M, np.eye(M.shape[-1]))
    cond = np.where(finite, np.linalg.cond(M), np.inf)
    ok = np.isfinite(cond) & (cond < 1 / np.finfo(float).eps)
    sol = np.zeros(rhs.shape, dtype=complex)
    if np.any(ok):
        sol[ok] = np.linalg.solve(M[ok], rhs[ok][..., None])[..., 0]
    return sol, np.where(ok, cond, np.inf)


def soliton_solution(dd, j, t, p):
    """Q_j(t) for DiscreteData ``dd``; scalar ``j`` gives a scalar."""
    out = soliton_field(octet_expand(dd, p), j, t)
    return complex(out[0]) if np.ndim(j) == 0 else out


def bulk_residual(oct, js, ts, h=1e-4, stencil=5):
    """Max |dQ/dt - i(Q+ - 2Q + Q- + |Q|^2 (Q+ + Q-))| over the (j, t) grid.

    dQ/dt is a central finite difference with step ``h``.
    """
    js = np.asarray(js)
    ext = np.arange(js.min() - 1, js.max() + 2)
    worst = 0.0
    for t in ts:
        if stencil == 5:
            dq = (
                -soliton_field(oct, js, t + 2 * h) + 8 * soliton_field(oct, js, t + h)
                - 8 * soliton_field(oct, js, t - h) + soliton_field(oct, js, t - 2 * h)
            ) / (12 * h)
        else:
            dq = (soliton_field(oct, js, t + h) - soliton_field(oct, js, t - h)) / (2 * h)
        Q = soliton_field(oct, ext, t)
        q0, qp, qm = Q[1:-1], Q[2:], Q[:-2]
        rhs = 1j * (qp - 2 * q0 + qm + np.abs(q0) ** 2 * (qp + qm))
        worst = max(worst, float(np.max(np.abs(dq - rhs))))
    return worst


def closure_residual_series(oct, bp, ts, p):
    """|Q_{-1}(t) - closure(Q_0(t), Q_1(t))| for each t on the branch of ``bp``."""
    out = np.empty(len(ts))
    for k, t in enumerate(ts):
        Qm1, Q0, Q1 = soliton_field(oct, [-1, 0, 1], t)
        R0, R1 = p.nu * np.conj(Q0), p.nu * np.conj(Q1)
        Qg, _ = ghost_closure(ExtrinsicState([Q0, Q1], [R0, R1], bp), p)
        out[k] = abs(Qm1 - Qg)
    return out


def boundary_residuals(oct, bp, ts, p):
    """Max closure residual over ``ts`` for both branches.

    Returns {'plus': r, 'minus': r}. With c = d = 0 both entries hold the
    Robin residual.
    """
    return {b: float(np.max(closure_residual_series(oct, bp.with_branch(b), ts, p), initial=0.0))
            for b in ("plus", "minus")}


def verify_boundary(dd, t_samples, p):
    """(certified branch or None, residuals per branch) for the closure at j = -1."""
    res = boundary_residuals(octet_expand(dd, p), dd.bp, t_samples, p)
    ok = [b for b, v in res.items() if v < 1e-8]
    if dd.bp.is_robin:
        return ("robin" if ok else None), res
    return (ok[0] if len(ok) == 1 else None), res


PROBE_ZETA = 0.6 + 1.9j
PROBE_D = 0.1


def certify_root(bp, p, index, t_samples=None):
    """Validate root ``index`` of the f1inf quartic on a probe one-soliton.

    Returns (root value, certified branch or None, residuals).
    """
    roots = f1_infinity_roots(bp, p)
    f = roots[index].value
    ts = np.linspace(-10, 10, 21) if t_samples is None else t_samples
    dd = DiscreteData([PROBE_ZETA], [PROBE_D], f, bp)
    branch, res = verify_boundary(dd, ts, p)
    return f, branch, res


__all__ = [
    "COND_LIMIT",
    "boundary_residuals",
    "bulk_residual",
    "certify_root",
    "closure_residual_series",
    "soliton_field",
    "soliton_solution",
    "verify_boundary",
]
