"""Backlund matrix linking a full-line solution to its folded mirror.

B(j, z) is a Laurent polynomial in z with eight scalar coefficients per
site; these are seeded at j = 0 so that B(0, z) equals the field-dependent
reflection matrix and then advanced in both directions by the recursions.
"""

from dataclasses import dataclass, field

import numpy as np

from ..algebra import det2, inv2, mat2
from ..boundary import tau
from ..dynamics import _conj_root
from ..errors import ConstraintViolationError, SingularFieldError
from ..lax import ell, ell_inverse, time_lax_A
from ..model import FIELD_FLOOR
from .gauge import K_minus_td
from .scattering import phi

CONSTRAINT_TOL = 1e-8


@dataclass(frozen=True)
class LineFields:
    """Fields on sites j0 .. j0 + len - 1 of the full line; zero outside."""

    q: np.ndarray
    r: np.ndarray
    j0: int

    def qa(self, j):
        k = j - self.j0
        return complex(self.q[k]) if 0 <= k < self.q.size else 0j

    def ra(self, j):
        k = j - self.j0
        return complex(self.r[k]) if 0 <= k < self.r.size else 0j

    @property
    def sites(self):
        return np.arange(self.j0, self.j0 + self.q.size)


def fold(f, p):
    """Mirror fields Qt_j = -s^(2j+1) Q_{-j-1}, Rt_j = -s^-(2j+1) R_{-j-1}."""
    js = -f.sites[::-1] - 1
    s = p.s
    pw = s ** (2.0 * js + 1)
    return LineFields(-pw * f.q[::-1], -f.r[::-1] / pw, int(js[0]))


@dataclass(frozen=True)
class BacklundSeeds:
    f1: complex
    f2: complex
    g1: complex
    g2: complex
    x1: complex
    x2: complex
    y1: complex
    y2: complex


def folded_lax_residual(f, j, z, p):
    """|Lt(j, z) - J^(j+1) L(-j-1, tau z)^-1 J^-j| for the fold of fields ``f``."""
    g = fold(f, p)
    sj = p.s
    Jp = lambda k: np.diag([sj**k, sj ** (-k)])  # noqa: E731
    k = -j - 1
    rhs = Jp(j + 1) @ ell_inverse(f.qa(k), f.ra(k), tau(z, p)) @ Jp(-j)
    return float(np.max(np.abs(ell(g.qa(j), g.ra(j), z) - rhs)))


def backlund_seeds(Q0, R0, bp, p):
    """Coefficients at j = 0 that make B(0, z) equal K-(z) on ``bp.branch``.

    f1_0 = (a - sigma S)/2 pairs with the closure that uses a + sigma S.
    """
    f1 = _conj_root(Q0, R0, bp) / 2
    s = p.s
    return BacklundSeeds(
        f1=f1,
        f2=bp.b / p.sqrt_alpha_beta,
        g1=bp.b / p.alpha,
        g2=s * f1,
        x1=-(s**2) * bp.cd / f1,
        x2=0j,
        y1=0j,
        y2=-bp.cd / (s * f1),
    )


def backlund_matrix(j, co, f, g, z):
    """B(j, z) from the ansatz; ``f`` the fields, ``g`` the mirror fields."""
    z = np.asarray(z, dtype=complex)
    q, r, qt, rt = f.qa, f.ra, g.qa, g.ra
    M = mat2(z * co.f1 + co.g1 / z, co.f1 * qt(j) - co.f2 * q(j),
             -co.g1 * r(j) + co.g2 * rt(j), z * co.f2 + co.g2 / z)
    M = M + (co.x1 / z**2)[..., None, None] * mat2(
        1 / z, -qt(j - 1), -r(j) - z**2 * r(j + 1) * (1 - q(j) * r(j)), z * r(j) * qt(j - 1))
    M = M + (co.x2 / z**2)[..., None, None] * mat2(
        z * rt(j) * q(j - 1), q(j - 1), rt(j) + z**2 * rt(j + 1) * (1 - qt(j) * rt(j)), 1 / z)
    M = M + (z**2 * co.y2)[..., None, None] * mat2(
        q(j) * rt(j - 1) / z, -q(j) - q(j + 1) * (1 - r(j) * q(j)) / z**2, -rt(j - 1), z)
    M = M + (z**2 * co.y1)[..., None, None] * mat2(
        z, qt(j) + qt(j + 1) * (1 - rt(j) * qt(j)) / z**2, r(j - 1), qt(j) * r(j - 1) / z)
    return M


def _s(j, f, g):
    num = 1 - f.ra(j) * f.qa(j)
    den = 1 - g.ra(j) * g.qa(j)
    if abs(den) < FIELD_FLOOR or abs(num) < FIELD_FLOOR:
        raise SingularFieldError(f"recursion factor singular at site {j}")
    return np.sqrt(num / den)


def step_forward(j, co, f, g):
    """Coefficients at j + 1 from those at j."""
    q, r, qt, rt = f.qa, f.ra, g.qa, g.ra
    s = _s(j, f, g)
    return BacklundSeeds(
        f1=(co.f1 + co.y1 * (q(j) * r(j - 1) - qt(j + 1) * rt(j))) / s,
        f2=(co.f2 + co.y2 * (qt(j) * rt(j - 1) - q(j + 1) * r(j))) * s,
        g1=(co.g1 + co.x1 * (qt(j - 1) * rt(j) - q(j) * r(j + 1))) * s,
        g2=(co.g2 + co.x2 * (q(j - 1) * r(j) - qt(j) * rt(j + 1))) / s,
        x1=co.x1 * s,
        x2=co.x2 / s,
        y1=co.y1 / s,
        y2=co.y2 * s,
    )


def step_backward(j, co, f, g):
    """Coefficients at j from those at j + 1 (inverse of ``step_forward``)."""
    q, r, qt, rt = f.qa, f.ra, g.qa, g.ra
    s = _s(j, f, g)
    x1, x2, y1, y2 = co.x1 / s, co.x2 * s, co.y1 * s, co.y2 / s
    return BacklundSeeds(
        f1=co.f1 * s - y1 * (q(j) * r(j - 1) - qt(j + 1) * rt(j)),
        f2=co.f2 / s - y2 * (qt(j) * rt(j - 1) - q(j + 1) * r(j)),
        g1=co.g1 / s - x1 * (qt(j - 1) * rt(j) - q(j) * r(j + 1)),
        g2=co.g2 * s - x2 * (q(j - 1) * r(j) - qt(j) * rt(j + 1)),
        x1=x1, x2=x2, y1=y1, y2=y2,
    )


def constraint_residuals(j, co, f, g):
    """Left minus right side of the two compatibility constraints at site j."""
    q, r, qt, rt = f.qa, f.ra, g.qa, g.ra
    P = lambda k: 1 - q(k) * r(k)  # noqa: E731
    Pt = lambda k: 1 - qt(k) * rt(k)  # noqa: E731
    d12 = (co.f1 * qt(j) - co.f2 * q(j) - co.y2 * q(j + 1) * P(j) + co.y1 * qt(j + 1) * Pt(j)) - (
        co.g2 * q(j - 1) - co.g1 * qt(j - 1) - co.x1 * qt(j - 2) * Pt(j - 1) + co.x2 * q(j - 2) * P(j - 1)
    )
    d21 = (co.g2 * rt(j) - co.g1 * r(j) - co.x1 * r(j + 1) * P(j) + co.x2 * rt(j + 1) * Pt(j)) - (
        co.f1 * r(j - 1) - co.f2 * rt(j - 1) - co.y2 * rt(j - 2) * Pt(j - 1) + co.y1 * r(j - 2) * P(j - 1)
    )
    return abs(d12), abs(d21)


@dataclass
class BacklundChain:
    """Coefficients on sites -J..J together with the field pair."""

    fields: LineFields
    mirror: LineFields
    coeffs: dict = field(default_factory=dict)

    @property
    def J(self):
        return max(self.coeffs)

    def matrix(self, j, z):
        return backlund_matrix(j, self.coeffs[j], self.fields, self.mirror, z)


def run_backlund(f, g, seeds, J, tol=CONSTRAINT_TOL):
    """Advance the seeds over j in [-J, J], checking both constraints at each site.

    Raises ConstraintViolationError naming the first failing site.
    """
    coeffs = {0: seeds}
    for j in range(0, J):
        coeffs[j + 1] = step_forward(j, coeffs[j], f, g)
    for j in range(-1, -J - 1, -1):
        coeffs[j] = step_backward(j, coeffs[j + 1], f, g)
    for j in range(-J, J + 1):
        d12, d21 = constraint_residuals(j, coeffs[j], f, g)
        if max(d12, d21) > tol:
            raise ConstraintViolationError(
                f"Backlund constraint violated at site {j}: {max(d12, d21):.2e}")
    return BacklundChain(f, g, coeffs)


def determinant_spread(chain, z):
    """Max relative deviation of det B(j, z) from det B(0, z) over the window."""
    d0 = det2(chain.matrix(0, z))
    return max(abs(det2(chain.matrix(j, z)) - d0) for j in chain.coeffs) / abs(d0)


def symmetry_residual(chain, j, z, f1inf, bp, p):
    """|phi(z) phi(tau z) B(-j, tau z)^-1 - J^-j B(j, z) J^j|."""
    tz = tau(z, p)
    Jm = np.diag([p.s ** (-j), p.s ** j])
    Jp = np.diag([p.s ** j, p.s ** (-j)])
    lhs = phi(z, f1inf, bp, p) * phi(tz, f1inf, bp, p) * inv2(chain.matrix(-j, tz))
    rhs = Jm @ chain.matrix(j, z) @ Jp
    return float(np.max(np.abs(lhs - rhs)))


def asymptotic_matrix(z, f1inf, bp, p):
    """B(+-infinity, z) = diag(phi(z), phi(tau z))."""
    return mat2(phi(z, f1inf, bp, p), 0, 0, phi(tau(z, p), f1inf, bp, p))


def tail_window(field_fn, tol=1e-10, J_max=80, run=5):
    """Smallest J with |Q_{+-j}| < tol for j = J .. J + run - 1.

    Sites are probed outward from the origin so that far-away sites, where
    the field evaluation may be ill-conditioned, are never touched.
    """
    below = 0
    for J in range(1, J_max + 1):
        vals = np.abs(field_fn(np.array([-J, J])))
        below = below + 1 if np.all(vals < tol) else 0
        if below == run:
            return J - run + 1
    raise ConstraintViolationError("fields do not decay inside the search window")


def recursion_residual(chain, z, window=None):
    """Max over j in ``window`` (default [-J, J-1]) of |B(j+1) ell_mirror(j) - ell(j) B(j)|."""
    f, g = chain.fields, chain.mirror
    lo, hi = window if window is not None else (-chain.J, chain.J - 1)
    worst = 0.0
    for j in range(lo, hi + 1):
        res = chain.matrix(j + 1, z) @ ell(g.qa(j), g.ra(j), z) - ell(f.qa(j), f.ra(j), z) @ chain.matrix(j, z)
        worst = max(worst, float(np.max(np.abs(res))))
    return worst


def time_relation_residual(field_fn, t, z, bp, p, h=1e-4):
    """|dB(0)/dt - (A(0) B(0) - B(0) At(0))| with dB/dt by a five-point stencil.

    ``field_fn(js, t)`` returns the full-line field Q at sites ``js``; R is
    nu conj(Q). B(0) is the reflection matrix of the edge fields, A(0) the
    bulk time matrix on the line and At(0) the one on the folded mirror.
    """
    nu = p.nu

    def B0(tt):
        q0 = complex(field_fn(np.array([0]), tt)[0])
        return K_minus_td(q0, nu * np.conj(q0), z, bp, p)

    dB = (-B0(t + 2 * h) + 8 * B0(t + h) - 8 * B0(t - h) + B0(t - 2 * h)) / (12 * h)
    qm1, q0 = (complex(v) for v in field_fn(np.array([-1, 0]), t))
    qt0, qtm1 = -p.s * qm1, -q0 / p.s
    A = time_lax_A(q0, nu * np.conj(q0), qm1, nu * np.conj(qm1), z, p)
    At = time_lax_A(qt0, nu * np.conj(qt0), qtm1, nu * np.conj(qtm1), z, p)
    B = B0(t)
    return float(np.max(np.abs(dB - (A @ B - B @ At))))


__all__ = [
    "BacklundChain",
    "BacklundSeeds",
    "LineFields",
    "asymptotic_matrix",
    "backlund_matrix",
    "backlund_seeds",
    "constraint_residuals",
    "determinant_spread",
    "fold",
    "folded_lax_residual",
    "recursion_residual",
    "run_backlund",
    "step_backward",
    "step_forward",
    "symmetry_residual",
    "tail_window",
    "time_relation_residual",
]
