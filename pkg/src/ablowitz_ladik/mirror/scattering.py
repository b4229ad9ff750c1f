"""Reflectionless scattering data for the folded problem.

Each input zero zeta (|zeta| > 1) with norming constant D generates one
octet of discrete data once the folding symmetry and the DNLS reduction are
imposed. The boundary enters only through phi(z), fixed by a root f1inf of
a quartic built from (a, b, c, d).
"""

from dataclasses import dataclass

import numpy as np

from ..errors import ConstraintViolationError, PoleError
from ..model import BoundaryParams

DEGENERATE_TOL = 1e-12


@dataclass(frozen=True)
class F1Root:
    """A root of the f1inf quartic and the quadratic factor it came from.

    ``factor`` is one of 'a-', 'a+', 'b-', 'b+' for f^2 -/+ a f - cd and
    f^2 -/+ (b/sqrt(alpha beta)) f - cd.
    """

    value: complex
    factor: str


def _quadratic_roots(s, cd):
    disc = np.sqrt(complex(s * s + 4 * cd))
    return (s + disc) / 2, (s - disc) / 2


def f1_infinity_roots(bp, p):
    """All eight roots (with multiplicity) of the f1inf quartic product.

    Index 0 is the larger root of f^2 - a f - cd.
    """
    bb = bp.b / p.sqrt_alpha_beta
    out = []
    for label, s in (("a-", bp.a), ("a+", -bp.a), ("b-", bb), ("b+", -bb)):
        for r in _quadratic_roots(s, bp.cd):
            out.append(F1Root(complex(r), label))
    return out


def f1_quartic(f, bp, p):
    """Value of the factored quartic product at f."""
    bb = bp.b / p.sqrt_alpha_beta
    cd = bp.cd
    return (f * f + bp.a * f - cd) * (f * f - bp.a * f - cd) * (f * f - bb * f - cd) * (f * f + bb * f - cd)


def phi(z, f1inf, bp, p):
    """f z + a b f/(alpha (f^2 - cd) z) - cd beta/(alpha f z^3)."""
    f = complex(f1inf)
    if abs(f) < DEGENERATE_TOL or abs(f * f - bp.cd) < DEGENERATE_TOL:
        raise ConstraintViolationError("f1inf is degenerate (f = 0 or f^2 = cd)")
    z = np.asarray(z, dtype=complex)
    al, be = p.alpha, p.beta
    return f * z + bp.a * bp.b * f / (al * (f * f - bp.cd) * z) - bp.cd * be / (al * f * z**3)


def robin_f(z, f1inf, bp, p):
    """f(z) = -phi(z)/phi(1/z), the boundary function entering s12, s21."""
    z = np.asarray(z, dtype=complex)
    return -phi(z, f1inf, bp, p) / phi(1 / z, f1inf, bp, p)


def F_infinity(zetas):
    return float(np.prod(np.abs(np.asarray(zetas, dtype=complex)) ** 4))


def _zeros_poles(zetas):
    zetas = np.asarray(zetas, dtype=complex)
    num = np.concatenate([zetas, np.conj(zetas)])
    den = np.concatenate([1 / np.conj(zetas), 1 / zetas])
    return num, den


def _prod_and_derivative(z, roots):
    """P(z) = prod(z^2 - w^2) and P'(z) by the product rule."""
    z = complex(z)
    factors = z * z - roots**2
    val = complex(np.prod(factors))
    der = 0j
    for i in range(roots.size):
        der += 2 * z * np.prod(np.delete(factors, i))
    return val, der


def s11(z, zetas):
    """Pure-soliton s11(z) for the folded octet structure."""
    num, den = _zeros_poles(zetas)
    z = np.asarray(z, dtype=complex)
    d = np.prod(z[..., None] ** 2 - den**2, axis=-1)
    if np.any(np.abs(d) < DEGENERATE_TOL):
        raise PoleError("s11 evaluated at a pole")
    return np.prod(z[..., None] ** 2 - num**2, axis=-1) / d / F_infinity(zetas)


def s22(z, zetas):
    """Pure-soliton s22(z); equals s11(1/z)."""
    num, den = _zeros_poles(zetas)
    z = np.asarray(z, dtype=complex)
    d = np.prod(z[..., None] ** 2 - num**2, axis=-1)
    if np.any(np.abs(d) < DEGENERATE_TOL):
        raise PoleError("s22 evaluated at a pole")
    scale = float(np.prod(np.abs(np.asarray(zetas, dtype=complex)) ** 8))
    return scale * np.prod(z[..., None] ** 2 - den**2, axis=-1) / d / F_infinity(zetas)


def s11_prime(z, zetas):
    """Derivative of s11 at a single point; exact at the zeros."""
    num, den = _zeros_poles(zetas)
    n, dn = _prod_and_derivative(z, num)
    d, dd = _prod_and_derivative(z, den)
    if abs(d) < DEGENERATE_TOL:
        raise PoleError("s11' evaluated at a pole")
    return (dn * d - n * dd) / d**2 / F_infinity(zetas)


@dataclass(frozen=True)
class DiscreteData:
    """Input zeros and norming constants plus the chosen f1inf.

    Only the DNLS (nu = -1) folded problem is supported, so ``bp`` must
    satisfy c = conj(d) with a, b real.
    """

    zetas: tuple
    Ds: tuple
    f1inf: complex
    bp: BoundaryParams

    def __post_init__(self):
        z = tuple(complex(v) for v in np.atleast_1d(np.asarray(self.zetas, dtype=complex)))
        D = tuple(complex(v) for v in np.atleast_1d(np.asarray(self.Ds, dtype=complex)))
        object.__setattr__(self, "zetas", z)
        object.__setattr__(self, "Ds", D)
        object.__setattr__(self, "f1inf", complex(self.f1inf))
        if len(z) != len(D):
            raise ConstraintViolationError("zetas and Ds must have equal length")
        if any(abs(v) <= 1 for v in z):
            raise ConstraintViolationError("every zeta must satisfy |zeta| > 1")
        sq = np.array(z) ** 2
        others = [sq, np.conj(sq), 1 / sq, 1 / np.conj(sq)]
        for n in range(len(z)):
            for m in range(len(z)):
                for k, arr in enumerate(others):
                    if n == m and k == 0:
                        continue
                    if abs(sq[n] - arr[m]) < 1e-10:
                        raise ConstraintViolationError("zeros are not simple (coincident squares)")
        if abs(self.f1inf**2 - self.bp.cd) < DEGENERATE_TOL or abs(self.f1inf) < DEGENERATE_TOL:
            raise ConstraintViolationError("f1inf is degenerate (f = 0 or f^2 = |d|^2)")

    @property
    def k(self):
        return len(self.zetas)


@dataclass(frozen=True)
class OctetData:
    """Folded discrete data: z, zbar, C, Cbar, each of length 2k."""

    z: np.ndarray
    zbar: np.ndarray
    C: np.ndarray
    Cbar: np.ndarray


def octet_expand(dd, p):
    """Build (z_n, zbar_n, C_n, Cbar_n) from the k input pairs (zeta, D)."""
    if p.reduction != "dnls" or p.nu != -1:
        raise ConstraintViolationError("octets are built for the focusing dnls reduction")
    dd.bp.check_reduction(p)
    k = dd.k
    if k == 0:
        empty = np.zeros(0, dtype=complex)
        return OctetData(empty, empty, empty, empty)
    zeta = np.array(dd.zetas)
    D = np.array(dd.Ds)
    if np.any(D == 0):
        raise ConstraintViolationError("norming constants must be nonzero")
    z = np.concatenate([zeta, np.conj(zeta)])
    zbar = np.concatenate([1 / zeta, 1 / np.conj(zeta)])
    C = np.zeros(2 * k, dtype=complex)
    Cbar = np.zeros(2 * k, dtype=complex)
    for n in range(k):
        ze, Dn = zeta[n], D[n]
        ph_in, ph_out = phi(1 / ze, dd.f1inf, dd.bp, p), phi(ze, dd.f1inf, dd.bp, p)
        if abs(ph_in) < DEGENERATE_TOL or abs(ph_out) < DEGENERATE_TOL:
            raise ConstraintViolationError(f"phi vanishes at zeta_{n + 1}")
        sp = s11_prime(ze, dd.zetas)
        C[n] = Dn
        C[n + k] = -np.conj(ph_in) / (np.conj(Dn) * np.conj(sp) ** 2 * np.conj(ph_out))
        Cbar[n] = -ph_in / (Dn * (ze * sp) ** 2 * ph_out)
        Cbar[n + k] = np.conj(Dn) / np.conj(ze) ** 2
    return OctetData(z, zbar, C, Cbar)


__all__ = [
    "DiscreteData",
    "F1Root",
    "F_infinity",
    "OctetData",
    "f1_infinity_roots",
    "f1_quartic",
    "octet_expand",
    "phi",
    "robin_f",
    "s11",
    "s11_prime",
    "s22",
]
