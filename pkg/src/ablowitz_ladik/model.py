"""Parameter and state containers shared across the package."""

from dataclasses import dataclass, field, replace

import numpy as np

from .errors import ConstraintViolationError, SingularFieldError

FIELD_FLOOR = 1e-12
TOPOLOGIES = ("periodic", "open", "half_infinite")
REDUCTIONS = ("none", "dnls", "dmkdv")


@dataclass(frozen=True)
class ModelParams:
    """Bulk coefficients of the generalised AL system plus a reduction flag.

    ``dnls`` fixes alpha = beta = 1/2, gamma = -1 (fields tied by r = nu q*),
    ``dmkdv`` fixes alpha = -beta = i/2, gamma = 0 (q = nu r, r real).
    """

    alpha: complex = 0.5
    beta: complex = 0.5
    gamma: complex = -1.0
    reduction: str = "none"
    nu: int = -1

    def __post_init__(self):
        for name in ("alpha", "beta", "gamma"):
            object.__setattr__(self, name, complex(getattr(self, name)))
        if self.reduction not in REDUCTIONS:
            raise ConstraintViolationError(f"unknown reduction {self.reduction!r}")
        if self.alpha * self.beta == 0:
            raise ConstraintViolationError("alpha*beta must be nonzero")
        if self.nu not in (1, -1):
            raise ConstraintViolationError("nu must be +1 or -1")
        if self.reduction == "dnls" and not (
            np.isclose(self.alpha, 0.5) and np.isclose(self.beta, 0.5) and np.isclose(self.gamma, -1)
        ):
            raise ConstraintViolationError("dnls requires alpha=beta=1/2, gamma=-1")
        if self.reduction == "dmkdv" and not (
            np.isclose(self.alpha, 0.5j) and np.isclose(self.beta, -0.5j) and np.isclose(self.gamma, 0)
        ):
            raise ConstraintViolationError("dmkdv requires alpha=-beta=i/2, gamma=0")

    @classmethod
    def dnls(cls, nu=-1):
        return cls(0.5, 0.5, -1.0, "dnls", nu)

    @classmethod
    def dmkdv(cls, nu=1):
        return cls(0.5j, -0.5j, 0.0, "dmkdv", nu)

    @property
    def s(self):
        """Fixed branch of sqrt(beta/alpha); every other root is derived from it."""
        return complex(np.sqrt(self.beta / self.alpha))

    @property
    def sqrt_alpha_beta(self):
        # alpha*s squares to alpha*beta and stays consistent with s.
        return self.alpha * self.s

    @property
    def J(self):
        return np.diag([self.s, 1 / self.s])


@dataclass(frozen=True)
class BoundaryParams:
    """Coefficients of the left reflection matrix and the square-root branch.

    ``branch`` selects the sign sigma in a + sigma*sqrt(4cd(1-Q0R0) + a^2),
    which appears identically in the inverse change of variables, the ghost
    closure and the time-dependent reflection matrix.
    """

    a: complex = 1.0
    b: complex = 0.0
    c: complex = 0.0
    d: complex = 0.0
    branch: str = "plus"

    def __post_init__(self):
        for name in ("a", "b", "c", "d"):
            object.__setattr__(self, name, complex(getattr(self, name)))
        if self.branch not in ("plus", "minus"):
            raise ConstraintViolationError("branch must be 'plus' or 'minus'")

    @property
    def sign(self):
        return 1 if self.branch == "plus" else -1

    @property
    def is_robin(self):
        return self.c == 0 and self.d == 0

    @property
    def cd(self):
        return self.c * self.d

    def with_branch(self, branch):
        return replace(self, branch=branch)

    @classmethod
    def dnls(cls, a, b, d, branch="plus", nu=-1):
        """Parameters obeying the DNLS constraint c = -nu d*."""
        return cls(a, b, -nu * np.conj(d), d, branch)

    def check_reduction(self, p, tol=1e-12):
        """Raise ConstraintViolationError naming the first violated relation."""
        if p.reduction == "dnls":
            if abs(self.a.imag) > tol or abs(self.b.imag) > tol:
                raise ConstraintViolationError("dnls boundary requires a, b real")
            if abs(self.c + p.nu * np.conj(self.d)) > tol:
                raise ConstraintViolationError("dnls boundary requires c=-nu*conj(d)")
        elif p.reduction == "dmkdv":
            if any(abs(getattr(self, k).imag) > tol for k in "abcd"):
                raise ConstraintViolationError("dmkdv boundary requires a, b, c, d real")
            if abs(self.b) > tol:
                raise ConstraintViolationError("dmkdv boundary requires b=0")
            if abs(self.c + p.nu * self.d) > tol:
                raise ConstraintViolationError("dmkdv boundary requires c=-nu*d")


@dataclass(frozen=True)
class LatticeState:
    """Fields q_j, r_j on sites 0..N.

    Periodic states wrap q_{N+1} = q_0; open and half-infinite states are
    padded with zeros beyond the last site.
    """

    q: np.ndarray
    r: np.ndarray
    topology: str = "open"
    check: bool = field(default=True, compare=False, repr=False)

    def __post_init__(self):
        q = np.array(self.q, dtype=complex).reshape(-1)
        r = np.array(self.r, dtype=complex).reshape(-1)
        if q.shape != r.shape or q.size == 0:
            raise ValueError("q and r must be nonempty and of equal length")
        if self.topology not in TOPOLOGIES:
            raise ValueError(f"unknown topology {self.topology!r}")
        object.__setattr__(self, "q", q)
        object.__setattr__(self, "r", r)
        if self.check:
            bad = np.abs(1 - q * r) < FIELD_FLOOR
            if np.any(bad):
                raise SingularFieldError(f"1 - q r vanishes at sites {np.flatnonzero(bad).tolist()}")

    @property
    def N(self):
        return self.q.size - 1

    def with_fields(self, q=None, r=None, check=False):
        return LatticeState(
            self.q if q is None else q, self.r if r is None else r, self.topology, check=check
        )

    @classmethod
    def zeros(cls, n_sites, topology="open"):
        return cls(np.zeros(n_sites), np.zeros(n_sites), topology)

    @classmethod
    def from_q(cls, q, p, topology="open"):
        """Build a reduced state: dnls r = nu q*, dmkdv r = nu q."""
        q = np.asarray(q, dtype=complex)
        if p.reduction == "dnls":
            r = p.nu * np.conj(q)
        elif p.reduction == "dmkdv":
            r = p.nu * q
        else:
            raise ConstraintViolationError("from_q needs a reduced ModelParams")
        return cls(q, r, topology)

    def reduction_defect(self, p):
        """Max violation of the reduction constraint (0 for no reduction)."""
        if p.reduction == "dnls":
            return float(np.max(np.abs(self.r - p.nu * np.conj(self.q))))
        if p.reduction == "dmkdv":
            return float(max(np.max(np.abs(self.q - p.nu * self.r)), np.max(np.abs(self.r.imag))))
        return 0.0

    def padded(self):
        """Return (q, r) of length N+3 covering sites -1..N+1 by topology."""
        if self.topology == "periodic":
            q = np.concatenate([self.q[-1:], self.q, self.q[:1]])
            r = np.concatenate([self.r[-1:], self.r, self.r[:1]])
        else:
            q = np.concatenate([[0], self.q, [0]])
            r = np.concatenate([[0], self.r, [0]])
        return q, r


def random_state(rng, n_sites, topology="open", scale=0.3, p=None):
    """Random admissible state; reduced if ``p`` carries a reduction."""
    q = scale * (rng.standard_normal(n_sites) + 1j * rng.standard_normal(n_sites))
    if p is not None and p.reduction == "dmkdv":
        q = q.real.astype(complex)
    if p is not None and p.reduction != "none":
        return LatticeState.from_q(q, p, topology)
    r = scale * (rng.standard_normal(n_sites) + 1j * rng.standard_normal(n_sites))
    return LatticeState(q, r, topology)
