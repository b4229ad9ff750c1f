"""Equations of motion, picture changes and time integration.

Two descriptions of the open chain are supported. The intrinsic one keeps
the original fields and modifies the equations at sites 0 and 1. The
extrinsic one changes variables at site 0 so that the bulk equations hold
at every site, at the price of a ghost value at site -1 fixed by a closure.
"""

from dataclasses import dataclass, field

import numpy as np

from .boundary import _boundary_denominator, hamiltonian_open, open_charges
from .errors import (
    BlowUpError,
    BoundarySingularityError,
    BranchMismatchError,
    ConstraintViolationError,
    SingularFieldError,
)
from .lax import hamiltonian_periodic, rhs_periodic
from .model import FIELD_FLOOR, LatticeState

BLOWUP_CAP = 1e6
ROUND_TRIP_TOL = 1e-10


def _bulk(q, r, qm, rm, qp, rp, p):
    al, be, ga = p.alpha, p.beta, p.gamma
    qdot = 2j * (al * qp + ga * q + be * qm - q * r * (al * qp + be * qm))
    rdot = -2j * (be * rp + ga * r + al * rm - q * r * (al * rm + be * rp))
    return qdot, rdot


def _shift(x, left, right):
    """(x_{j-1}, x_{j+1}) with given values beyond the ends."""
    return np.concatenate([[left], x[:-1]]), np.concatenate([x[1:], [right]])


def rhs_open_intrinsic(s, bp, p):
    """Closed-form equations of the open chain on sites 0..N (N >= 1)."""
    if s.N < 1:
        raise ValueError("open chain needs at least two sites")
    q, r = s.q, s.r
    qm, qp = _shift(q, 0, 0)
    rm, rp = _shift(r, 0, 0)
    qdot, rdot = _bulk(q, r, qm, rm, qp, rp, p)

    a, b, c, d = bp.a, bp.b, bp.c, bp.d
    al, be, ga = p.alpha, p.beta, p.gamma
    D = _boundary_denominator(q[0], r[0], bp)
    X = b + al * d * q[1] - be * c * r[1]
    P0 = 1 - q[0] * r[0]
    P1 = 1 - q[1] * r[1]
    qdot[0] += 2j * P0 / D * ((c - a * q[0] - d * q[0] ** 2) * X / D - ga * c)
    rdot[0] += 2j * P0 / D * ((d + a * r[0] - c * r[0] ** 2) * X / D - ga * d)
    qdot[1] += -2j * be * c * P0 * P1 / D
    rdot[1] += -2j * al * d * P0 * P1 / D
    return qdot, rdot


@dataclass(frozen=True)
class ExtrinsicState:
    """Fields Q_j, R_j on sites 0..N together with the boundary data.

    The ghost values at site -1 are not stored; ``ghost_closure`` derives
    them from Q_0, R_0, Q_1, R_1 each time they are needed.
    """

    Q: np.ndarray
    R: np.ndarray
    bp: object

    def __post_init__(self):
        Q = np.array(self.Q, dtype=complex).reshape(-1)
        R = np.array(self.R, dtype=complex).reshape(-1)
        if Q.shape != R.shape or Q.size < 2:
            raise ValueError("Q and R need equal length >= 2")
        object.__setattr__(self, "Q", Q)
        object.__setattr__(self, "R", R)

    @property
    def N(self):
        return self.Q.size - 1

    def with_fields(self, Q, R):
        return ExtrinsicState(Q, R, self.bp)


def to_extrinsic(s, bp):
    """Change of variables at site 0; identity elsewhere and when c = d = 0."""
    Q, R = s.q.copy(), s.r.copy()
    if not bp.is_robin:
        D = _boundary_denominator(s.q[0], s.r[0], bp)
        m = s.q[0] * s.r[0] - 1
        Q[0] = s.q[0] + bp.c * m / D
        R[0] = s.r[0] - bp.d * m / D
    return ExtrinsicState(Q, R, bp)


def _root_S(Q0, R0, bp):
    return np.sqrt(4 * bp.cd * (1 - Q0 * R0) + bp.a**2)


def _conj_root(Q0, R0, bp):
    """a - sigma*S, the non-vanishing companion of a + sigma*S.

    (a + sigma S)(a - sigma S) = -4cd(1 - Q0 R0), so every appearance of
    (a + sigma S)/(2cd) can be written as -2(1 - Q0 R0)/(a - sigma S), which
    stays finite as cd -> 0. When cd = 0 only the branch with a - sigma S =
    2a is regular and it is used regardless of the selector.
    """
    if bp.cd == 0:
        if bp.a == 0:
            raise BoundarySingularityError("a = 0 with cd = 0")
        return 2 * bp.a
    v = bp.a - bp.sign * _root_S(Q0, R0, bp)
    if abs(v) < FIELD_FLOOR:
        raise BranchMismatchError(f"branch {bp.branch!r} is singular at this Q0, R0")
    return v


def from_extrinsic(e, topology="open"):
    """Invert the site-0 change of variables on the branch carried by ``e.bp``.

    Raises BranchMismatchError when the result does not map back to ``e``.
    """
    bp = e.bp
    q, r = e.Q.copy(), e.R.copy()
    if not bp.is_robin:
        P = 1 - e.Q[0] * e.R[0]
        v = _conj_root(e.Q[0], e.R[0], bp)
        q[0] = e.Q[0] + 2 * bp.c * P / v
        r[0] = e.R[0] - 2 * bp.d * P / v
    s = LatticeState(q, r, topology, check=False)
    try:
        back = to_extrinsic(s, bp)
    except BoundarySingularityError as exc:
        raise BranchMismatchError(f"branch {bp.branch!r}: {exc}") from exc
    err = max(abs(back.Q[0] - e.Q[0]), abs(back.R[0] - e.R[0]))
    if err > ROUND_TRIP_TOL * max(1.0, abs(e.Q[0]), abs(e.R[0])):
        raise BranchMismatchError(f"branch {bp.branch!r} does not invert the change of variables")
    return LatticeState(q, r, topology)


def branch_of(s, bp):
    """Branch name whose inverse map reproduces the intrinsic fields of ``s``."""
    e = to_extrinsic(s, bp)
    for branch in ("plus", "minus"):
        try:
            back = from_extrinsic(ExtrinsicState(e.Q, e.R, bp.with_branch(branch)))
        except BranchMismatchError:
            continue
        err = max(abs(back.q[0] - s.q[0]), abs(back.r[0] - s.r[0]))
        if err <= ROUND_TRIP_TOL * max(1.0, abs(s.q[0]), abs(s.r[0])):
            return branch
    raise BranchMismatchError("neither branch inverts the change of variables")


def ghost_closure(e, p):
    """(Q_{-1}, R_{-1}) from the boundary closure on the selected branch.

    With c = d = 0 this is the Robin relation beta Q_{-1} + (b/a) Q_0 = 0,
    alpha R_{-1} + (b/a) R_0 = 0.
    """
    bp = e.bp
    Q0, R0, Q1, R1 = e.Q[0], e.R[0], e.Q[1], e.R[1]
    if abs(1 - Q0 * R0) < FIELD_FLOOR:
        raise SingularFieldError("1 - Q0 R0 below floor")
    al, be = p.alpha, p.beta
    v = _conj_root(Q0, R0, bp)
    Qg = (al / be) * Q1 - 2 * (bp.a * al * Q1 + bp.b * Q0) / (be * v)
    Rg = (be / al) * R1 - 2 * (bp.a * be * R1 + bp.b * R0) / (al * v)
    return Qg, Rg


def ghost_closure_time_dependent(e, p, Q0dot, R0dot):
    """Ghost values from the closure rewritten through the site-0 velocities.

    Requires cd != 0. Agrees with ``ghost_closure`` whenever the velocities
    come from the bulk equations.
    """
    bp = e.bp
    if bp.cd == 0:
        raise BoundarySingularityError("time-dependent closure needs cd != 0")
    Q0, R0 = e.Q[0], e.R[0]
    sS = bp.sign * _root_S(Q0, R0, bp)
    v = _conj_root(Q0, R0, bp)
    common = 2 * p.gamma * bp.cd + bp.a * bp.b - bp.b * sS
    Qg = (1j * bp.cd * Q0dot + common * Q0) / (p.beta * sS * v)
    Rg = (-1j * bp.cd * R0dot + common * R0) / (p.alpha * sS * v)
    return Qg, Rg


def rhs_open_extrinsic(e, p):
    """Bulk equations at every site j >= 0 with ghost values from the closure."""
    Qg, Rg = ghost_closure(e, p)
    Qm, Qp = _shift(e.Q, Qg, 0)
    Rm, Rp = _shift(e.R, Rg, 0)
    return _bulk(e.Q, e.R, Qm, Rm, Qp, Rp, p)


def rhs_reduced(x, p, bp=None):
    """Single-field RHS dQ/dt under the dnls or dmkdv reduction.

    ``x`` is a LatticeState (periodic, or open with ``bp``) or an
    ExtrinsicState. Reduction constraints on the fields and on the boundary
    parameters are checked first.
    """
    if p.reduction == "none":
        raise ConstraintViolationError("rhs_reduced needs a reduced model")
    if isinstance(x, ExtrinsicState):
        bp = x.bp
        defect = LatticeState(x.Q, x.R, "open", check=False).reduction_defect(p)
    else:
        defect = x.reduction_defect(p)
    if bp is not None:
        bp.check_reduction(p)
    if defect > 1e-12:
        raise ConstraintViolationError(f"fields violate the {p.reduction} reduction by {defect:.2e}")
    if isinstance(x, ExtrinsicState):
        return rhs_open_extrinsic(x, p)[0]
    if x.topology == "periodic":
        return rhs_periodic(x, p)[0]
    return rhs_open_intrinsic(x, bp, p)[0]


@dataclass
class Trajectory:
    """Sampled solution: times, fields (one row per sample) and monitors."""

    times: np.ndarray
    q: np.ndarray
    r: np.ndarray
    monitors: dict = field(default_factory=dict)
    completed: bool = True

    def state(self, k, topology="open"):
        return LatticeState(self.q[k], self.r[k], topology, check=False)


def _rk4_step(f, y, dt):
    k1 = f(y)
    k2 = f(y + 0.5 * dt * k1)
    k3 = f(y + 0.5 * dt * k2)
    k4 = f(y + dt * k3)
    return y + dt / 6 * (k1 + 2 * k2 + 2 * k3 + k4)


def make_rhs(kind, p, bp=None, topology="open"):
    """Build (rhs on packed vector, unpack) for 'periodic', 'intrinsic' or 'extrinsic'."""

    def split(y):
        n = y.size // 2
        return y[:n], y[n:]

    if kind == "periodic":
        def f(y):
            q, r = split(y)
            return np.concatenate(rhs_periodic(LatticeState(q, r, "periodic", check=False), p))
    elif kind == "intrinsic":
        def f(y):
            q, r = split(y)
            return np.concatenate(rhs_open_intrinsic(LatticeState(q, r, topology, check=False), bp, p))
    elif kind == "extrinsic":
        def f(y):
            Q, R = split(y)
            return np.concatenate(rhs_open_extrinsic(ExtrinsicState(Q, R, bp), p))
    else:
        raise ValueError(f"unknown rhs kind {kind!r}")
    return f


def default_monitors(kind, p, bp=None):
    """Conserved quantities to log: H for periodic, (H, I0, I1) for the open chain."""
    if kind == "periodic":
        return {"H": lambda s: hamiltonian_periodic(s, p)}
    if kind == "intrinsic":
        return {
            "H": lambda s: hamiltonian_open(s, bp, p),
            "I0": lambda s: open_charges(s, bp, p)[0],
            "I1": lambda s: open_charges(s, bp, p)[1],
        }
    return {}


def integrate(q0, r0, rhs, t_end, dt, t_start=0.0, stride=1, monitors=None,
              topology="open", cap=BLOWUP_CAP):
    """Classical RK4 with a fixed step; samples every ``stride`` steps.

    ``rhs`` maps the packed vector (q, r) to its derivative. ``monitors``
    maps names to functions of a LatticeState and is evaluated at samples.
    Raises BlowUpError (carrying the partial trajectory) when a field
    exceeds ``cap`` or becomes non-finite.
    """
    if dt <= 0:
        raise ValueError("dt must be positive")
    if t_end < t_start:
        raise ValueError("t_end must not precede t_start")
    n_steps = int(round((t_end - t_start) / dt))
    if not np.isclose(n_steps * dt, t_end - t_start, rtol=1e-9, atol=1e-12):
        raise ValueError("t_end - t_start must be a multiple of dt")
    monitors = monitors or {}
    y = np.concatenate([np.asarray(q0, dtype=complex), np.asarray(r0, dtype=complex)])
    n = y.size // 2
    times, ys = [], []
    logs = {k: [] for k in monitors}

    def record(t, y):
        times.append(t)
        ys.append(y.copy())
        st = LatticeState(y[:n], y[n:], topology, check=False)
        for k, m in monitors.items():
            logs[k].append(complex(m(st)))

    def build(completed):
        arr = np.array(ys)
        return Trajectory(np.array(times), arr[:, :n], arr[:, n:],
                          {k: np.array(v) for k, v in logs.items()}, completed)

    record(t_start, y)
    for k in range(1, n_steps + 1):
        try:
            y_new = _rk4_step(rhs, y, dt)
        except (SingularFieldError, BoundarySingularityError) as exc:
            raise BlowUpError(f"singularity after t={t_start + (k - 1) * dt:g}: {exc}",
                              last_time=times[-1], trajectory=build(False)) from exc
        if not np.all(np.isfinite(y_new)) or np.max(np.abs(y_new)) > cap:
            raise BlowUpError(f"field modulus exceeded {cap:g} after t={t_start + (k - 1) * dt:g}",
                              last_time=times[-1], trajectory=build(False))
        y = y_new
        if k % stride == 0 or k == n_steps:
            record(t_start + k * dt, y)
    return build(True)


def convergence_order(q0, r0, rhs, t_end, dt):
    """Observed order from runs with dt, dt/2, dt/4 (step halving)."""
    ends = []
    for h in (dt, dt / 2, dt / 4):
        tr = integrate(q0, r0, rhs, t_end, h, stride=10**9)
        ends.append(np.concatenate([tr.q[-1], tr.r[-1]]))
    e1 = np.max(np.abs(ends[0] - ends[1]))
    e2 = np.max(np.abs(ends[1] - ends[2]))
    return float(np.log2(e1 / e2))


def flow_derivative(fn, y, rhs, h=1e-4, substeps=8):
    """d/dt fn(y(t)) at t = 0 along dy/dt = rhs(y).

    Five-point central difference; the states at +-h, +-2h come from RK4
    with ``substeps`` steps per h, so the integration error is negligible.
    """
    def advance(sign):
        out, cur = [], np.asarray(y, dtype=complex)
        for _ in range(2):
            for _ in range(substeps):
                cur = _rk4_step(rhs, cur, sign * h / substeps)
            out.append(cur)
        return out

    (p1, p2), (m1, m2) = advance(1), advance(-1)
    return (-fn(p2) + 8 * fn(p1) - 8 * fn(m1) + fn(m2)) / (12 * h)


__all__ = [
    "ExtrinsicState",
    "Trajectory",
    "branch_of",
    "convergence_order",
    "default_monitors",
    "flow_derivative",
    "from_extrinsic",
    "ghost_closure",
    "ghost_closure_time_dependent",
    "integrate",
    "make_rhs",
    "rhs_open_extrinsic",
    "rhs_open_intrinsic",
    "rhs_periodic",
    "rhs_reduced",
    "to_extrinsic",
]
