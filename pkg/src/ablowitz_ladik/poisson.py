"""Finite-difference Poisson brackets on the AL phase space.

The brackets are {q_j, r_k} = i delta_jk (1 - q_k r_k), all others zero.
Observables are holomorphic in every q_j, r_j, so a real central difference
in each coordinate gives the complex partial derivative.
"""

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import ALError, SingularFieldError
from .model import FIELD_FLOOR

DEFAULT_H = 1e-6


@dataclass
class Observable:
    eval: Callable
    label: str = ""

    def __call__(self, s):
        return self.eval(s)


def coordinate(kind, j):
    """Observable returning q_j (kind='q') or r_j (kind='r')."""
    if kind == "q":
        return Observable(lambda s: s.q[j], f"q{j}")
    if kind == "r":
        return Observable(lambda s: s.r[j], f"r{j}")
    raise ValueError(kind)


def _diff(M, s, j, which, h, stencil):
    base = s.q if which == "q" else s.r

    def at(step):
        arr = base.copy()
        arr[j] += step
        return np.asarray(M(s.with_fields(**{which: arr})), dtype=complex)

    if stencil == 3:
        return (at(h) - at(-h)) / (2 * h)
    if stencil == 5:
        return (-at(2 * h) + 8 * at(h) - 8 * at(-h) + at(-2 * h)) / (12 * h)
    raise ValueError("stencil must be 3 or 5")


def gradient(F, s, h=DEFAULT_H, stencil=3):
    """(dF/dq_j, dF/dr_j) for every site by central differences.

    ``stencil=5`` uses the fourth-order formula, which tolerates a larger
    step and so less cancellation for observables of large modulus.
    """
    n = s.N + 1
    dq = np.array([_diff(F, s, j, "q", h, stencil) for j in range(n)], dtype=complex)
    dr = np.array([_diff(F, s, j, "r", h, stencil) for j in range(n)], dtype=complex)
    if not (np.all(np.isfinite(dq)) and np.all(np.isfinite(dr))):
        raise ALError("non-finite observable evaluation")
    return dq, dr


def _weights(s):
    one_m = 1 - s.q * s.r
    if np.any(np.abs(one_m) < FIELD_FLOOR):
        raise SingularFieldError("1 - q r below floor")
    return 1j * one_m


def bracket(F, G, s, h=DEFAULT_H, stencil=3):
    """{F, G} = sum_j i(1 - q_j r_j)(dF/dq_j dG/dr_j - dF/dr_j dG/dq_j)."""
    w = _weights(s)
    fq, fr = gradient(F, s, h, stencil)
    gq, gr = gradient(G, s, h, stencil)
    return complex(np.sum(w * (fq * gr - fr * gq)))


def hamiltonian_flow_rhs(H, s, h=DEFAULT_H, stencil=3):
    """({H, q_j}, {H, r_j}) for all sites."""
    w = _weights(s)
    hq, hr = gradient(H, s, h, stencil)
    return -w * hr, w * hq


def bracket_matrix(F_entries, G_entries, s, h=DEFAULT_H, stencil=3):
    """Brackets of two 2x2 matrix-valued observables in tensor notation.

    ``F_entries(s)`` and ``G_entries(s)`` return 2x2 arrays; the result is
    the 4x4 matrix sum_{mnpq} {F^{mn}, G^{pq}} E_mn (x) E_pq.
    """
    w = _weights(s)
    n = s.N + 1

    def grads(M):
        dq = np.array([_diff(M, s, j, "q", h, stencil) for j in range(n)])
        dr = np.array([_diff(M, s, j, "r", h, stencil) for j in range(n)])
        return dq, dr

    fq, fr = grads(F_entries)
    gq, gr = grads(G_entries)
    T = np.einsum("j,jmn,jpq->mpnq", w, fq, gr) - np.einsum("j,jmn,jpq->mpnq", w, fr, gq)
    return T.reshape(4, 4)
