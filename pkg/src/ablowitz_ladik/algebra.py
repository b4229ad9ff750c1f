"""Small dense complex linear algebra and Laurent-coefficient extraction.

All 2x2 builders broadcast over leading axes so that a whole circle of
spectral-parameter samples can be evaluated in one call: an array ``z`` of
shape ``(M,)`` yields matrices of shape ``(M, 2, 2)``.
"""

from dataclasses import dataclass, field

import numpy as np

from .errors import LaurentExtractionError, SingularMatrixError

DET_FLOOR = 1e-14
LAURENT_RADIUS = 1.3
LAURENT_TOL = 1e-10

SIGMA3 = np.diag([1.0 + 0j, -1.0 + 0j])
IDENTITY2 = np.eye(2, dtype=complex)
# Permutation of C^2 (x) C^2: P (u (x) v) = v (x) u.
SWAP4 = np.eye(4, dtype=complex)[[0, 2, 1, 3]]


def mat2(a, b, c, d):
    """Stack four broadcastable entries into ``[[a, b], [c, d]]`` matrices."""
    a, b, c, d = np.broadcast_arrays(*(np.asarray(x, dtype=complex) for x in (a, b, c, d)))
    out = np.empty(a.shape + (2, 2), dtype=complex)
    out[..., 0, 0] = a
    out[..., 0, 1] = b
    out[..., 1, 0] = c
    out[..., 1, 1] = d
    return out


def kron(A, B):
    """Tensor product of 2x2 matrices, entry ``(2m+p, 2n+q) = A[m,n] B[p,q]``."""
    A = np.asarray(A, dtype=complex)
    B = np.asarray(B, dtype=complex)
    out = np.einsum("...mn,...pq->...mpnq", A, B)
    return out.reshape(out.shape[:-4] + (4, 4))


def det2(M):
    M = np.asarray(M)
    return M[..., 0, 0] * M[..., 1, 1] - M[..., 0, 1] * M[..., 1, 0]


def inv2(M, floor=DET_FLOOR):
    """Closed-form inverse of (a stack of) 2x2 matrices.

    Raises SingularMatrixError if any determinant modulus is below ``floor``.
    """
    M = np.asarray(M, dtype=complex)
    det = det2(M)
    if np.any(np.abs(det) < floor):
        raise SingularMatrixError(f"determinant below floor {floor:g}")
    return mat2(M[..., 1, 1], -M[..., 0, 1], -M[..., 1, 0], M[..., 0, 0]) / det[..., None, None]


def opnorm(M):
    """Spectral norm of a square matrix."""
    return float(np.linalg.norm(np.asarray(M), 2))


def central_diff(f, x, h, stencil=5):
    """Central finite difference of ``f`` at real ``x``.

    ``stencil=3`` is the two-point O(h^2) formula, ``stencil=5`` the
    four-point O(h^4) one. ``f`` may return arrays.
    """
    if stencil == 3:
        return (np.asarray(f(x + h)) - np.asarray(f(x - h))) / (2 * h)
    if stencil == 5:
        return (
            -np.asarray(f(x + 2 * h))
            + 8 * np.asarray(f(x + h))
            - 8 * np.asarray(f(x - h))
            + np.asarray(f(x - 2 * h))
        ) / (12 * h)
    raise ValueError("stencil must be 3 or 5")


@dataclass
class LaurentSeries:
    """Finite Laurent polynomial ``sum_n c_n z^n``."""

    coefficients: dict = field(default_factory=dict)
    radius: float = LAURENT_RADIUS
    residual: float = 0.0

    def __getitem__(self, n):
        return self.coefficients.get(n, 0j)

    def __call__(self, z):
        z = np.asarray(z, dtype=complex)
        total = np.zeros_like(z)
        for n, c in self.coefficients.items():
            total = total + c * z**n
        return total

    def nonzero(self, tol=1e-12):
        scale = max((abs(c) for c in self.coefficients.values()), default=0.0)
        return {n: c for n, c in self.coefficients.items() if abs(c) > tol * max(scale, 1.0)}


def laurent_extract(
    f,
    degree_window,
    radius=LAURENT_RADIUS,
    tol=LAURENT_TOL,
    n_samples=None,
    vectorized=False,
    step=1,
):
    """Recover the Laurent coefficients of ``f`` inside ``degree_window``.

    ``f`` is sampled at equispaced points on ``|z| = radius`` and the
    coefficients are obtained by a plain discrete Fourier sum. The
    reconstruction is then compared with ``f`` on the sample points and on
    the interleaved half-step points; if the relative residual exceeds
    ``tol`` the window was too small (or ``f`` is singular on the circle)
    and LaurentExtractionError is raised.

    ``step=2`` keeps only exponents of the parity of ``degree_window[0]``.
    """
    lo, hi = (int(v) for v in degree_window)
    if hi < lo:
        raise ValueError("empty degree window")
    exponents = np.arange(lo, hi + 1, step)
    width = hi - lo + 1
    m = n_samples if n_samples is not None else max(2 * width + 2, 16)
    if m < width + 2:
        raise ValueError("need at least window width + 2 samples")

    theta = 2 * np.pi * np.arange(m) / m
    pts = radius * np.exp(1j * theta)
    mids = radius * np.exp(1j * (theta + np.pi / m))
    if vectorized:
        vals = np.asarray(f(pts), dtype=complex)
        check = np.asarray(f(mids), dtype=complex)
    else:
        vals = np.array([f(z) for z in pts], dtype=complex)
        check = np.array([f(z) for z in mids], dtype=complex)
    if not (np.all(np.isfinite(vals)) and np.all(np.isfinite(check))):
        raise LaurentExtractionError("non-finite samples on the extraction circle")

    coeffs = {}
    for n in exponents:
        c = np.sum(vals * np.exp(-1j * n * theta)) / m
        coeffs[int(n)] = complex(c / radius**n)
    series = LaurentSeries(coeffs, radius)

    scale = max(1.0, float(np.max(np.abs(vals))))
    residual = max(
        float(np.max(np.abs(series(pts) - vals))),
        float(np.max(np.abs(series(mids) - check))),
    ) / scale
    series.residual = residual
    if residual > tol:
        raise LaurentExtractionError(
            f"reconstruction residual {residual:.3e} exceeds {tol:.1e} on window [{lo}, {hi}]"
        )
    return series
