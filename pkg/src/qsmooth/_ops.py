"""Leaf 2x2 operations on 4-tuples ``(m00, m01, m10, m11)``.

Entries may be complex scalars (compiled by numba, one trajectory at a
time) or equally-shaped numpy arrays (the vectorized fallback, one batch
of trajectories at a time). Helpers must not call each other: numba
compiles each one separately from this plain-Python source.
"""

import numpy as np

PAULI_X = 0
PAULI_Y = 1
PAULI_Z = 2

TINY = 1e-300
# below this a density bracket is re-evaluated in factored form
SAFE = 1e-250
LOG_2PI = np.log(2.0 * np.pi)


def sandwich(a, r):
    """``A R A^dagger``."""
    a00, a01, a10, a11 = a
    r00, r01, r10, r11 = r
    t00 = a00 * r00 + a01 * r10
    t01 = a00 * r01 + a01 * r11
    t10 = a10 * r00 + a11 * r10
    t11 = a10 * r01 + a11 * r11
    c00 = a00.conjugate()
    c01 = a01.conjugate()
    c10 = a10.conjugate()
    c11 = a11.conjugate()
    return (
        t00 * c00 + t01 * c01,
        t00 * c10 + t01 * c11,
        t10 * c00 + t11 * c01,
        t10 * c10 + t11 * c11,
    )


def sandwich_adj(a, e):
    """``A^dagger E A``."""
    a00, a01, a10, a11 = a
    e00, e01, e10, e11 = e
    t00 = e00 * a00 + e01 * a10
    t01 = e00 * a01 + e01 * a11
    t10 = e10 * a00 + e11 * a10
    t11 = e10 * a01 + e11 * a11
    c00 = a00.conjugate()
    c01 = a01.conjugate()
    c10 = a10.conjugate()
    c11 = a11.conjugate()
    return (
        c00 * t00 + c10 * t10,
        c00 * t01 + c10 * t11,
        c01 * t00 + c11 * t10,
        c01 * t01 + c11 * t11,
    )


def scaled_kraus(code, r, k):
    """Kraus operator divided by its largest eigenvalue.

    With ``s = r k / 2`` the Gaussian Kraus operator equals
    ``c(r) exp(s O)``; this returns ``exp(s O - |s|)`` whose eigenvalues are
    ``exp(+-s - |s|) <= 1``. ``k = dt / tau``; ``k == 0`` is a meter that
    extracts nothing, giving the identity.
    """
    s = 0.5 * r * k
    p = np.exp(s - abs(s)) + 0j
    m = np.exp(-s - abs(s)) + 0j
    al = 0.5 * (p + m)
    be = 0.5 * (p - m)
    if code == 0:
        return (al, be, be, al)
    if code == 1:
        return (al, -1j * be, 1j * be, al)
    return (p, 0.0 * p, 0.0 * p, m)


def log_kraus_scale(r, k):
    """``log c(r)`` such that the true Kraus operator is ``c * scaled_kraus``."""
    if k == 0:
        return 0.0 * r
    return 0.25 * (np.log(k) - LOG_2PI) - 0.25 * (r * r + 1.0) * k + 0.5 * abs(r) * k


def expect(code, r):
    """``Re tr(R O)`` for the Pauli with the given code."""
    r00, r01, r10, r11 = r
    if code == 0:
        return (r01 + r10).real
    if code == 1:
        return (1j * (r01 - r10)).real
    return (r00 - r11).real


def pauli_sandwich(code, r):
    """``O R O``."""
    r00, r01, r10, r11 = r
    if code == 0:
        return (r11, r10, r01, r00)
    if code == 1:
        return (r11, -r10, -r01, r00)
    return (r00, -r01, -r10, r11)


def pauli_left(code, r):
    """``O R``."""
    r00, r01, r10, r11 = r
    if code == 0:
        return (r10, r11, r00, r01)
    if code == 1:
        return (-1j * r10, -1j * r11, 1j * r00, 1j * r01)
    return (r00, r01, -r10, -r11)


def trace_product(a, b):
    """``tr(A B)``."""
    return a[0] * b[0] + a[1] * b[2] + a[2] * b[1] + a[3] * b[3]


def hermitize(r):
    off = 0.5 * (r[1] + r[2].conjugate())
    return (r[0].real + 0j, off, off.conjugate(), r[3].real + 0j)


def scale(r, c):
    return (r[0] * c, r[1] * c, r[2] * c, r[3] * c)


def real_trace(r):
    return (r[0] + r[3]).real


def max_eig(r):
    """Largest eigenvalue of a Hermitian matrix."""
    p = r[0].real
    q = r[3].real
    h = 0.5 * (p - q)
    return 0.5 * (p + q) + np.sqrt(h * h + abs(r[1]) ** 2)


def frobenius(r):
    return np.sqrt(abs(r[0]) ** 2 + abs(r[1]) ** 2 + abs(r[2]) ** 2 + abs(r[3]) ** 2)


def log_predictive(r, z, k):
    """Log readout density given expectation ``z``; overflow-free."""
    t = r * k
    a = abs(t)
    sg = np.sign(t)
    e = np.exp(-2.0 * a)
    lc = 0.5 * (np.log(k) - LOG_2PI) - 0.5 * (r * r + 1.0) * k
    hi = 1.0 + sg * z
    lo = 1.0 - sg * z
    inner = hi + lo * e
    # deep tail with hi ~ 0: factor out exp(-2a) instead of clipping
    f = np.minimum(2.0 * a, 600.0)
    tail = -2.0 * a + np.log(np.maximum(lo + hi * np.exp(f), TINY))
    w = 1.0 * (inner > SAFE)
    return lc + a - np.log(2.0) + w * np.log(np.maximum(inner, TINY)) + (1.0 - w) * tail


def log_smoothed(r, zw, zc, k):
    """Log of the past-and-future conditioned readout density.

    Equivalent to the three-Gaussian mixture over ``G_{+1}``, ``G_{-1}``
    and ``G_0`` weighted by the weak value ``zw`` and second-order term
    ``zc``, rewritten with hyperbolic functions of ``r k`` for stability.
    Also returns a bracket whose sign is that of the density, so callers
    can flag non-positive points.
    """
    t = r * k
    a = abs(t)
    sg = np.sign(t)
    e = np.exp(-2.0 * a)
    eps = np.exp(-0.5 * k)
    den = 0.5 * (1.0 + eps) + 0.5 * (1.0 - eps) * zc
    lc = 0.5 * (np.log(k) - LOG_2PI) - 0.5 * (r * r + 1.0) * k
    hi = 0.5 * (1.0 + zc) + sg * zw
    lo = 0.5 * (1.0 + zc) - sg * zw
    mid = 1.0 - zc
    inner = hi + mid * np.exp(-a) + lo * e
    f = np.minimum(2.0 * a, 600.0)
    scaled = lo + mid * np.exp(0.5 * f) + hi * np.exp(f)
    tail = -2.0 * a + np.log(np.maximum(scaled, TINY))
    w = 1.0 * (inner > SAFE)
    out = lc - np.log(den) + a - np.log(2.0) + w * np.log(np.maximum(inner, TINY)) + (1.0 - w) * tail
    return out, np.maximum(inner, scaled)
