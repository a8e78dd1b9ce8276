"""Hot loops behind a backend switch.

``QSMOOTH_BACKEND=numba`` (default) runs compiled per-trajectory loops;
``QSMOOTH_BACKEND=numpy`` runs the vectorized fallback, which needs no
compiler. If numba cannot be imported the numpy path is used.

All arrays carry a leading trajectory axis ``b``, a step axis ``j`` and a
measurement-slot axis ``i`` (several meters may fire, in order, after the
unitary of each step). Matrices are flattened row-major to 4 entries.
"""

from __future__ import annotations

import os
import warnings

import numpy as np

from . import _numpy_backend

_requested = os.environ.get("QSMOOTH_BACKEND", "numba").strip().lower()
if _requested not in ("numba", "numpy"):
    raise ImportError(f"QSMOOTH_BACKEND must be 'numba' or 'numpy', got {_requested!r}")

_numba_backend = None
if _requested == "numba":
    try:
        from . import _numba_backend
    except ImportError:  # pragma: no cover
        warnings.warn("numba unavailable, using the numpy kernels")

BACKEND = "numba" if _numba_backend is not None else "numpy"


def get_backend(name: str | None = None):
    name = BACKEND if name is None else name
    if name == "numba":
        if _numba_backend is None:
            raise RuntimeError("numba backend not available")
        return _numba_backend
    if name == "numpy":
        return _numpy_backend
    raise ValueError(f"unknown backend {name!r}")


def _flat(m) -> np.ndarray:
    return np.ascontiguousarray(np.asarray(m, dtype=np.complex128).reshape(4))


def _slots(codes, ks):
    return (
        np.ascontiguousarray(np.atleast_1d(codes), dtype=np.int64),
        np.ascontiguousarray(np.atleast_1d(ks), dtype=np.float64),
    )


def simulate(rho0, u, codes, ks, uni, gau, backend=None):
    """Sample readouts and record the state just before every measurement.

    ``uni`` and ``gau`` are ``(b, j, i)`` uniform and standard-normal draws:
    the eigenvalue is +1 when ``uni < (1 + <O>)/2``, and the readout adds
    ``gau * sqrt(tau/dt)``. Returns ``(readouts, states, ok)``.
    """
    codes, ks = _slots(codes, ks)
    uni = np.ascontiguousarray(uni, dtype=np.float64)
    gau = np.ascontiguousarray(gau, dtype=np.float64)
    return get_backend(backend).simulate(_flat(rho0), _flat(u), codes, ks, uni, gau)


def filter_states(rho0, u, codes, ks, readouts, backend=None):
    """States just before each measurement, given the readouts. ``(states, ok)``."""
    codes, ks = _slots(codes, ks)
    readouts = np.ascontiguousarray(readouts, dtype=np.float64)
    return get_backend(backend).filter_states(_flat(rho0), _flat(u), codes, ks, readouts)


def effects(u, codes, ks, readouts, backend=None):
    """Future effects after each measurement, normalized to unit top eigenvalue.

    Returns ``(effects, lognorm, prior, prior_log, ok)``: the unnormalized
    effect is ``exp(lognorm) * effects``; ``prior`` is the effect of the
    whole record acting on the initial state, so the joint likelihood is
    ``exp(prior_log) * tr(prior rho0)``.
    """
    codes, ks = _slots(codes, ks)
    readouts = np.ascontiguousarray(readouts, dtype=np.float64)
    return get_backend(backend).effects(_flat(u), codes, ks, readouts)


def estimates(states, effs, code, k, backend=None):
    """Per-point ``(z, z_w, z_c, z_S, anomalous)`` for one observable.

    ``k`` is ``dt/tau`` of the meter whose readout is being explained.
    """
    states = np.ascontiguousarray(states, dtype=np.complex128)
    effs = np.ascontiguousarray(effs, dtype=np.complex128)
    return get_backend(backend).estimates(states, effs, int(code), float(k))


def log_likelihoods(r, z, zw, zc, k, backend=None):
    """Per-point log densities ``(ln P_causal, ln P_smoothed, nonpositive)``."""
    arrs = [np.ascontiguousarray(a, dtype=np.float64) for a in (r, z, zw, zc)]
    return get_backend(backend).log_likelihoods(*arrs, float(k))
