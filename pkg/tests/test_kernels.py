"""The numba kernels and the numpy fallback must agree."""

import numpy as np
import pytest

from qsmooth import kernels
from qsmooth.algebra import rabi_unitary
from qsmooth.ensemble import ensemble_noise

pytestmark = pytest.mark.skipif(kernels.BACKEND != "numba", reason="numba backend unavailable")


@pytest.mark.parametrize("codes,ks", [([2], [0.05]), ([0, 2], [0.001, 0.1]), ([2, 0], [0.1, 0.0]), ([1], [0.5])])
def test_backends_agree(codes, ks):
    u = rabi_unitary(2 * np.pi, 0.01)
    rho0 = np.array([[0.7, 0.1 - 0.2j], [0.1 + 0.2j, 0.3]])
    uni, gau = ensemble_noise(3, 0, 7, 300, len(codes))
    out = {}
    for b in ("numba", "numpy"):
        # a k = 0 slot is an ignorant model of a meter that did fire
        r, _, ok = kernels.simulate(rho0, u, codes, [k or 0.01 for k in ks], uni, gau, backend=b)
        st, _ = kernels.filter_states(rho0, u, codes, ks, r, backend=b)
        st2, ok2 = kernels.filter_states(rho0, u, codes, ks, r, backend=b)
        eff, ln, pr, pl, ok3 = kernels.effects(u, codes, ks, r, backend=b)
        est = kernels.estimates(st[:, :, 0], eff[:, :, 0], codes[0], ks[0] or 0.01, backend=b)
        ll = kernels.log_likelihoods(r[:, :, 0], *est[:3], ks[0] or 0.01, backend=b)
        assert ok.all() and ok2.all() and ok3.all()
        out[b] = (r, st, st2, eff, ln, pr, pl, *est, *ll)
    for a, c in zip(out["numba"], out["numpy"]):
        np.testing.assert_allclose(a, c, rtol=1e-10, atol=1e-12)


def test_filter_reproduces_simulator_states():
    u = rabi_unitary(2 * np.pi, 0.01)
    uni, gau = ensemble_noise(5, 0, 4, 400, 2)
    for b in ("numba", "numpy"):
        r, st, _ = kernels.simulate(0.5 * np.eye(2), u, [0, 2], [0.004, 0.1], uni, gau, backend=b)
        st2, _ = kernels.filter_states(0.5 * np.eye(2), u, [0, 2], [0.004, 0.1], r, backend=b)
        np.testing.assert_allclose(st, st2, atol=1e-12)


def test_effects_normalized():
    u = rabi_unitary(2 * np.pi, 0.01)
    uni, gau = ensemble_noise(0, 0, 3, 500, 1)
    r, _, _ = kernels.simulate(0.5 * np.eye(2), u, [2], [0.5], uni, gau)
    eff = kernels.effects(u, [2], [0.5], r)[0].reshape(-1, 2, 2)
    top = np.linalg.eigvalsh(eff)[:, -1]
    assert np.all((top >= 0.5) & (top <= 2.0))


def test_unknown_backend():
    with pytest.raises(ValueError):
        kernels.get_backend("fortran")
