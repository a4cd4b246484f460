"""Agreement between the compiled kernels and the pure-Python fallback."""

import numpy as np
import pytest

from nvcool import kernels, kernels_py
from nvcool.cumulant import DriveParams, pack_params
from nvcool.params import preset


def _random_state(rng, dim):
    y = rng.uniform(0.0, 0.3, size=dim)
    y[0:7] /= y[0:7].sum()          # population-like block
    y[7] = rng.uniform(0.0, 700.0)  # photon number
    return y


def _parameter_vectors():
    hf = preset("high-frequency")
    lf = preset("low-frequency")
    drive = DriveParams(amplitude=2e6, detuning_mode=3e5, detuning_spin=-2e5)
    return [
        pack_params(hf, xi=0.0),
        pack_params(hf, xi=2195.8),
        pack_params(lf, xi=1e5),
        pack_params(hf, xi=1e4, drive=drive),
    ]


KERNELS = [
    ("undriven_rhs_flat", kernels.N_UNDRIVEN),
    ("driven_rhs_flat", kernels.N_DRIVEN),
    ("rate_rhs_flat", kernels.N_RATE),
]


def test_layout_constants():
    assert kernels.N_PAR == 21
    assert kernels.N_UNDRIVEN == 12
    assert kernels.N_DRIVEN == 30
    assert kernels.N_RATE == 8


def test_backend_is_reported():
    assert kernels.BACKEND in ("cython", "python")


@pytest.mark.skipif(kernels.BACKEND != "cython",
                    reason="compiled backend not available")
@pytest.mark.parametrize("name,dim", KERNELS)
def test_compiled_matches_python(name, dim):
    from nvcool import _kernels

    rng = np.random.default_rng(42)
    for par in _parameter_vectors():
        for _ in range(25):
            y = _random_state(rng, dim)
            out_c = np.empty(dim)
            out_p = np.empty(dim)
            getattr(_kernels, name)(y, out_c, par)
            getattr(kernels_py, name)(y, out_p, par)
            scale = np.maximum(np.abs(out_p), 1.0)
            np.testing.assert_allclose(out_c / scale, out_p / scale,
                                       rtol=0.0, atol=1e-13)


@pytest.mark.parametrize("name,dim", KERNELS)
def test_kernels_return_out(name, dim):
    rng = np.random.default_rng(3)
    par = _parameter_vectors()[1]
    y = _random_state(rng, dim)
    out = np.empty(dim)
    returned = getattr(kernels, name)(y, out, par)
    assert np.asarray(returned).shape == (dim,)
    assert np.allclose(np.asarray(returned), out)


def test_population_flow_is_conservative():
    """The seven population derivatives must cancel exactly: every decay
    feeds another level and the mode exchange moves 1<->3 only."""
    rng = np.random.default_rng(11)
    for name, dim in KERNELS:
        for par in _parameter_vectors():
            y = _random_state(rng, dim)
            out = np.empty(dim)
            getattr(kernels_py, name)(y, out, par)
            assert abs(out[0:7].sum()) < 1e-7 * np.abs(out[0:7]).max()
