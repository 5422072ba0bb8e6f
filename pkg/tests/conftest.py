import warnings

import numpy as np
import pytest

from ktt import _pykernels

try:
    from ktt import _ckernels
except ImportError:  # extension not built
    _ckernels = None

BACKENDS = [_pykernels] + ([_ckernels] if _ckernels is not None else [])


@pytest.fixture(params=BACKENDS, ids=lambda m: m.NAME)
def backend(request):
    return request.param


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def quiet():
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        yield


def random_kernel(kind, rng, D=None):
    """A random valid, bell-shaped parameter set of the given kind."""
    from ktt.kernels import KernelKind, KernelParams

    u = rng.uniform
    kind = KernelKind(kind)
    t0 = u(-0.5, 0.5)
    D = u(0.1, 5.0) if D is None else D
    if kind is KernelKind.GAUSSIAN:
        shape = {"mu": t0 + u(0.1, 0.5), "sigma2": u(0.01, 0.1) ** 2}
    elif kind is KernelKind.LOGNORMAL:
        shape = {"mu": u(-2.5, -0.5), "sigma2": u(0.1, 0.5) ** 2}
    elif kind is KernelKind.GAMMA:
        a = u(1.5, 20.0)
        shape = {"alpha": a, "beta": a / u(0.1, 0.6)}
    elif kind is KernelKind.BETA:
        shape = {"alpha": u(1.5, 8.0), "beta": u(1.5, 8.0), "scale": u(0.1, 1.0)}
    elif kind is KernelKind.DBL:
        shape = {"mu": u(-1.0, 1.0), "sigma2": u(0.05, 1.0), "te": t0 + u(0.2, 1.0)}
    else:
        shape = {"xi": u(-0.4, 0.4), "mu": u(0.0, 0.3), "sigma": u(0.02, 0.1)}
    return KernelParams(kind, t0, D, shape)
