import math

import pytest

from bailoutgame.dist import from_density, uniform

TN_SIGMA = 0.35


@pytest.fixture(scope="session")
def u():
    return uniform()


@pytest.fixture(scope="session")
def tnorm():
    """Truncated normal N(0.5, 0.35^2) on [0, 1]: log-concave and regular."""
    return from_density(lambda x: math.exp(-0.5 * ((x - 0.5) / TN_SIGMA) ** 2), 2048)


def ref_truncnorm_mean(a: float, b: float, mu: float = 0.5, sg: float = TN_SIGMA) -> float:
    """Closed-form E[theta | a <= theta <= b] for the truncated normal."""
    phi = lambda z: math.exp(-z * z / 2.0) / math.sqrt(2.0 * math.pi)
    cdf = lambda z: 0.5 * (1.0 + math.erf(z / math.sqrt(2.0)))
    za, zb = (a - mu) / sg, (b - mu) / sg
    mass = cdf(zb) - cdf(za)
    if mass <= 0.0:
        return a
    return mu + sg * (phi(za) - phi(zb)) / mass
