"""Shared fixtures and independent oracles.

The oracles deliberately avoid the sparse-coefficient machinery: fields are
sampled on a uniform grid and differentiated or projected with numpy's FFT,
or evaluated pointwise from their closed-form expressions.
"""

import math

import numpy as np
import pytest

from conjscan.operators import perp_grad
from conjscan.torus import TorusGeometry, trig_from_modes

ACCEPTANCE_LINES: list[str] = []


def record_acceptance(name: str, passed: bool, detail: str) -> None:
    ACCEPTANCE_LINES.append(f"{'PASS' if passed else 'FAIL'}  {name}: {detail}")


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for line in ACCEPTANCE_LINES:
        terminalreporter.write_line(line)


# ---------------------------------------------------------------- generators

def random_stream(geom, rng, radius=3, decay=1.0, mean=False):
    """Real stream function with Gaussian coefficients on ``|k1|, |k2| <= radius``."""
    modes = {}
    for k1 in range(-radius, radius + 1):
        for k2 in range(0, radius + 1):
            if k2 == 0 and k1 <= 0:
                continue
            scale = 1.0 / (1.0 + (k1 * k1 + k2 * k2) ** decay)
            modes[(k1, k2)] = complex(rng.normal(), rng.normal()) * scale
    if mean:
        modes[(0, 0)] = complex(rng.normal())
    return trig_from_modes(geom, modes)


def random_div_free(geom, rng, radius=3):
    return perp_grad(random_stream(geom, rng, radius))


def random_vector(geom, rng, radius=3):
    """Generic band-limited field: both components random, mean included."""
    from conjscan.torus import VectorField
    return VectorField(random_stream(geom, rng, radius, mean=True),
                       random_stream(geom, rng, radius, mean=True))


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture
def g1():
    return TorusGeometry(1.0)


# ------------------------------------------------------------- grid oracle

class GridOracle:
    """Pseudo-spectral evaluation on an ``N x N`` grid of the torus.

    With ``N`` larger than twice the bandwidth of every product involved the
    grid computations are exact up to rounding.
    """

    def __init__(self, alpha, n=64):
        self.alpha = alpha
        self.n = n
        self.x = np.arange(n) * (2 * math.pi / alpha) / n
        self.y = np.arange(n) * 2 * math.pi / n
        self.X, self.Y = np.meshgrid(self.x, self.y, indexing="ij")
        k = np.fft.fftfreq(n, 1.0 / n)
        self.KX, self.KY = np.meshgrid(alpha * k, k, indexing="ij")
        self.K2 = self.KX ** 2 + self.KY ** 2
        self.area = 4 * math.pi ** 2 / alpha

    def sample(self, f):
        return np.asarray(f(self.X, self.Y), dtype=float)

    def sample_vec(self, u):
        return np.stack([self.sample(u.x), self.sample(u.y)])

    def dx(self, a):
        return np.real(np.fft.ifft2(1j * self.KX * np.fft.fft2(a)))

    def dy(self, a):
        return np.real(np.fft.ifft2(1j * self.KY * np.fft.fft2(a)))

    def advect(self, u, v):
        return np.stack([u[0] * self.dx(v[i]) + u[1] * self.dy(v[i]) for i in range(2)])

    def split(self, w):
        """Leray and gradient parts; the mean goes with the divergence-free part."""
        wx, wy = np.fft.fft2(w[0]), np.fft.fft2(w[1])
        k2 = np.where(self.K2 == 0, 1.0, self.K2)
        proj = (self.KX * wx + self.KY * wy) / k2
        proj[self.K2 == 0] = 0.0
        qx, qy = np.real(np.fft.ifft2(self.KX * proj)), np.real(np.fft.ifft2(self.KY * proj))
        q = np.stack([qx, qy])
        return w - q, q

    def inner(self, a, b):
        return float(np.sum(a * b)) * self.area / self.n ** 2

    def mc(self, u0, v):
        u, w = self.sample_vec(u0), self.sample_vec(v)
        b = self.advect(u, w) - self.advect(w, u)
        return self.inner(self.advect(b, u) + self.advect(u, b), w) / self.inner(w, w)

    def mc_curvature(self, u0, v):
        u, w = self.sample_vec(u0), self.sample_vec(v)
        _, quu = self.split(self.advect(u, u))
        _, qvv = self.split(self.advect(w, w))
        puv, quv = self.split(self.advect(u, w))
        v2 = self.inner(w, w)
        return (self.inner(quu, qvv) - self.inner(quv, quv) - self.inner(puv, puv)) / v2


@pytest.fixture
def grid_oracle():
    return GridOracle
