"""Tests for the closed-form propagator kernels."""

import math

import numpy as np
import pytest

from bsns.exceptions import InvalidParameterError
from bsns.numerics.kernels import (
    KernelParams,
    kernel_free,
    kernel_full,
    kernel_full_boundary,
    kernel_sa,
    kernel_sa_boundary,
)


def _cosine_kernel(z: np.ndarray, zeta: np.ndarray, t: float) -> np.ndarray:
    """S_0(z, zeta, t) = e^(-i pi/4) (pi t)^(-1/2) cos(z zeta / 2t) e^(i(z^2 + zeta^2)/4t), t > 0."""
    return (
        np.exp(-0.25j * np.pi)
        / np.sqrt(np.pi * t)
        * np.cos(z * zeta / (2.0 * t))
        * np.exp(1j * (z**2 + zeta**2) / (4.0 * t))
    )


class TestKernelParams:
    """Tests for KernelParams."""

    def test_derived_constants(self) -> None:
        """nu, beta and the boundary constant for a = 0."""
        params = KernelParams(0.0)
        assert params.nu == -0.5
        assert params.beta == 0.5
        assert params.boundary_constant == pytest.approx(1.0 / math.sqrt(math.pi))

    @pytest.mark.parametrize("a", [-1.0, -2.0, float("inf")])
    def test_invalid_a_raises(self, a: float) -> None:
        """a must be finite and above -1."""
        with pytest.raises(InvalidParameterError):
            KernelParams(a)


class TestTransverseKernel:
    """Tests for kernel_sa and kernel_sa_boundary."""

    def test_reference_value(self) -> None:
        """|S_0(1, 1, 1)| = cos(1/2)/sqrt(pi)."""
        assert abs(complex(kernel_sa(0.0, 1.0, 1.0, 1.0))) == pytest.approx(math.cos(0.5) / math.sqrt(math.pi))

    def test_a_zero_is_cosine_kernel(self) -> None:
        """For a = 0 the kernel is the even-reflection cosine kernel."""
        rng = np.random.default_rng(11)
        z, zeta = rng.uniform(0.0, 5.0, size=(2, 100))
        for t in (0.1, 1.0, 3.7):
            assert np.max(np.abs(kernel_sa(0.0, z, zeta, t) - _cosine_kernel(z, zeta, t))) < 1e-12

    @pytest.mark.parametrize("a", [-0.5, 0.0, 0.5, 2.0])
    def test_symmetric_in_z_and_zeta(self, a: float) -> None:
        """S_a(z, zeta, t) = S_a(zeta, z, t)."""
        z = np.linspace(0.0, 3.0, 7)
        zeta = np.linspace(0.5, 2.0, 7)
        assert np.allclose(kernel_sa(a, z, zeta, 0.8), kernel_sa(a, zeta, z, 0.8))

    @pytest.mark.parametrize("a", [-0.5, 0.5])
    def test_negative_time_is_conjugate(self, a: float) -> None:
        """S_a(z, zeta, -t) = conj S_a(z, zeta, t)."""
        z = np.linspace(0.0, 3.0, 7)
        assert np.allclose(kernel_sa(a, z, 1.3, -0.6), np.conj(kernel_sa(a, z, 1.3, 0.6)))

    @pytest.mark.parametrize("a", [-0.5, 0.0, 1.0])
    def test_boundary_kernel_is_zeta_zero_limit(self, a: float) -> None:
        """kernel_sa_boundary equals kernel_sa at zeta = 0."""
        z = np.linspace(0.0, 4.0, 9)
        assert np.allclose(kernel_sa_boundary(a, z, 1.5), kernel_sa(a, z, 0.0, 1.5), rtol=1e-13)

    @pytest.mark.parametrize("a", [-0.5, 0.0, 0.5])
    def test_weighted_flux_vanishes_at_boundary(self, a: float) -> None:
        """z^a d/dz S_a(z, zeta, t) decays like z^(a+1) as z -> 0."""
        z = np.array([3e-2, 1e-3, 3e-5])
        h = 1e-2 * z
        for zeta, t in ((1.0, 1.0), (0.7, -0.4)):
            derivative = (kernel_sa(a, z + h, zeta, t) - kernel_sa(a, z - h, zeta, t)) / (2.0 * h)
            flux = np.abs(z**a * derivative)
            assert flux[0] > flux[1] > flux[2]
            assert flux[2] < 0.05 * flux[0]
            assert flux[0] / flux[2] == pytest.approx((z[0] / z[2]) ** (a + 1.0), rel=0.05)

    def test_broadcasting(self) -> None:
        """z and zeta broadcast against each other."""
        out = kernel_sa(0.5, np.linspace(0.0, 1.0, 4)[:, None], np.linspace(0.0, 1.0, 3)[None, :], 1.0)
        assert out.shape == (4, 3)

    def test_time_zero_raises(self) -> None:
        """The kernel is singular at t = 0."""
        with pytest.raises(InvalidParameterError):
            kernel_sa(0.0, 1.0, 1.0, 0.0)

    def test_negative_point_raises(self) -> None:
        """z and zeta must be nonnegative."""
        with pytest.raises(InvalidParameterError):
            kernel_sa(0.0, -1.0, 1.0, 1.0)


class TestFullKernel:
    """Tests for kernel_free, kernel_full and kernel_full_boundary."""

    def test_free_kernel_modulus(self) -> None:
        """|S(x, y, t)| = (4 pi |t|)^(-d/2)."""
        value = kernel_free(3, np.array([1.0, 0.0, 2.0]), np.zeros(3), 0.5)
        assert abs(complex(value)) == pytest.approx((2.0 * math.pi) ** -1.5)

    def test_free_kernel_rejects_wrong_point_dimension(self) -> None:
        """Points must carry d coordinates."""
        with pytest.raises(InvalidParameterError):
            kernel_free(2, np.zeros(3), np.zeros(3), 1.0)

    @pytest.mark.parametrize(("a", "d"), [(-0.5, 1), (0.0, 1), (0.5, 2)])
    def test_boundary_form_matches_product(self, a: float, d: int) -> None:
        """The closed boundary form equals the product kernel at zeta = 0."""
        x = np.array([0.3, -0.4][:d]) if d > 1 else 0.3
        y = np.array([-1.0, 0.2][:d]) if d > 1 else -1.0
        for t in (0.7, -0.7):
            direct = kernel_full(a, d, x, 1.2, y, 0.0, t)
            closed = kernel_full_boundary(a, d, x, 1.2, y, t)
            assert complex(closed) == pytest.approx(complex(direct), rel=1e-12)
