import mpmath
import numpy as np
import pytest
import sympy

from swarray import modes
from swarray.errors import DomainError


class TestIndexAlgebra:
    def test_packing_examples(self):
        assert modes.mode_index_from_triple(1, -1, 1) == 1
        assert modes.mode_index_from_triple(2, 0, 1) == 4
        assert modes.mode_count(25) == 1350

    def test_unpacking_examples(self):
        assert modes.triple_from_mode_index(1) == (1, -1, 1)
        assert modes.triple_from_mode_index(4) == (2, 0, 1)

    def test_round_trip_exhaustive(self):
        for j in range(1, modes.mode_count(40) + 1):
            s, m, n = modes.triple_from_mode_index(j)
            assert abs(m) <= n and s in (1, 2) and n >= 1
            assert modes.mode_index_from_triple(s, m, n) == j

    def test_mode_count_matches_triple_enumeration(self):
        for order in (1, 2, 5, 25):
            count = sum(
                1
                for s in (1, 2)
                for n in range(1, order + 1)
                for m in range(-n, n + 1)
            )
            assert modes.mode_count(order) == count == 2 * order * (order + 2)

    def test_mode_table_matches_scalar_unpacking(self):
        s, m, n = modes.mode_table(12)
        for idx, j in enumerate(range(1, modes.mode_count(12) + 1)):
            assert (s[idx], m[idx], n[idx]) == modes.triple_from_mode_index(j)

    @pytest.mark.parametrize("triple", [(3, 0, 1), (1, 2, 1), (1, 0, 0), (2, -5, 4)])
    def test_invalid_triples_rejected(self, triple):
        with pytest.raises(DomainError):
            modes.mode_index_from_triple(*triple)

    def test_conjugate_index_examples(self):
        assert modes.conjugate_m_index(5) == 1  # (1, 1, 1) -> (1, -1, 1)
        assert modes.conjugate_m_index(4) == 4  # m = 0 is a fixed point

    def test_conjugate_index_is_involution(self):
        j = np.arange(1, modes.mode_count(25) + 1)
        jj = modes.conjugate_m_index(j)
        assert np.array_equal(modes.conjugate_m_index(jj), j)

    def test_conjugate_index_negates_m(self):
        for j in range(1, modes.mode_count(10) + 1):
            s, m, n = modes.triple_from_mode_index(j)
            assert modes.triple_from_mode_index(modes.conjugate_m_index(j)) == (s, -m, n)


def _reference_legendre(n: int, m: int, theta: float) -> float:
    """Normalized Legendre value from an exact symbolic evaluation.

    Unit L2 norm over [0, pi] with sin(theta) weight and no
    Condon-Shortley phase; sympy's assoc_legendre carries the phase, so it
    is stripped explicitly.
    """
    x = sympy.Symbol("x")
    expr = (-1) ** m * sympy.assoc_legendre(n, m, x)
    norm = sympy.sqrt(
        sympy.Rational(2 * n + 1, 2) * sympy.factorial(n - m) / sympy.factorial(n + m)
    )
    return float((norm * expr).subs(x, sympy.nsimplify(np.cos(theta), rational=False)).evalf(30))


class TestLegendreBundle:
    def test_against_symbolic_oracle(self):
        rng = np.random.default_rng(11)
        for _ in range(25):
            n = int(rng.integers(1, 9))
            m = int(rng.integers(0, n + 1))
            theta = float(rng.uniform(0.05, np.pi - 0.05))
            got = modes.legendre_bundle(n, m, theta).p
            want = _reference_legendre(n, m, theta)
            assert got == pytest.approx(want, rel=1e-12, abs=1e-13)

    def test_n1_m0_at_equator(self):
        # the plain order-1 polynomial is proportional to cos(theta)
        b = modes.legendre_bundle(1, 0, np.pi / 2)
        assert b.p == pytest.approx(0.0, abs=1e-15)
        assert b.dp == pytest.approx(-np.sqrt(1.5), rel=1e-14)

    def test_first_derivative_matches_finite_differences(self):
        rng = np.random.default_rng(5)
        h = 1e-6
        for _ in range(100):
            n = int(rng.integers(1, 31))
            m = int(rng.integers(-n, n + 1))
            theta = float(rng.uniform(0.05, np.pi - 0.05))
            b = modes.legendre_bundle(n, m, theta)
            bp = modes.legendre_bundle(n, m, theta + h)
            bm = modes.legendre_bundle(n, m, theta - h)
            fd = (bp.p - bm.p) / (2 * h)
            scale = max(1.0, abs(b.dp))
            assert abs(b.dp - fd) / scale < 1e-8

    def test_second_derivative_matches_finite_differences(self):
        # five-point stencil keeps the truncation error of the oracle itself
        # below the tolerance for polar orders up to 30
        rng = np.random.default_rng(6)
        h = 5e-4
        for _ in range(100):
            n = int(rng.integers(1, 31))
            m = int(rng.integers(-n, n + 1))
            theta = float(rng.uniform(0.05, np.pi - 0.05))
            b = modes.legendre_bundle(n, m, theta)
            samples = [modes.legendre_bundle(n, m, theta + k * h).p for k in (-2, -1, 0, 1, 2)]
            fd = (-samples[4] + 16 * samples[3] - 30 * samples[2] + 16 * samples[1] - samples[0]) / (
                12 * h**2
            )
            scale = max(1.0, abs(b.d2p))
            assert abs(b.d2p - fd) / scale < 1e-6

    def test_over_sin_derivative_matches_finite_differences(self):
        rng = np.random.default_rng(7)
        h = 1e-6
        for _ in range(100):
            n = int(rng.integers(1, 31))
            m = int(rng.integers(-n, n + 1))
            theta = float(rng.uniform(0.05, np.pi - 0.05))
            b = modes.legendre_bundle(n, m, theta)
            bp = modes.legendre_bundle(n, m, theta + h)
            bm = modes.legendre_bundle(n, m, theta - h)
            fd = (bp.p_over_sin - bm.p_over_sin) / (2 * h)
            scale = max(1.0, abs(b.d_p_over_sin))
            assert abs(b.d_p_over_sin - fd) / scale < 1e-8

    @pytest.mark.parametrize("theta", [0.0, 1e-12, np.pi - 1e-12, np.pi])
    def test_finite_at_poles(self, theta):
        for n, m in [(1, 0), (3, 1), (3, -1), (4, 2), (7, 5), (12, 1)]:
            b = modes.legendre_bundle(n, m, theta)
            fields = [b.p, b.dp, b.d2p, b.p_over_sin, b.d_p_over_sin]
            assert np.all(np.isfinite(fields))

    def test_pole_limits_by_order(self):
        for theta in (0.0, np.pi):
            assert modes.legendre_bundle(5, 0, theta).p_over_sin == 0.0
            assert modes.legendre_bundle(5, 2, theta).p_over_sin == pytest.approx(0.0, abs=1e-300)
            assert abs(modes.legendre_bundle(5, 1, theta).p_over_sin) > 0.1

    def test_pole_limit_continuity_m1(self):
        near = modes.legendre_bundle(6, 1, 1e-8)
        at = modes.legendre_bundle(6, 1, 0.0)
        assert near.p_over_sin == pytest.approx(at.p_over_sin, rel=1e-8)
        assert near.d_p_over_sin == pytest.approx(at.d_p_over_sin, abs=1e-6)

    def test_theta_domain_error(self):
        with pytest.raises(DomainError):
            modes.legendre_bundle(2, 1, -0.1)
        with pytest.raises(DomainError):
            modes.legendre_bundle(2, 1, np.pi + 0.1)


def _reference_spherical_hankel(n: int, x: float) -> complex:
    with mpmath.workdps(50):
        arg = mpmath.mpf(x)
        factor = mpmath.sqrt(mpmath.pi / (2 * arg))
        jn = factor * mpmath.besselj(n + mpmath.mpf(1) / 2, arg)
        yn = factor * mpmath.bessely(n + mpmath.mpf(1) / 2, arg)
        return complex(jn + 1j * yn)


class TestRadialFunctions:
    def test_outgoing_asymptotics(self):
        for kr in (2e3, 5e3):
            for n in range(1, 6):
                r = modes.radial_function(3, n, kr)
                assert abs(abs(r.s1) * kr - 1.0) < 0.01

    def test_regular_is_mean_of_travelling_pair(self):
        n = np.arange(1, 8)
        r1 = modes.radial_function(1, n, 3.3)
        r3 = modes.radial_function(3, n, 3.3)
        r4 = modes.radial_function(4, n, 3.3)
        np.testing.assert_allclose(r1.s1, (r3.s1 + r4.s1) / 2, rtol=1e-13)
        np.testing.assert_allclose(r1.s2, (r3.s2 + r4.s2) / 2, rtol=1e-13)

    def test_against_high_precision_oracle(self):
        for n in range(0, 6):
            want = _reference_spherical_hankel(n, 2.0)
            got = modes.radial_function(3, n, 2.0)
            assert got.s1 == pytest.approx(want, rel=1e-10)

    def test_tangential_factor_consistency(self):
        # (1/x) d(x z)/dx built from the same oracle by central differences
        n, x = 3, 2.0
        h = 1e-7
        num = (
            (x + h) * _reference_spherical_hankel(n, x + h)
            - (x - h) * _reference_spherical_hankel(n, x - h)
        ) / (2 * h * x)
        got = modes.radial_function(3, n, x)
        assert got.s2 == pytest.approx(num, rel=1e-7)
        assert got.s2_radial == pytest.approx(_reference_spherical_hankel(n, x) / x, rel=1e-12)

    def test_domain_errors(self):
        with pytest.raises(DomainError):
            modes.radial_function(3, 1, 0.0)
        with pytest.raises(DomainError):
            modes.radial_function(3, 1, -2.0)
        with pytest.raises(DomainError):
            modes.radial_function(2, 1, 1.0)
