"""
Seeded randomised checks of the library against independent computations.
"""

import random
from fractions import Fraction

import pytest

from padic_polygon.arith.ratfun import DenseRatFun, FactoredRatFun, Poly, gauss_val, gauss_val_poly
from padic_polygon.arith.scalars import POS_INF, is_finite, omega_log, val_factorial, val_rational
from padic_polygon.core.audit import audit_main_theorem
from padic_polygon.core.criterion import check_criterion, retraction_profile
from padic_polygon.core.radii_engine import RadiiEngine, prune_to_controlling_graph
from padic_polygon.errors import DomainMembershipError
from padic_polygon.geometry.line import AffinoidDomain, Point, skeleton
from padic_polygon.geometry.piecewise import PAF, combine
from padic_polygon.polygons.frobenius import (
    frob_context,
    phi_point,
    phi_radius,
    psi_radius,
    pushforward_matrix,
    pushforward_radii,
)
from padic_polygon.polygons.polygon import np_from_values, slopes
from padic_polygon.polygons.spectral import (
    ConnectionMatrix,
    DifferentialOperator,
    companion_matrix,
    cyclic_operator,
    direct_sum_operator,
    radius_oracle,
    spectral_radii_at,
)

pytestmark = [pytest.mark.integration, pytest.mark.slow]

PRIMES = (2, 3, 5, 7)


def brute_heights(values):
    """Lower hull heights as the smallest chord through each index."""
    finite = [i for i, v in enumerate(values) if is_finite(v)]
    last = max(finite)
    out = []
    for i in range(len(values)):
        if i > last:
            out.append(POS_INF)
            continue
        best = None
        for a in finite:
            for b in finite:
                if not a <= i <= b:
                    continue
                h = values[a] if a == b else values[a] + (values[b] - values[a]) * Fraction(i - a, b - a)
                if best is None or h < best:
                    best = h
        out.append(best)
    return out


def const_operator(*coefficients) -> DifferentialOperator:
    return DifferentialOperator.build([FactoredRatFun.const(g) for g in coefficients])


def unit_not_divisible(rng: random.Random, p: int) -> int:
    while True:
        u = rng.randint(1, 12)
        if u % p:
            return u


class TestPolygonHull:
    """Test np_from_values against a brute-force hull."""

    def test_random_sequences(self):
        """Test 500 random sequences of rank up to 6, infinite entries included."""
        rng = random.Random(1)
        for _ in range(500):
            r = rng.randint(1, 6)
            values = [Fraction(0)]
            for _ in range(r):
                if rng.random() < 0.2:
                    values.append(POS_INF)
                else:
                    values.append(Fraction(rng.randint(-20, 20), rng.randint(1, 4)))
            np_ = np_from_values(values)
            assert list(np_.heights) == brute_heights(values), values
            s = slopes(np_)
            assert all(a <= b for a, b in zip(s, s[1:])), values


class TestRadiusMapsRandom:
    """Test φ and ψ are mutually inverse."""

    def test_random_pairs(self):
        """Test 100 random (σ, ρ) pairs in both directions."""
        rng = random.Random(2)
        for _ in range(100):
            p = rng.choice(PRIMES)
            sigma = Fraction(rng.randint(-6, 6), rng.randint(1, 3))
            L = Fraction(rng.randint(-12, 6), rng.randint(1, 4))
            assert psi_radius(sigma, phi_radius(sigma, L, p), p) == L
            assert phi_radius(sigma, psi_radius(sigma, L, p), p) == L


class TestOracleAgreement:
    """Test the Taylor estimate against certified spectral radii at x_{0,0}."""

    def test_first_operator(self):
        """Test d - 1/3 for p = 3: certified -3/2, estimate -121/81 at N = 150."""
        op = const_operator("-1/3")
        radii = spectral_radii_at(op, Point.of(0, 0), 3)
        assert radii.values == (Fraction(-3, 2),)
        assert radii.all_certified
        estimate = radius_oracle(companion_matrix(op), Point.of(0, 0), 150, 3)
        assert estimate == Fraction(-121, 81)

    def test_rank_one(self):
        """Test 14 constant rank-1 operators with |g_1| = p^k."""
        rng = random.Random(3)
        x = Point.of(0, 0)
        for _ in range(14):
            p = rng.choice(PRIMES)
            k = rng.randint(1, 3)
            op = const_operator(-Fraction(unit_not_divisible(rng, p), p**k))
            expected = omega_log(p) - k
            radii = spectral_radii_at(op, x, p)
            assert radii.values == (expected,)
            assert radii.all_certified
            estimate = radius_oracle(companion_matrix(op), x, 150, p)
            assert abs(estimate - expected) <= Fraction(1, 10), (p, k, estimate)

    def test_rank_two(self):
        """Test 6 constant rank-2 operators with distinct slopes."""
        rng = random.Random(4)
        x = Point.of(0, 0)
        for _ in range(6):
            p = rng.choice(PRIMES)
            k1 = rng.randint(2, 3)
            k2 = rng.randint(k1 + 1, 2 * k1 - 1)
            op = const_operator(
                -Fraction(unit_not_divisible(rng, p), p**k1),
                -Fraction(unit_not_divisible(rng, p), p**k2),
            )
            expected = omega_log(p) - k1
            radii = spectral_radii_at(op, x, p)
            assert radii.values == (expected, omega_log(p) + k1 - k2)
            assert radii.all_certified
            estimate = radius_oracle(companion_matrix(op), x, 150, p)
            assert abs(estimate - expected) <= Fraction(1, 10), (p, k1, k2, estimate)


class TestFrobeniusConsistency:
    """Test the pushed matrix has the radii predicted by pushforward_radii."""

    def test_laurent_connections(self):
        """Test 10 rank-1 connections a·T^m with |a| > 1 at x_{0,0}."""
        rng = random.Random(5)
        x = Point.of(0, 0)
        for _ in range(10):
            p = rng.choice((2, 3))
            m = rng.randint(-1, 2)
            a = Fraction(unit_not_divisible(rng, p), p ** rng.randint(1, 2))
            if m >= 0:
                entry = DenseRatFun.build(Poly.of(*([0] * m + [a])))
            else:
                entry = DenseRatFun.build(Poly.of(a), Poly.of(0, 1))
            G = ConnectionMatrix(((entry,),))
            op, _ = cyclic_operator(G)
            radii = spectral_radii_at(op, x, p)
            assert radii.all_certified

            pushed_op, _ = cyclic_operator(pushforward_matrix(G, p))
            observed = spectral_radii_at(pushed_op, phi_point(x, p), p)
            predicted = pushforward_radii(radii, frob_context(x, radii.values, p))
            assert observed.values == predicted.values, (p, m, a)
            assert observed.all_certified


class TestAuditSuite:
    """Test profiles of assorted operators satisfy the main properties."""

    PROPERTIES = (
        "integrality",
        "denominators",
        "concavity_skeleton",
        "concavity_branches",
        "superharmonic",
        "sandwich",
        "spectral_agreement",
    )

    @pytest.mark.parametrize(
        "op, holes, p",
        [
            (const_operator("-1/3"), [], 3),
            (const_operator("-1/3"), [("0", "-1")], 3),
            (const_operator("-1/9"), [], 3),
            (const_operator("-1/9"), [("0", "-1")], 3),
            (DifferentialOperator.build([FactoredRatFun.build("-1/2", [(0, -1)])]), [], 2),
            (DifferentialOperator.build([FactoredRatFun.build("-1/3", [(0, -1)])]), [], 3),
            (DifferentialOperator.build([FactoredRatFun.build("-1/3", [(0, -1), (1, -1)])]), [], 3),
            (direct_sum_operator(const_operator("-1/3"), const_operator("-1/9")), [], 3),
            (direct_sum_operator(const_operator("-1/9"), const_operator("-1/27")), [("0", "-1")], 3),
        ],
        ids=[
            "constant-disk",
            "constant-annulus",
            "constant-ninth-disk",
            "constant-ninth-annulus",
            "fuchsian-p2",
            "fuchsian-p3",
            "two-poles",
            "direct-sum-disk",
            "direct-sum-annulus",
        ],
    )
    def test_operator(self, op, holes, p):
        """Test the profile passes every structural property."""
        X = AffinoidDomain.build(("0", "0"), holes)
        profile = RadiiEngine().build_profile(op, X, p)
        report = audit_main_theorem(profile)
        failed = [name for name in self.PROPERTIES if not report.checks[name].passed]
        assert failed == []

    def test_direct_sum_radii(self):
        """Test the direct sum keeps both radii at the root."""
        op = direct_sum_operator(const_operator("-1/9"), const_operator("-1/27"))
        profile = RadiiEngine().build_profile(op, AffinoidDomain.disk(), 3)
        assert profile.vertices[Point.of(0, 0)].radii == [Fraction(-7, 2), Fraction(-5, 2)]


class TestRetractionCriterion:
    """Test ρ_Γ on random skeletons."""

    @staticmethod
    def random_domain(rng: random.Random) -> AffinoidDomain:
        while True:
            holes = [
                (rng.randrange(27), rng.choice((-1, -2, -3))) for _ in range(rng.randint(1, 3))
            ]
            X = AffinoidDomain.build((0, 0), holes)
            try:
                return X.validate(3)
            except DomainMembershipError:
                continue

    def test_random_graphs(self):
        """Test ρ_Γ satisfies the criterion and controls exactly Γ."""
        rng = random.Random(6)
        for _ in range(5):
            X = self.random_domain(rng)
            Gamma = skeleton(X, 3)
            F = retraction_profile(Gamma, X, 3)
            assert check_criterion(F).passed, X.holes
            assert prune_to_controlling_graph(F).graph.edges() == Gamma.edges(), X.holes


class TestArithmeticIdentities:
    """Test valuation identities on random data."""

    def test_factorial_sum(self):
        """Test log|n!| = Σ log|k| for n <= 200."""
        for p in (2, 3, 5):
            total = Fraction(0)
            assert val_factorial(0, p) == 0
            for n in range(1, 201):
                total += val_rational(n, p)
                assert val_factorial(n, p) == total, (n, p)

    @staticmethod
    def random_function(rng: random.Random) -> FactoredRatFun:
        roots = {Fraction(rng.randint(-8, 8), rng.choice((1, 3))) for _ in range(rng.randint(0, 3))}
        factors = [(z, rng.choice((-2, -1, 1, 2))) for z in sorted(roots)]
        constant = Fraction(rng.choice((-1, 1)) * rng.randint(1, 50), rng.randint(1, 50))
        return FactoredRatFun.build(constant, factors)

    def test_gauss_multiplicative(self):
        """Test x(fg) = x(f)·x(g) at random type-2 points."""
        rng = random.Random(7)
        for _ in range(50):
            p = rng.choice((2, 3))
            f, g = self.random_function(rng), self.random_function(rng)
            x = Point.of(Fraction(rng.randint(-10, 10), rng.choice((1, 3))), rng.randint(-4, 2))
            assert gauss_val(f * g, x, p) == gauss_val(f, x, p) + gauss_val(g, x, p)
            num = f.numerator() * g.numerator()
            assert gauss_val_poly(num, x, p) == gauss_val_poly(f.numerator(), x, p) + gauss_val_poly(
                g.numerator(), x, p
            )

    def test_factored_matches_expanded(self):
        """Test the factored formula against the Taylor-coefficient norm."""
        rng = random.Random(8)
        for _ in range(50):
            p = rng.choice((2, 3))
            f = self.random_function(rng)
            x = Point.of(Fraction(rng.randint(-10, 10), rng.choice((1, 3))), Fraction(rng.randint(-8, 4), 2))
            expected = gauss_val_poly(f.numerator(), x, p) - gauss_val_poly(f.denominator(), x, p)
            assert gauss_val(f, x, p) == expected


class TestCombineRandom:
    """Test pointwise min and max of random PAFs."""

    @staticmethod
    def random_paf(rng: random.Random) -> PAF:
        inner = sorted(rng.sample(range(-19, 0), rng.randint(0, 4)))
        nodes = [-20] + inner + [0]
        return PAF.from_points([(Fraction(L, 4), Fraction(rng.randint(-20, 20), 3)) for L in nodes])

    def test_random_points(self):
        """Test combine against direct evaluation at 50 points."""
        rng = random.Random(9)
        f, g = self.random_paf(rng), self.random_paf(rng)
        low, high = combine(f, g, "min"), combine(f, g, "max")
        for _ in range(50):
            L = Fraction(rng.randint(-20 * 8, 0), 8 * 4)
            assert low.eval(L) == min(f.eval(L), g.eval(L))
            assert high.eval(L) == max(f.eval(L), g.eval(L))
