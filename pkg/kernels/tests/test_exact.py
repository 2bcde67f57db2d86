import random

from django.test import SimpleTestCase
from sympy import QQ

from kernels import utils as kernels_utils
from kernels.exact import (Series, binomial, format_rat, geometric, inverse_power_at_infinity, make_ring, parse_rat,
                           poly_mul, rand_rat_point, residue_y, series_pow_fractional, series_sqrt)


def x_series(coeffs, trunc):
    return Series.from_terms(('x',), [([k], c) for k, c in enumerate(coeffs)], x_vars=('x',), trunc=trunc)


def rand_rat(rng):
    return QQ(rng.randint(-5, 5), rng.randint(1, 5))


def rand_poly(rng, ring, degree=2):
    """Random polynomial with every monomial of total degree at most degree in two generators."""
    return ring.from_dict({(i, j): rand_rat(rng) for i in range(degree + 1) for j in range(degree + 1 - i)})


def rand_series(rng, trunc, laurent=False):
    """Random series in x1, x2 with constant term 1; laurent adds y with exponents -2..1."""
    names = ('x1', 'x2', 'y') if laurent else ('x1', 'x2')
    entries = [([0] * len(names), 1)]
    for i in range(trunc + 1):
        for j in range(trunc + 1 - i):
            if i + j:
                exps = [i, j, rng.randint(-2, 1)] if laurent else [i, j]
                entries.append((exps, rand_rat(rng)))
    return Series.from_terms(names, entries, x_vars=('x1', 'x2'), trunc=trunc, y_vars=names[2:])


class RationalTest(SimpleTestCase):
    def test_parse(self):
        self.assertEqual(parse_rat('3/4'), QQ(3, 4))
        self.assertEqual(parse_rat('-6/8'), QQ(-3, 4))
        self.assertEqual(parse_rat(2), QQ(2))

    def test_parse_rejects(self):
        for literal in ('1/0', 'abc', '1.5'):
            with self.assertRaises(kernels_utils.ParamsError):
                parse_rat(literal)

    def test_format(self):
        self.assertEqual(format_rat(QQ(-2, 4)), '-1/2')
        self.assertEqual(format_rat(3), '3/1')

    def test_binomial(self):
        self.assertEqual(binomial(QQ(1, 2), 2), QQ(-1, 8))
        self.assertEqual(binomial(5, 2), QQ(10))


class PolyTest(SimpleTestCase):
    def test_mul_unions_variables(self):
        a = make_ring(('x1',)).gens[0]
        b = make_ring(('x2',)).gens[0]
        product = poly_mul(a + 1, b - 1)
        x1, x2 = make_ring(('x1', 'x2')).gens
        self.assertEqual(product, x1 * x2 - x1 + x2 - 1)

    def test_difference_of_squares(self):
        x1, x2 = make_ring(('x1', 'x2')).gens
        self.assertEqual(poly_mul(x1 + x2, x1 - x2), x1 ** 2 - x2 ** 2)

    def test_rand_point_deterministic(self):
        first = rand_rat_point(['x', 'y'], 10, 1)
        self.assertEqual(first, rand_rat_point(['x', 'y'], 10, 1))
        for v in first.values():
            self.assertTrue(1 <= v.numerator <= 10 and 1 <= v.denominator <= 10)

    def test_rand_point_forbidden(self):
        for seed in range(20):
            point = rand_rat_point(['x'], 2, seed, forbidden=[1])
            self.assertNotEqual(point['x'], QQ(1))
        with self.assertRaises(kernels_utils.ParamsError):
            rand_rat_point(['x'], 1, 1)


class SeriesTest(SimpleTestCase):
    def test_mul_truncates(self):
        product = x_series([1, 1], 2) * x_series([1, -1], 2)
        self.assertTrue(product.equals(x_series([1, 0, -1], 2)))
        self.assertEqual(product.trunc, 2)

    def test_geometric_inverse(self):
        product = geometric('x', 1, 3) * x_series([1, -1], 3)
        self.assertTrue(product.equals(x_series([1], 3)))

    def test_overflow(self):
        product = x_series([0, 0, 0, 1], 2) * x_series([1, 1], 2)
        self.assertTrue(product.is_zero())

    def test_sqrt(self):
        self.assertTrue(series_sqrt(x_series([1, 2, 1], 4)).equals(x_series([1, 1], 4)))
        self.assertTrue(series_sqrt(x_series([1, 1], 2)).equals(x_series([1, QQ(1, 2), QQ(-1, 8)], 2)))

    def test_fractional_power_cubed(self):
        a = x_series([1, 1], 5)
        root = series_pow_fractional(a, QQ(1, 3))
        self.assertTrue((root * root * root).equals(a))
        self.assertTrue(series_pow_fractional(a, 0).equals(x_series([1], 5)))

    def test_fractional_power_needs_unit_constant(self):
        with self.assertRaises(kernels_utils.ParamsError):
            series_sqrt(x_series([2, 1], 3))

    def test_residue(self):
        f = Series.from_terms(('y',), [([-2], 1), ([-1], 3), ([0], 5)], y_vars=('y',))
        self.assertEqual(f.residue('y').coeff(), QQ(3))
        self.assertEqual(inverse_power_at_infinity('y', 0, 1, 3).residue('y').coeff(), QQ(1))

    def test_residue_of_derivative_vanishes(self):
        g = Series.from_terms(('y',), [([-3], 2), ([-1], 7), ([2], 1)], y_vars=('y',))
        self.assertTrue(g.diff('y').residue('y').is_zero())

    def test_residue_outside_window(self):
        f = Series.from_terms(('y',), [([-2], 1)], y_vars=('y',), y_lo={'y': 0})
        with self.assertRaises(kernels_utils.WindowError):
            f.residue('y')

    def test_y_derivative(self):
        d = inverse_power_at_infinity('y', 0, 1, 3).diff('y')
        self.assertEqual(d.coeff(y=-2), QQ(-1))

    def test_residue_y(self):
        f = Series.from_terms(('x', 'y'), [([0, -1], 3), ([1, -1], 2), ([1, -2], 5), ([0, 0], 1)],
                              x_vars=('x',), trunc=2, y_vars=('y',))
        residue = residue_y(f, 'y')
        self.assertEqual(residue.coeff(), QQ(3))
        self.assertEqual(residue.coeff(x=1), QQ(2))
        self.assertEqual(residue.y_vars, ())


class RandomizedAlgebraTest(SimpleTestCase):
    def setUp(self):
        self.rng = random.Random(20240601)

    def test_poly_ring_axioms(self):
        ring = make_ring(('x1', 'x2'))
        for _ in range(100):
            a, b, c = (rand_poly(self.rng, ring) for _ in range(3))
            self.assertEqual((a * b) * c, a * (b * c))
            self.assertEqual(a * b, b * a)
            self.assertEqual(a * (b + c), a * b + a * c)
            self.assertEqual((a + b) + c, a + (b + c))

    def test_series_mul(self):
        for laurent in (False, True):
            for _ in range(10):
                a, b, c = (rand_series(self.rng, 4, laurent) for _ in range(3))
                self.assertTrue(((a * b) * c).equals(a * (b * c)))
                self.assertTrue((a * b).equals(b * a))

    def test_sqrt_squares_back(self):
        for _ in range(20):
            a = rand_series(self.rng, 4)
            root = series_sqrt(a)
            self.assertTrue((root ** 2).equals(a))

    def test_fractional_power(self):
        for _ in range(20):
            a = rand_series(self.rng, 4)
            p, q = self.rng.randint(1, 3), self.rng.randint(2, 4)
            root = series_pow_fractional(a, QQ(p, q))
            self.assertTrue((root ** q).equals(a ** p))
