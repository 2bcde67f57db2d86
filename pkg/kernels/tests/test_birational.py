import json
import os
import tempfile

from django.test import SimpleTestCase
from sympy import Rational, Symbol, cancel, sympify

from kernels import utils as kernels_utils
from kernels.birational import (FIXTURES, IdentitySpec, check_stated_points, continue_map_bigf, identity_sides,
                                load_spec, parametrize, probe_identity_bigf, solve_ybar_perturbative,
                                verify_exponent_identity, verify_identity, verify_power_identity)


def symbols_point(**values):
    return {Symbol(k): Rational(v) for k, v in values.items()}


class ExactIdentityTest(SimpleTestCase):
    def test_exp_product_substitution_value(self):
        values = parametrize(load_spec('exp_product'))
        point = symbols_point(x1=1, x2=2, x3=3, z=4, y=5)
        self.assertEqual(values[Symbol('yt')].xreplace(point), Rational(25, 4))

    def test_exp_product_degenerates_to_identity_map(self):
        values = parametrize(load_spec('exp_product'))
        x2, x3 = Symbol('x2'), Symbol('x3')
        self.assertEqual(cancel(values[Symbol('yt')].xreplace({x3: x2})), Symbol('y'))

    def test_exponential_identities(self):
        for name in ('exp_product', 'exp_laurent', 'exp_product4'):
            result = verify_exponent_identity(load_spec(name), 5, 1, 10 ** 4)
            self.assertEqual(result['points'], 5)
            self.assertEqual(result['identities'], ['exponent', 'measure'])
            self.assertLess(result['false_pass_bound'], 1e-20)

    def test_root_product4_hand_point(self):
        spec = load_spec('root_product4')
        values = parametrize(spec)
        free = symbols_point(x1=1, x2=1, x3=3, x4=1, x5=1, w123=4, w45=6)
        full = dict(free)
        full.update({k: v.xreplace(free) for k, v in values.items()})
        self.assertEqual(full[Symbol('y')], 5)
        self.assertEqual(full[Symbol('z')], 7)
        self.assertEqual(full[Symbol('yt')], 8)
        self.assertEqual(full[Symbol('w124')], 3)
        self.assertEqual(full[Symbol('w35')], 13)
        for label, left, right in identity_sides(spec):
            self.assertEqual(left.xreplace(full), right.xreplace(full), label)

    def test_root_product4_sampled(self):
        result = verify_power_identity(load_spec('root_product4'), 5, 2, 10 ** 4)
        self.assertEqual(result['identities'], ['base1', 'measure'])

    def test_broken_substitution_fails(self):
        data = dict(FIXTURES['exp_product'], substitution=[['yt', '(x1*x2 + x3*z + 1)/(x1*x3 + x2*z + 2)*y']])
        with self.assertRaises(kernels_utils.MismatchError):
            verify_identity(IdentitySpec('broken', data), 5, 1, 10 ** 4)

    def test_irrational_points_need_bigf(self):
        with self.assertRaises(kernels_utils.ParamsError):
            verify_identity(load_spec('genus_one'), 5, 1, 100)

    def test_spec_validation(self):
        with self.assertRaises(kernels_utils.ParamsError):
            IdentitySpec('bad', {'kind': 'log'})
        with self.assertRaises(kernels_utils.ParamsError):
            IdentitySpec('bad', dict(FIXTURES['exp_product'], measure=None))
        with self.assertRaises(kernels_utils.ParamsError):
            load_spec('/nonexistent/identity.json')

    def test_spec_from_file(self):
        with tempfile.TemporaryDirectory() as directory:
            path = os.path.join(directory, 'identity.json')
            with open(path, 'w') as f:
                json.dump(dict(FIXTURES['exp_product'], name='from_file'), f)
            spec = load_spec(path)
        self.assertEqual(spec.name, 'from_file')
        self.assertEqual(verify_identity(spec, 3, 1, 100)['points'], 3)


class StatedPointsTest(SimpleTestCase):
    def test_genus_one_points(self):
        self.assertEqual(check_stated_points(load_spec('genus_one'), samples=3, seed=1), 3)

    def test_genus_one_explicit(self):
        spec = load_spec('genus_one')
        self.assertEqual(check_stated_points(spec, params={'t': 3, 'x1': 2, 'x2': 5, 'x3': 7, 'x4': 11}), 1)

    def test_fixed_point(self):
        spec = load_spec('fixed_point')
        params = {'t': 2, 'x1': 3, 'x2': 5, 'x3': 7, 'z': 11, 'C1': 1, 'C2': 1, 'C3': 1, 'C4': 1}
        self.assertEqual(check_stated_points(spec, params=params), 1)
        self.assertEqual(check_stated_points(spec, samples=2, seed=4), 2)

    def test_wrong_point_fails(self):
        data = dict(FIXTURES['genus_one'])
        data['maps'] = [[{'y': '0', 'w12': 'x1*x2 + t', 'w34': 'x3*x4 - t'},
                         {'yt': '0', 'w13': 'x1*x3 - t', 'w24': 'x2*x4 - t'}]]
        with self.assertRaises(kernels_utils.MismatchError):
            check_stated_points(IdentitySpec('moved', data), params={'t': 3, 'x1': 2, 'x2': 5, 'x3': 7, 'x4': 11})

    def test_continuation(self):
        result = continue_map_bigf(load_spec('genus_one'), seed=1, bits=120, tolerance_bits=80, steps=8, checks=2)
        self.assertEqual(result['points'], 2)
        self.assertEqual(result['precision'], 120)


class ProbeTest(SimpleTestCase):
    def test_sqrt_variant_reports(self):
        found = probe_identity_bigf(load_spec('exp_sqrt'), samples=2, seed=1, bits=100)
        self.assertEqual(sorted(found), ['exponent', 'measure'])
        for value in found.values():
            self.assertIn('holds', value)


class PerturbativeTest(SimpleTestCase):
    def test_first_order_coefficient(self):
        spec = load_spec('exp_product')
        result = solve_ybar_perturbative(spec, 2, known=FIXTURES['exp_product']['substitution'][0][1])
        self.assertEqual(result['status'], 'solved')
        expected = sympify('y*(x1 - z)/(x1*x2 + x2*z + 1)')
        self.assertEqual(cancel(sympify(result['q']['q1']) - expected), 0)

    def test_wrong_known_expansion(self):
        with self.assertRaises(kernels_utils.MismatchError):
            solve_ybar_perturbative(load_spec('exp_product'), 1, known='y')

    def test_needs_rational_kernel(self):
        with self.assertRaises(kernels_utils.ParamsError):
            solve_ybar_perturbative(load_spec('root_product4'), 1)
