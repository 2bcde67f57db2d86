from django.test import SimpleTestCase
from sympy import QQ

from kernels import utils as kernels_utils
from kernels.closed_forms import (HypergeomSpec, check_heun4_equations, check_heun_n_formula,
                                  check_third_order_equations, compare_kernels, hypergeom_coefficients,
                                  hypergeom_derivative_check, oracle_elementary, oracle_heun4, oracle_heun4_unit,
                                  oracle_third_order)
from kernels.kernel import build_kernel, fault_inject
from kernels.ode import PRESET_PARAMS, expand_solution, preset_operator
from kernels.structure import gen_structure_constants, structure_constants


def built(family, N, preset=None, g=None):
    op = preset_operator(family, PRESET_PARAMS.get(preset or family, {}), g)
    if op.g == 1:
        table = structure_constants(expand_solution(op, 2 * N), N)
    else:
        table = gen_structure_constants(expand_solution(op, N), N)
    return op, build_kernel(table, N)


def within(M):
    return lambda exps: -exps['y'] <= M


class HypergeomTest(SimpleTestCase):
    def test_coefficients(self):
        self.assertEqual(hypergeom_coefficients(1, 1, 1, 4), [QQ(1)] * 5)
        self.assertEqual(hypergeom_coefficients(-1, 2, 3, 3), [QQ(1), QQ(-2, 3), QQ(0), QQ(0)])

    def test_pole(self):
        with self.assertRaises(kernels_utils.ResonanceError):
            hypergeom_coefficients(QQ(1, 2), QQ(1, 3), -1, 4)

    def test_derivative(self):
        self.assertEqual(hypergeom_derivative_check(HypergeomSpec('1/2', '1/3', '1/5', 6)), 5)


class ElementaryTest(SimpleTestCase):
    def test_one_parameter(self):
        op, kernel = built('first_order_g', 5, g=1)
        self.assertEqual(compare_kernels(oracle_elementary(1, 5), kernel), 5)

    def test_two_parameters(self):
        op, kernel = built('first_order_g', 4, g=2)
        self.assertEqual(compare_kernels(oracle_elementary(2, 4), kernel), 4)

    def test_three_parameters(self):
        op, kernel = built('first_order_g', 2, g=3)
        self.assertEqual(compare_kernels(oracle_elementary(3, 2), kernel), 2)

    def test_detects_fault(self):
        op, kernel = built('first_order_g', 4, g=1)
        with self.assertRaises(kernels_utils.MismatchError):
            compare_kernels(oracle_elementary(1, 4), fault_inject(kernel, {'x1': 1, 'x2': 1, 'y': -2}))

    def test_genus_mismatch(self):
        op, kernel = built('first_order_g', 2, g=1)
        with self.assertRaises(kernels_utils.IncompatibleError):
            compare_kernels(oracle_elementary(2, 2), kernel)

    def test_coefficients_in_elementary_polynomials(self):
        series = oracle_elementary(2, 2).series
        # (q1 + q2) / 2 = e1(x) / 2
        self.assertEqual(series.coeff(x1=1, y1=-2, y2=-1), QQ(1, 2))
        # q1 q2 = e2(x)
        self.assertEqual(series.coeff(x1=1, x3=1, y1=-2, y2=-2), QQ(1))
        # (q1^2 + q2^2) / 2 = e1(x)^2 / 2 - e2(x)
        self.assertEqual(series.coeff(x2=2, y1=-3, y2=-1), QQ(1, 2))
        self.assertEqual(series.coeff(x1=1, x2=1, y1=-3, y2=-1), QQ(0))


class Heun4Test(SimpleTestCase):
    def test_hypergeometric_sum(self):
        op, kernel = built('heun4', 5)
        self.assertEqual(compare_kernels(oracle_heun4(op.params, 5, 6), kernel, within=within(6)), 5)

    def test_equations(self):
        op, kernel = built('heun4', 6)
        windows = check_heun4_equations(kernel, op)
        self.assertIn('inhomogeneous', windows)
        self.assertIn('cleared', windows)

    def test_unit_radical(self):
        op, kernel = built('heun4', 5, preset='heun4_unit')
        self.assertEqual(compare_kernels(oracle_heun4_unit(op.params, 5), kernel), 5)

    def test_unit_needs_unit_exponents(self):
        with self.assertRaises(kernels_utils.ParamsError):
            oracle_heun4_unit(PRESET_PARAMS['heun4'], 4)


class ThirdOrderTest(SimpleTestCase):
    def test_double_sum(self):
        op, kernel = built('third_order3', 5)
        self.assertEqual(compare_kernels(oracle_third_order(op.params, 5, 6), kernel, within=within(6)), 5)

    def test_equations(self):
        op, kernel = built('third_order3', 6)
        self.assertIn('inhomogeneous', check_third_order_equations(kernel, op))


class HeunNTest(SimpleTestCase):
    def test_low_order_formula(self):
        op, kernel = built('heun_n', 3)
        self.assertEqual(check_heun_n_formula(kernel, op, 3), 3)
