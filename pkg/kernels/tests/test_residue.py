from math import factorial

from django.test import SimpleTestCase
from sympy import QQ

from kernels import utils as kernels_utils
from kernels.ode import PRESET_PARAMS, expand_solution, preset_operator
from kernels.residue import (ConvolutionPlan, assoc_check, composite_series, convolve, gen_assoc_check,
                             gen_composite, product_identity_check, sym_power_check)
from kernels.structure import gen_structure_constants, structure_constants


def table_for(family, N, g=None):
    op = preset_operator(family, PRESET_PARAMS.get(family, {}), g)
    sol = expand_solution(op, 2 * N)
    return sol, structure_constants(sol, N)


class AssocTest(SimpleTestCase):
    def test_exponential_composite(self):
        sol, table = table_for('first_order_g', 6, g=1)
        composite = convolve(ConvolutionPlan(table, table, 3))
        self.assertEqual(composite[(1, 1, 1)], {3: QQ(6)})
        self.assertEqual(composite[(2, 0, 1)], {3: QQ(3)})
        self.assertEqual(assoc_check(table, 3), 64)

    def test_exponential_composite_series(self):
        sol, table = table_for('first_order_g', 6, g=1)
        series = composite_series(convolve(ConvolutionPlan(table, table, 3)), 3)
        self.assertEqual(series.coeff(x1=1, x2=1, x3=1, z=-4), QQ(6))
        self.assertEqual(series.coeff(x1=2, x3=1, z=-4), QQ(3))
        terms = list(series.terms())
        self.assertEqual(len(terms), 20)
        # 1/(z - x1 - x2 - x3)
        for exps, coeff in terms:
            n = exps['x1'] + exps['x2'] + exps['x3']
            self.assertEqual(exps['z'], -n - 1)
            orderings = factorial(n) // (factorial(exps['x1']) * factorial(exps['x2']) * factorial(exps['x3']))
            self.assertEqual(coeff, QQ(orderings))

    def test_heun4(self):
        sol, table = table_for('heun4', 8)
        self.assertEqual(assoc_check(table, 4), 125)

    def test_third_order(self):
        sol, table = table_for('third_order3', 6)
        assoc_check(table, 3)

    def test_corrupted_table(self):
        sol, table = table_for('first_order_g', 6, g=1)
        with self.assertRaises(kernels_utils.MismatchError):
            assoc_check(table.corrupted(1, 1, 0), 3)

    def test_plan_depth(self):
        sol, table = table_for('heun4', 3)
        with self.assertRaises(kernels_utils.PlanError):
            assoc_check(table, 3)


class GenAssocTest(SimpleTestCase):
    def setUp(self):
        op = preset_operator('first_order_g', {}, 2)
        self.sol = expand_solution(op, 3)
        self.table = gen_structure_constants(self.sol, 3)

    def test_exponential(self):
        self.assertGreater(gen_assoc_check(self.table, 3), 0)
        self.assertEqual(gen_composite(self.table, (0, 0, 0, 0)), {(0, 0): QQ(1)})

    def test_symmetric_square(self):
        self.assertGreater(sym_power_check(self.table, 3), 0)

    def test_heun_n(self):
        op = preset_operator('heun_n', PRESET_PARAMS['heun_n'])
        table = gen_structure_constants(expand_solution(op, 3), 3)
        gen_assoc_check(table, 3)

    def test_symmetric_square_needs_two(self):
        op = preset_operator('first_order_g', {}, 3)
        table = gen_structure_constants(expand_solution(op, 2), 2)
        with self.assertRaises(kernels_utils.ParamsError):
            sym_power_check(table, 2)


class ProductIdentityTest(SimpleTestCase):
    def test_exponential(self):
        sol, table = table_for('first_order_g', 5, g=1)
        self.assertEqual(product_identity_check(table, sol, 5), 5)

    def test_heun4(self):
        sol, table = table_for('heun4', 4)
        self.assertEqual(product_identity_check(table, sol, 4), 4)

    def test_two_parameters(self):
        op = preset_operator('first_order_g', {}, 2)
        sol = expand_solution(op, 3)
        self.assertEqual(product_identity_check(gen_structure_constants(sol, 3), sol, 3), 3)
