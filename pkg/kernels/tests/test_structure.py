from django.test import SimpleTestCase
from sympy import QQ

from kernels import utils as kernels_utils
from kernels.ode import PRESET_PARAMS, expand_solution, preset_operator
from kernels.structure import (SCTable, check_basis, evaluate_product_identity, gen_structure_constants,
                               interpolate_entry, structure_constants, symmetry_check, triangular_check)


def solution(family, N, g=None, preset=None):
    op = preset_operator(family, PRESET_PARAMS.get(preset or family, {}), g)
    return expand_solution(op, N)


class SCTableTest(SimpleTestCase):
    def test_exponential_binomials(self):
        table = structure_constants(solution('first_order_g', 8, g=1), 4)
        self.assertEqual(table.row(2, 3), {5: QQ(10)})
        self.assertEqual(table.row(4, 4), {8: QQ(70)})
        self.assertEqual(table.row(3, 0), {3: QQ(1)})

    def test_heun4_table(self):
        sol = solution('heun4', 12)
        table = structure_constants(sol, 6)
        self.assertEqual(symmetry_check(table), 49)
        self.assertEqual(triangular_check(table), 49)
        for i in range(7):
            self.assertEqual(table.row(i, 0), {i: QQ(1)})
        self.assertEqual(evaluate_product_identity(table, sol, samples=10, seed=3), 10)
        self.assertEqual(evaluate_product_identity(table, sol, points=[0, 1, -1, 2, 5]), 5)

    def test_interpolation_agrees(self):
        sol = solution('heun4', 8)
        table = structure_constants(sol, 4)
        self.assertEqual(interpolate_entry(sol, 3, 4), table.row(3, 4))

    def test_corrupted_table_fails(self):
        sol = solution('third_order3', 8)
        table = structure_constants(sol, 4).corrupted(1, 1, 0)
        with self.assertRaises(kernels_utils.MismatchError) as cm:
            evaluate_product_identity(table, sol, samples=2)
        self.assertIn('C_{1,1}', str(cm.exception))

    def test_needs_depth(self):
        with self.assertRaises(kernels_utils.PlanError):
            structure_constants(solution('heun4', 5), 3)
        with self.assertRaises(kernels_utils.ParamsError):
            structure_constants(solution('first_order_g', 4, g=2), 2)

    def test_entries_roundtrip(self):
        table = structure_constants(solution('heun4', 6), 3)
        self.assertEqual(SCTable.from_entries(3, table.to_entries()), table)


class BasisTest(SimpleTestCase):
    def test_one_parameter(self):
        report = check_basis(solution('heun4', 5), 5)
        self.assertTrue(report['independent'] and report['spanning'])

    def test_exponential_two_parameters(self):
        report = check_basis(solution('first_order_g', 4, g=2), 4)
        self.assertTrue(report['independent'])
        self.assertTrue(report['spanning'])
        self.assertEqual([b['rank'] for b in report['blocks']], [1, 2, 4, 6, 9])

    def test_heun_n(self):
        report = check_basis(solution('heun_n', 4), 4)
        self.assertEqual(report['span_defect'], [])


class GenSCTableTest(SimpleTestCase):
    def test_exponential(self):
        sol = solution('first_order_g', 3, g=2)
        table = gen_structure_constants(sol, 3)
        self.assertEqual(table.row((1, 1, 0)), {(1, 1): QQ(1)})
        self.assertEqual(table.row((0, 0, 0)), {(0, 0): QQ(1)})
        self.assertGreater(symmetry_check(table), 0)
        self.assertEqual(evaluate_product_identity(table, sol, samples=5), 5)

    def test_heun_n_unit(self):
        sol = solution('heun_n', 3)
        table = gen_structure_constants(sol, 3)
        self.assertEqual(table.row((1, 0, 0)), {(0, 1): QQ(1)})
        self.assertLessEqual(table.support_bound, 3)

    def test_corrupted(self):
        sol = solution('first_order_g', 3, g=2)
        table = gen_structure_constants(sol, 3).corrupted((0, 1, 1), (0, 1))
        with self.assertRaises(kernels_utils.MismatchError):
            evaluate_product_identity(table, sol, samples=3)
