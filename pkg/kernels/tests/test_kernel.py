from django.test import SimpleTestCase
from sympy import QQ

from kernels import utils as kernels_utils
from kernels.closed_forms import compare_kernels, oracle_elementary
from kernels.kernel import (Kernel, boundary_check, build_kernel, extract_table, fault_inject, kernel_diffeq_check,
                            kernel_properties, symmetry_check, uniqueness_probe)
from kernels.ode import PRESET_PARAMS, expand_solution, preset_operator
from kernels.structure import gen_structure_constants, structure_constants


def one_parameter(family, N, g=None, preset=None):
    op = preset_operator(family, PRESET_PARAMS.get(preset or family, {}), g)
    table = structure_constants(expand_solution(op, 2 * N), N)
    return op, table, build_kernel(table, N)


class KernelTest(SimpleTestCase):
    def test_exponential_is_geometric(self):
        op, table, kernel = one_parameter('first_order_g', 6, g=1)
        self.assertEqual(compare_kernels(oracle_elementary(1, 6), kernel), 6)
        self.assertEqual(kernel.coefficient((1, 1), (-3,)), QQ(2))
        self.assertEqual(kernel.coefficient((0, 0), (-1,)), QQ(1))
        kernel_properties(kernel, op)

    def test_heun4_properties(self):
        op, table, kernel = one_parameter('heun4', 6)
        kernel_properties(kernel, op)
        windows = kernel_diffeq_check(kernel, op)
        self.assertEqual(sorted(windows), ['adjoint', 'symmetric'])
        self.assertEqual(boundary_check(kernel), 7)

    def test_third_order_properties(self):
        op, table, kernel = one_parameter('third_order3', 4)
        kernel_properties(kernel, op)

    def test_fault_breaks_symmetry(self):
        op, table, kernel = one_parameter('heun4', 4)
        broken = fault_inject(kernel, {'x1': 1, 'x2': 0, 'y': -1})
        with self.assertRaises(kernels_utils.MismatchError):
            symmetry_check(broken)

    def test_uniqueness_probe(self):
        op, table, kernel = one_parameter('heun4', 4)
        self.assertEqual(len(uniqueness_probe(kernel, op, count=5, seed=2)), 5)

    def test_json_roundtrip(self):
        op, table, kernel = one_parameter('heun4', 4)
        restored = Kernel.from_json(kernel.to_json())
        self.assertTrue(restored.series.equals(kernel.series))
        self.assertEqual(restored.depth, kernel.depth)
        extracted = extract_table(restored)
        for (i, j), row in extracted.entries.items():
            self.assertEqual(row, table.row(i, j))

    def test_json_rejects(self):
        with self.assertRaises(kernels_utils.ParamsError):
            Kernel.from_json('{"g": 1}')
        bad = '{"g": 1, "x_trunc": 2, "y_window": [-2, -1], "entries": [[[0, 0], [0], "1/1"]]}'
        with self.assertRaises(kernels_utils.ParamsError):
            Kernel.from_json(bad)

    def test_two_parameter_exponential(self):
        op = preset_operator('first_order_g', {}, 2)
        table = gen_structure_constants(expand_solution(op, 3), 3)
        kernel = build_kernel(table, 3)
        kernel_properties(kernel, op)
        self.assertEqual(kernel.coefficient((0, 0, 0), (-1, -1)), QQ(1))
        self.assertEqual(compare_kernels(oracle_elementary(2, 3), kernel), 3)
