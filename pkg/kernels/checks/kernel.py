import logging

from kernels import utils as kernels_utils
from kernels.checks import BaseChecks, RunContext, check
from kernels.closed_forms import compare_kernels, oracle_elementary
from kernels.kernel import Kernel, extract_table, kernel_diffeq_check, kernel_properties, uniqueness_probe

logger = logging.getLogger(__name__)


class KernelChecks(BaseChecks):
    abstract = False

    @staticmethod
    @check('kernel.properties', 'kernel signs, symmetry, differential equations and boundary slice',
           commands=('kernel',))
    def properties(ctx: RunContext):
        op = ctx.operator()
        N = ctx.value('N', 6 if op.g == 1 else 4)
        kernel = ctx.kernel(op, N)
        kernel_properties(kernel, op)
        return {'N': N, 'g': kernel.g, 'terms': len(kernel.series.poly), 'windows': kernel_diffeq_check(kernel, op)}

    @staticmethod
    @check('kernel.roundtrip', 'kernel file reproduces the structure constants', commands=('kernel',))
    def roundtrip(ctx: RunContext):
        op = ctx.operator()
        N = ctx.value('N', 6 if op.g == 1 else 4)
        kernel = ctx.kernel(op, N)
        restored = Kernel.from_json(kernel.to_json())
        if not restored.series.equals(kernel.series):
            raise kernels_utils.MismatchError('kernel read back from json differs')
        if op.g == 1:
            table = ctx.table(op, N)
            extracted = extract_table(restored)
            for (i, j), row in extracted.entries.items():
                if row != table.row(i, j):
                    raise kernels_utils.MismatchError('C_{%d,%d} read off the kernel differs from the table' % (i, j))
        return {'N': N, 'depth': restored.depth}

    @staticmethod
    @check('kernel.uniqueness', 'the kernel is the only series with these properties', commands=('kernel',))
    def uniqueness(ctx: RunContext):
        op = ctx.operator()
        N = ctx.value('N', 6 if op.g == 1 else 4)
        caught = uniqueness_probe(ctx.kernel(op, N), op, count=ctx.value('samples', 5), seed=ctx.seed)
        return {'faults': len(caught)}

    @staticmethod
    @check('kernel.first_order', 'K = 1/(y - x1 - x2) for f\' = lam f', commands=('all',))
    def first_order(ctx: RunContext):
        op = ctx.operator('first_order_g', g=1)
        kernel = ctx.kernel(op, 8)
        kernel_properties(kernel, op)
        compared = compare_kernels(oracle_elementary(1, 8), kernel)
        caught = uniqueness_probe(kernel, op, count=5, seed=ctx.seed)
        return {'N': compared, 'faults': len(caught)}
