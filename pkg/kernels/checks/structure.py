import logging

from kernels import utils as kernels_utils
from kernels.checks import BaseChecks, RunContext, check
from kernels.exact import format_rat
from kernels.structure import (check_basis, evaluate_product_identity, interpolate_entry, symmetry_check,
                               triangular_check)

logger = logging.getLogger(__name__)


class StructureChecks(BaseChecks):
    abstract = False

    @staticmethod
    @check('structure.sctable', 'P_i P_j = sum_k C_ij^k P_k', commands=('sctable',))
    def sctable(ctx: RunContext):
        op = ctx.operator()
        if op.g != 1:
            raise kernels_utils.ParamsError('sctable needs g = 1; use gensctable')
        N = ctx.value('N', 6)
        table = ctx.table(op, N)
        sol = ctx.solution(op, 2 * N)
        symmetry_check(table)
        triangular_check(table)
        points = evaluate_product_identity(table, sol, samples=ctx.value('samples', 10), seed=ctx.seed)
        interpolated = interpolate_entry(sol, N, N)
        if interpolated != table.row(N, N):
            raise kernels_utils.MismatchError('C_{%d,%d} by interpolation differs from the table' % (N, N))
        return {'N': N, 'points': points, 'C_NN': {str(k): format_rat(v) for k, v in sorted(table.row(N, N).items())}}

    @staticmethod
    @check('structure.gensctable', 'P_I = sum_J C_I^J P_J in the product basis', commands=('gensctable',))
    def gensctable(ctx: RunContext):
        op = ctx.operator()
        N = ctx.value('N', 4)
        table = ctx.gen_table(op, N)
        symmetry_check(table)
        points = evaluate_product_identity(table, ctx.solution(op, N), samples=ctx.value('samples', 10), seed=ctx.seed)
        return {'N': N, 'g': table.g, 'points': points, 'support_bound': table.support_bound}

    @staticmethod
    @check('structure.basis', 'products of P_j form a linear basis', commands=('gensctable',))
    def basis(ctx: RunContext):
        op = ctx.operator()
        W = ctx.value('N', 4)
        report = check_basis(ctx.solution(op, W), W)
        if not (report['independent'] and report['spanning']):
            raise kernels_utils.BasisError('weights %s are not spanned' % report['span_defect'])
        return {'W': W, 'ranks': [b['rank'] for b in report['blocks']]}

    @staticmethod
    @check('structure.basis_presets', 'products of P_j form a linear basis', commands=('all',))
    def basis_presets(ctx: RunContext):
        ranks = {}
        for family, g in (('first_order_g', 2), ('heun_n', None)):
            op = ctx.operator(family, g=g)
            report = check_basis(ctx.solution(op, 4), 4)
            if not (report['independent'] and report['spanning']):
                raise kernels_utils.BasisError('%s: weights %s are not spanned' % (family, report['span_defect']))
            ranks[family] = [b['rank'] for b in report['blocks']]
        return ranks
