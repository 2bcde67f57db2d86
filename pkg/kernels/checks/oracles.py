"""
Closed-form kernels checked against the ones built from structure constants.
"""
import logging

from kernels.checks import BaseChecks, RunContext, check
from kernels.closed_forms import (check_heun4_equations, check_heun_n_formula, check_third_order_equations,
                                  compare_kernels, oracle_elementary, oracle_heun4, oracle_heun4_unit,
                                  oracle_third_order)
from kernels.kernel import kernel_properties

logger = logging.getLogger(__name__)


def _within(M):
    return lambda exps: -exps['y'] <= M


class OracleChecks(BaseChecks):
    abstract = False

    @staticmethod
    @check('oracle.elementary', 'symmetrized 1/(y - q) with e_k(q) = e_k(x1..x_{g+1})',
           commands=('oracle', 'all'), targets=('elementary',))
    def elementary(ctx: RunContext):
        N = ctx.value('N', 6)
        compared = {}
        for g in (2, 3):
            op = ctx.operator('first_order_g', g=g)
            built = ctx.kernel(op, N)
            compared['g%d' % g] = compare_kernels(oracle_elementary(g, N), built)
        return compared

    @staticmethod
    @check('oracle.heun4', 'heun4 kernel as a finite sum of hypergeometric products',
           commands=('oracle', 'all'), targets=('heun4',))
    def heun4(ctx: RunContext):
        op = ctx.operator('heun4')
        N, M = ctx.value('N', 6), ctx.value('M', 8)
        built = ctx.kernel(op, N)
        return {'N': compare_kernels(oracle_heun4(op.params, N, M), built, within=_within(M)), 'M': M}

    @staticmethod
    @check('oracle.heun4_equations', 'heun4 kernel satisfies its three differential equations',
           commands=('oracle', 'all'), targets=('heun4_equations',))
    def heun4_equations(ctx: RunContext):
        op = ctx.operator('heun4')
        N = ctx.value('N', 8)
        return check_heun4_equations(ctx.kernel(op, N), op)

    @staticmethod
    @check('oracle.heun4_unit', 's1 = r1 = 1 kernel in radicals', commands=('oracle', 'all'),
           targets=('heun4_unit',))
    def heun4_unit(ctx: RunContext):
        op = ctx.operator('heun4', preset='heun4_unit')
        N = ctx.value('N', 6)
        built = ctx.kernel(op, N)
        return {'N': compare_kernels(oracle_heun4_unit(op.params, N), built)}

    @staticmethod
    @check('oracle.third_order', 'third order kernel as a double sum in x1 x2 and (x1-1)(x2-1)',
           commands=('oracle', 'all'), targets=('third_order',))
    def third_order(ctx: RunContext):
        op = ctx.operator('third_order3')
        N, M = ctx.value('N', 6), ctx.value('M', 8)
        built = ctx.kernel(op, N)
        return {'N': compare_kernels(oracle_third_order(op.params, N, M), built, within=_within(M)), 'M': M}

    @staticmethod
    @check('oracle.third_order_equations', 'third order kernel satisfies its inhomogeneous equation',
           commands=('oracle', 'all'), targets=('third_order_equations',))
    def third_order_equations(ctx: RunContext):
        op = ctx.operator('third_order3')
        N = ctx.value('N', 8)
        return check_third_order_equations(ctx.kernel(op, N), op)

    @staticmethod
    @check('oracle.heun_n', 'low-order heun_n kernel from the u-polynomial family', commands=('oracle', 'all'),
           targets=('heun_n',))
    def heun_n(ctx: RunContext):
        op = ctx.operator('heun_n')
        N, M = ctx.value('N', 4), ctx.value('M', 4)
        kernel = ctx.kernel(op, N)
        kernel_properties(kernel, op)
        return {'N': check_heun_n_formula(kernel, op, M), 'M': M}
