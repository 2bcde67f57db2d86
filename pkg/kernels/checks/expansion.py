import logging

from kernels import utils as kernels_utils
from kernels.checks import BaseChecks, RunContext, check
from kernels.ode import degree_check, perturbed, substitution_check

logger = logging.getLogger(__name__)

PRESETS = (
    ('first_order_g', 1, None),
    ('first_order_g', 2, None),
    ('heun4', None, 'heun4'),
    ('heun4', None, 'heun4_unit'),
    ('heun_n', None, 'heun_n'),
    ('third_order3', None, 'third_order3'),
)


class ExpansionChecks(BaseChecks):
    abstract = False

    @staticmethod
    @check('expansion.substitution', 'normalized analytic solution of D f = 0', commands=('expand',))
    def substitution(ctx: RunContext):
        op = ctx.operator()
        N = ctx.value('N', 8)
        sol = ctx.solution(op, N)
        window = substitution_check(op, sol)
        if op.g == 1:
            degree_check(sol)
        return {'N': N, 'window': window, 'P_N': str(sol.P[N].as_expr())}

    @staticmethod
    @check('expansion.uniqueness', 'perturbed coefficients break D f = 0', commands=('expand',))
    def uniqueness(ctx: RunContext):
        op = ctx.operator()
        N = ctx.value('N', 8)
        sol = ctx.solution(op, N)
        caught = []
        for index in range(1, N + 1):
            try:
                substitution_check(op, perturbed(sol, index))
            except kernels_utils.MismatchError:
                caught.append(index)
                continue
            raise kernels_utils.MismatchError('perturbing P_%d went undetected' % index)
        return {'perturbed': caught}

    @staticmethod
    @check('expansion.presets', 'every preset operator expands', commands=('all',))
    def presets(ctx: RunContext):
        windows = {}
        for family, g, preset in PRESETS:
            op = ctx.operator(family, g=g, preset=preset)
            sol = ctx.solution(op, 8)
            windows[preset or '%s_g%d' % (family, op.g)] = substitution_check(op, sol)
            if op.g == 1:
                degree_check(sol)
        return windows
