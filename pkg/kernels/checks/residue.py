import logging

from kernels import utils as kernels_utils
from kernels.checks import BaseChecks, RunContext, check
from kernels.residue import assoc_check, gen_assoc_check, product_identity_check, sym_power_check

logger = logging.getLogger(__name__)


class ResidueChecks(BaseChecks):
    abstract = False

    @staticmethod
    @check('residue.assoc', 'oint K(x1,x2,y) K(y,x3,z) dy is symmetric in x1, x2, x3', commands=('assoc',))
    def assoc(ctx: RunContext):
        op = ctx.operator()
        if op.g != 1:
            raise kernels_utils.ParamsError('assoc needs g = 1; use genassoc')
        N = ctx.value('N', 5)
        return {'N': N, 'rows': assoc_check(ctx.table(op, 2 * N), N)}

    @staticmethod
    @check('residue.genassoc', 'composite constants are symmetric in all upper indices', commands=('genassoc',))
    def genassoc(ctx: RunContext):
        op = ctx.operator()
        N = ctx.value('N', 4)
        table = ctx.gen_table(op, N)
        witness = {'N': N, 'orderings': gen_assoc_check(table, N)}
        if table.g == 2:
            witness['sym_square'] = sym_power_check(table, N)
        return witness

    @staticmethod
    @check('residue.product', 'residues of K prod f(y_k) give prod f(x_i)', commands=('productcheck',))
    def product(ctx: RunContext):
        op = ctx.operator()
        N = ctx.value('N', 6 if op.g == 1 else 4)
        table = ctx.table(op, N) if op.g == 1 else ctx.gen_table(op, N)
        return {'N': product_identity_check(table, ctx.solution(op, N), N)}

    @staticmethod
    @check('residue.presets', 'associativity and the product identity for the preset operators',
           commands=('all',))
    def presets(ctx: RunContext):
        witness = {}
        one_parameter = (('first_order_g', 'first_order_g'), ('heun4', 'heun4'), ('heun4', 'heun4_unit'),
                         ('third_order3', 'third_order3'))
        for family, preset in one_parameter:
            op = ctx.operator(family, g=1 if family == 'first_order_g' else None, preset=preset)
            witness['assoc.%s' % preset] = assoc_check(ctx.table(op, 10), 5)
            witness['product.%s' % preset] = product_identity_check(ctx.table(op, 6), ctx.solution(op, 6), 6)
        op = ctx.operator('first_order_g', g=2)
        table = ctx.gen_table(op, 4)
        witness['genassoc.first_order_g2'] = gen_assoc_check(table, 4)
        witness['sym_square.first_order_g2'] = sym_power_check(table, 4)
        witness['product.first_order_g2'] = product_identity_check(table, ctx.solution(op, 4), 4)
        op = ctx.operator('heun_n')
        witness['genassoc.heun_n'] = gen_assoc_check(ctx.gen_table(op, 3), 3)
        witness['product.heun_n'] = product_identity_check(ctx.gen_table(op, 4), ctx.solution(op, 4), 4)
        return witness
