import logging

from kernels import utils as kernels_utils
from kernels.checks import BaseChecks, RunContext, check
from kernels.verlinde import assoc_test, build_algebra, fiber_grid, fiber_samples, support_check

logger = logging.getLogger(__name__)


def _assoc_target(target):
    return target == 'assoc' or target.isdigit()


class VerlindeChecks(BaseChecks):
    abstract = False

    @staticmethod
    @check('verlinde.assoc', 'grid algebra of the tetrahedron kernel is commutative and associative',
           commands=('verlinde', 'all'), targets=_assoc_target)
    def assoc(ctx: RunContext):
        if ctx.target and ctx.target.isdigit():
            sizes = [int(ctx.target)]
        else:
            sizes = range(1, ctx.value('max_n', 20) + 1)
        triples = 0
        for n in sizes:
            algebra = build_algebra(n)
            if not algebra.is_commutative():
                raise kernels_utils.MismatchError('grid algebra n=%d is not commutative' % n)
            support_check(algebra)
            triples += assoc_test(algebra)
        return {'sizes': [min(sizes), max(sizes)], 'triples': triples}

    @staticmethod
    @check('verlinde.fibers', 'both fibres of the tetrahedron kernel have equal length',
           commands=('verlinde', 'all'), targets=('fibers',))
    def fibers(ctx: RunContext):
        samples = fiber_samples(ctx.value('samples', 500), ctx.seed)
        return {'samples': samples, 'grid': fiber_grid(6)}
