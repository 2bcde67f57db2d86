import logging

from django.conf import settings

from kernels import utils as kernels_utils
from kernels.birational import (FIXTURES, check_stated_points, continue_map_bigf, load_spec, probe_identity_bigf,
                                solve_ybar_perturbative, verify_exponent_identity, verify_power_identity)
from kernels.checks import BaseChecks, RunContext, check

logger = logging.getLogger(__name__)

EXACT = ('exp_product', 'exp_laurent', 'exp_product4', 'root_product4')


def _is_file(target):
    return target not in FIXTURES


def _precision(ctx: RunContext):
    bits = ctx.value('precision', settings.BIGF_PRECISION)
    return bits, bits * settings.BIGF_TOLERANCE_BITS // settings.BIGF_PRECISION


def verify(spec, ctx: RunContext, samples: int):
    bits, tolerance = _precision(ctx)
    if spec.kind == 'exp':
        return verify_exponent_identity(spec, samples, ctx.seed, settings.SAMPLE_BOUND)
    if spec.kind == 'power':
        return verify_power_identity(spec, samples, ctx.seed, settings.SAMPLE_BOUND, bits=bits,
                                     tolerance_bits=tolerance)
    return {'points': check_stated_points(spec, samples, ctx.seed)}


class BirationalChecks(BaseChecks):
    abstract = False

    @staticmethod
    @check('birational.exact', 'convolution identity under a rational change of the middle variable',
           commands=('birat', 'all'), targets=EXACT)
    def exact(ctx: RunContext):
        names = [ctx.target] if ctx.target in EXACT else EXACT
        samples = ctx.value('samples', settings.SAMPLE_COUNT)
        return {name: verify(load_spec(name), ctx, samples) for name in names}

    @staticmethod
    @check('birational.genus_one_points', 'stated rational points of the genus one map and its linear relation',
           commands=('birat', 'all'), targets=('genus_one',))
    def genus_one_points(ctx: RunContext):
        spec = load_spec('genus_one')
        return {'parameter_draws': check_stated_points(spec, ctx.value('samples', 5), ctx.seed)}

    @staticmethod
    @check('birational.genus_one_continuation', 'genus one map continued from a stated point in high precision',
           commands=('birat', 'all'), targets=('genus_one',))
    def genus_one_continuation(ctx: RunContext):
        bits, tolerance = _precision(ctx)
        return continue_map_bigf(load_spec('genus_one'), seed=ctx.seed, bits=bits, tolerance_bits=tolerance)

    @staticmethod
    @check('birational.fixed_point', 'fixed point of the curve map for both orderings',
           commands=('birat', 'all'), targets=('fixed_point',))
    def fixed_point(ctx: RunContext):
        spec = load_spec('fixed_point')
        explicit = check_stated_points(spec, params={'t': 2, 'x1': 3, 'x2': 5, 'x3': 7, 'z': 11,
                                                     'C1': 1, 'C2': 1, 'C3': 1, 'C4': 1})
        return {'explicit': explicit, 'parameter_draws': check_stated_points(spec, ctx.value('samples', 5), ctx.seed)}

    @staticmethod
    @check('birational.exp_sqrt', 'square-root exponential variant under the rational substitution',
           commands=('birat', 'all'), targets=('exp_sqrt',))
    def exp_sqrt(ctx: RunContext):
        bits, _ = _precision(ctx)
        found = probe_identity_bigf(load_spec('exp_sqrt'), seed=ctx.seed, bits=bits)
        failing = sorted(label for label, v in found.items() if not v['holds'])
        if failing:
            raise kernels_utils.SkipCheck('finding: %s do not hold with principal roots (%s)'
                                          % (', '.join(failing),
                                             ', '.join('%s=%s' % (k, found[k]['residual']) for k in failing)))
        return found

    @staticmethod
    @check('birational.perturbative', 'ỹ solved order by order around x2 = x3', commands=('birat', 'all'),
           targets=('exp_product',))
    def perturbative(ctx: RunContext):
        order = ctx.value('N', 3)
        result = solve_ybar_perturbative(load_spec('exp_product'), order,
                                         known=FIXTURES['exp_product']['substitution'][0][1])
        if result['status'] == 'obstructed':
            raise kernels_utils.MismatchError('base equation obstructed at order %d: %s'
                                              % (result['obstruction']['order'], result['obstruction']['residual']))
        return result

    @staticmethod
    @check('birational.file', 'identity read from a JSON description', commands=('birat',), targets=_is_file)
    def from_file(ctx: RunContext):
        if ctx.target is None:
            raise kernels_utils.SkipCheck('no identity file given')
        spec = load_spec(ctx.target)
        if not spec.exact and spec.kind == 'exp':
            bits, _ = _precision(ctx)
            raise kernels_utils.SkipCheck('finding: %s' % probe_identity_bigf(spec, seed=ctx.seed, bits=bits))
        return verify(spec, ctx, ctx.value('samples', settings.SAMPLE_COUNT))
