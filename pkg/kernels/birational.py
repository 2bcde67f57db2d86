"""
Birational kernel identities K K dy = K K dỹ.

An identity is described by an ``IdentitySpec``: the kernel as exp(c E) psi or
prod phi_k^c_k psi over formal arguments, the argument lists of both sides, the
substitution for ỹ (and for the right-hand square roots), and how to sample
points of the curves the square roots live on.  Exact specs are checked in Q at
seeded points; specs whose curves have no rational parametrisation are checked
by high-precision continuation from their stated rational points.
"""
import json
import logging
import random

import mpmath
from sympy import Poly, Rational, Symbol, cancel, diff, factorial, fraction, lambdify, nan, sympify, together, zoo
from sympy import symbols as make_symbols

from kernels import utils as kernels_utils
from kernels.exact import format_bigf, format_rat

logger = logging.getLogger(__name__)

SAMPLE_TRIES = 1000


def _ft(a, b, c):
    """f_t(a, b, c) = (ab + bc + ca - t)^2 + 4abc(1 + t - (a + b + c)) as an expression string."""
    return '(({a})*({b})+({b})*({c})+({c})*({a})-t)**2+4*({a})*({b})*({c})*(1+t-(({a})+({b})+({c})))'.format(
        a=a, b=b, c=c)


def _curve_e(swap=False):
    x2, x3 = ('x3', 'x2') if swap else ('x2', 'x3')
    data = {'x2': x2, 'x3': x3}
    return [
        '(1 - q1 - q2)*(1 - q3 - q4) - y*C1*x1*{x2}*{x3}'.format(**data),
        'q1*q3 - (y - 1)*C2*(x1 - 1)*({x2} - 1)*({x3} - 1)'.format(**data),
        'q2*q4 - (y - t)*C3*(x1 - t)*({x2} - t)*({x3} - t)'.format(**data),
        '(q1*q2 + (x1 - t)*({x2} - t)*(y - t)/(t*(t - 1)**2)*q1 + (x1 - 1)*({x2} - 1)*(y - 1)/(t - 1)**2*q2)'
        '*(q3*q4 + (y - t)*({x3} - t)*(z - t)/(t*(t - 1)**2)*q3 + (y - 1)*({x3} - 1)*(z - 1)/(t - 1)**2*q4)'
        ' - y*(y - 1)*(y - t)*C1*C2*C3*C4*x1*x2*x3*(x1 - 1)*(x2 - 1)*(x3 - 1)*(x1 - t)*(x2 - t)*(x3 - t)'.format(**data),
    ]


# C2 and C3 carry the products prod(x_i - 1) and prod(x_i - t) in the fixed point
_FIXED_POINT = {
    'y': '0',
    'q1': '-C2*(x1 - 1)*(x2 - 1)*(x3 - 1)*(t - 1)/(z - 1)',
    'q2': 'C3*(x1 - t)*(x2 - t)*(x3 - t)*t*(t - 1)/(z - t)',
    'q3': '(z - 1)/(t - 1)',
    'q4': '-(z - t)/(t - 1)',
}

FIXTURES = {
    'exp_product': {
        'kind': 'exp',
        'args': ['a1', 'a2', 'b'],
        'exponent': 'a1*a2*b + b',
        'measure': '1/b',
        'lhs': [['x1', 'x2', 'y'], ['y', 'x3', 'z']],
        'rhs': [['x1', 'x3', 'yt'], ['yt', 'x2', 'z']],
        'substitution': [['yt', '(x1*x2 + x3*z + 1)/(x1*x3 + x2*z + 1)*y']],
        'free': ['x1', 'x2', 'x3', 'y', 'z'],
    },
    'exp_laurent': {
        'kind': 'exp',
        'args': ['a1', 'a2', 'b'],
        'exponent': 'a1*a2*b + a1/(a2*b) + a2/(a1*b) + b/(a1*a2)',
        'measure': '1/b',
        'lhs': [['x1', 'x2', 'y'], ['y', 'x3', 'z']],
        'rhs': [['x1', 'x3', 'yt'], ['yt', 'x2', 'z']],
        'substitution': [['yt', '(x1*x2 + x3*z)/(x1*x3 + x2*z)*y']],
        'free': ['x1', 'x2', 'x3', 'y', 'z'],
    },
    'exp_sqrt': {
        'kind': 'exp',
        'exact': False,
        'args': ['a1', 'a2', 'b'],
        'exponent': '(a1*a2*b + a1 + a2 + b)/s',
        'measure': '1/b',
        'kernel_roots': {'s': 'a1*a2*b'},
        'lhs': [['x1', 'x2', 'y'], ['y', 'x3', 'z']],
        'lhs_roots': [{'s': 's12'}, {'s': 's34'}],
        'rhs': [['x1', 'x3', 'yt'], ['yt', 'x2', 'z']],
        'rhs_roots': [{'s': 's13'}, {'s': 's24'}],
        'substitution': [['yt', '(x1*x2 + x3*z)/(x1*x3 + x2*z)*y']],
        'free': ['x1', 'x2', 'x3', 'y', 'z'],
    },
    'exp_product4': {
        'kind': 'exp',
        'args': ['a1', 'a2', 'a3', 'b'],
        'exponent': 'a1*a2*a3*b + b',
        'measure': '1/b',
        'lhs': [['x1', 'x2', 'x3', 'y'], ['y', 'x4', 'x5', 'z']],
        'rhs': [['x1', 'x2', 'x4', 'yt'], ['yt', 'x3', 'x5', 'z']],
        'substitution': [['yt', '(x1*x2*x3 + x4*x5*z + 1)/(x1*x2*x4 + x3*x5*z + 1)*y']],
        'free': ['x1', 'x2', 'x3', 'x4', 'x5', 'y', 'z'],
        'swap': ['x3', 'x4'],
    },
    'root_product4': {
        'kind': 'power',
        'args': ['a1', 'a2', 'a3', 'b'],
        'bases': ['(1 + w)/b'],
        'measure': '1/w',
        'kernel_roots': {'w': '1 + a1*a2*a3*b'},
        'lhs': [['x1', 'x2', 'x3', 'y'], ['y', 'x4', 'x5', 'z']],
        'lhs_roots': [{'w': 'w123'}, {'w': 'w45'}],
        'rhs': [['x1', 'x2', 'x4', 'yt'], ['yt', 'x3', 'x5', 'z']],
        'rhs_roots': [{'w': 'w124'}, {'w': 'w35'}],
        'substitution': [
            ['w124', '((x1*x2 - x5*z)*x4*w123 + (x3 - x4)*x1*x2*w45)/(x1*x2*x3 - x4*x5*z)'],
            ['w35', '((x3 - x4)*x5*z*w123 + (x1*x2 - x5*z)*x3*w45)/(x1*x2*x3 - x4*x5*z)'],
            ['yt', '(2*(x3 - x4)*(x1*x2 - x5*z)*(w123*w45 - 1) + x3*x4*(x1*x2 - x5*z)**2*y'
                   ' + x1*x2*x5*z*(x3 - x4)**2*y)/(x1*x2*x3 - x4*x5*z)**2'],
        ],
        'free': ['x1', 'x2', 'x3', 'x4', 'x5', 'w123', 'w45'],
        'relations': [['w123', 'y'], ['w45', 'z']],
    },
    'genus_one': {
        'kind': 'power',
        'exact': False,
        'args': ['a1', 'a2', 'b'],
        'bases': [
            '(a1*a2*(2*b - 1) - (a1 + a2)*b + t + w)/((a1 - 1)*(a2 - 1)*b)',
            '(a1*a2*(2*b - t) - t*(a1 + a2)*b + t**2 + t*w)/((a1 - t)*(a2 - t)*b)',
        ],
        'measure': '1/w',
        'kernel_roots': {'w': _ft('a1', 'a2', 'b')},
        'lhs': [['x1', 'x2', 'y'], ['y', 'x3', 'x4']],
        'lhs_roots': [{'w': 'w12'}, {'w': 'w34'}],
        'rhs': [['x1', 'x3', 'yt'], ['yt', 'x2', 'x4']],
        'rhs_roots': [{'w': 'w13'}, {'w': 'w24'}],
        'parameters': ['t', 'x1', 'x2', 'x3', 'x4'],
        'curves': {
            'E1': ['w12**2 - ' + _ft('x1', 'x2', 'y'), 'w34**2 - ' + _ft('y', 'x3', 'x4')],
            'E2': ['w13**2 - ' + _ft('x1', 'x3', 'yt'), 'w24**2 - ' + _ft('yt', 'x2', 'x4')],
        },
        'linear_relations': ['(x2 - x4)*w13 - (x1 - x3)*w24 - (x3 - x4)*w12 + (x1 - x2)*w34'],
        'maps': [
            [{'y': '0', 'w12': 'x1*x2 - t', 'w34': 'x3*x4 - t'},
             {'yt': '0', 'w13': 'x1*x3 - t', 'w24': 'x2*x4 - t'}],
            [{'y': '1', 'w12': 'x1*x2 - x1 - x2 + t', 'w34': 'x3*x4 - x3 - x4 + t'},
             {'yt': '1', 'w13': 'x1*x3 - x1 - x3 + t', 'w24': 'x2*x4 - x2 - x4 + t'}],
            [{'y': 't', 'w12': 'x1*x2 - t*x1 - t*x2 + t', 'w34': 'x3*x4 - t*x3 - t*x4 + t'},
             {'yt': 't', 'w13': 'x1*x3 - t*x1 - t*x3 + t', 'w24': 'x2*x4 - t*x2 - t*x4 + t'}],
        ],
    },
    'fixed_point': {
        'kind': 'points',
        'parameters': ['t', 'x1', 'x2', 'x3', 'z', 'C1', 'C2', 'C3', 'C4'],
        'curves': {'E': _curve_e(), 'E~': _curve_e(swap=True)},
        'maps': [[_FIXED_POINT, _FIXED_POINT]],
        'map_curves': ['E', 'E~'],
    },
}
FIXTURES['genus_one']['map_curves'] = ['E1', 'E2']


class _Pole(Exception):
    pass


def _sym(text):
    try:
        return sympify(text)
    except (SyntaxError, TypeError, ValueError) as e:
        raise kernels_utils.ParamsError('cannot parse %r: %s' % (text, e))


def _value(expr, point):
    v = expr.xreplace(point)
    if v.has(zoo, nan) or not v.is_Rational:
        raise _Pole(str(expr))
    return v


class IdentitySpec(object):
    KINDS = ('exp', 'power', 'points')

    def __init__(self, name, data: dict):
        self.name = name
        self.data = data
        self.kind = data.get('kind')
        if self.kind not in self.KINDS:
            raise kernels_utils.ParamsError('identity %s: kind must be one of %s' % (name, ', '.join(self.KINDS)))
        self.exact = data.get('exact', True)
        self.args = [Symbol(a) for a in data.get('args', [])]
        self.exponent = _sym(data['exponent']) if data.get('exponent') else None
        self.bases = [_sym(b) for b in data.get('bases', [])]
        self.measure = _sym(data['measure']) if data.get('measure') else None
        self.kernel_roots = {Symbol(k): _sym(v) for k, v in data.get('kernel_roots', {}).items()}
        self.lhs = [[Symbol(a) for a in side] for side in data.get('lhs', [])]
        self.rhs = [[Symbol(a) for a in side] for side in data.get('rhs', [])]
        self.lhs_roots = [{Symbol(k): Symbol(v) for k, v in r.items()} for r in data.get('lhs_roots', [{}] * len(self.lhs))]
        self.rhs_roots = [{Symbol(k): Symbol(v) for k, v in r.items()} for r in data.get('rhs_roots', [{}] * len(self.rhs))]
        self.substitution = [(Symbol(k), _sym(v)) for k, v in data.get('substitution', [])]
        self.free = [Symbol(v) for v in data.get('free', [])]
        self.relations = [(Symbol(r), Symbol(v)) for r, v in data.get('relations', [])]
        self.parameters = [Symbol(v) for v in data.get('parameters', [])]
        self.curves = {k: [_sym(e) for e in eqs] for k, eqs in data.get('curves', {}).items()}
        self.linear_relations = [_sym(e) for e in data.get('linear_relations', [])]
        self.maps = [[{Symbol(k): _sym(v) for k, v in p.items()} for p in pair] for pair in data.get('maps', [])]
        self.map_curves = data.get('map_curves', [])
        self.validate()

    def validate(self):
        if self.kind == 'points':
            if not self.curves or not self.maps:
                raise kernels_utils.ParamsError('identity %s: point sets need curves and maps' % self.name)
            return
        if self.kind == 'exp' and self.exponent is None:
            raise kernels_utils.ParamsError('identity %s: exp kernels need an exponent' % self.name)
        if self.kind == 'power' and not self.bases:
            raise kernels_utils.ParamsError('identity %s: power kernels need bases' % self.name)
        if self.measure is None:
            raise kernels_utils.ParamsError('identity %s: measure is required' % self.name)
        if len(self.lhs) != 2 or len(self.rhs) != 2:
            raise kernels_utils.ParamsError('identity %s: both sides compose two kernels' % self.name)
        for side in self.lhs + self.rhs:
            if len(side) != len(self.args):
                raise kernels_utils.ParamsError('identity %s: %s does not match arguments %s'
                                                % (self.name, side, self.args))
        if self.lhs[0][-1] != self.lhs[1][0] or self.rhs[0][-1] != self.rhs[1][0]:
            raise kernels_utils.ParamsError('identity %s: inner output must feed the outer kernel' % self.name)
        if self.yt not in [k for k, _ in self.substitution] and self.exact:
            raise kernels_utils.ParamsError('identity %s: no substitution for %s' % (self.name, self.yt))

    @property
    def y(self):
        return self.lhs[0][-1]

    @property
    def yt(self):
        return self.rhs[0][-1]

    @classmethod
    def from_dict(cls, name, data):
        if not isinstance(data, dict):
            raise kernels_utils.ParamsError('identity %s must be an object' % name)
        return cls(name, data)

    def instance(self, expr, k, side='lhs'):
        args = (self.lhs if side == 'lhs' else self.rhs)[k]
        roots = (self.lhs_roots if side == 'lhs' else self.rhs_roots)[k]
        mapping = dict(zip(self.args, args))
        mapping.update(roots)
        return expr.xreplace(mapping)

    def root_relations(self, side='lhs'):
        """[(root symbol, radicand)] for every square root on one side."""
        out = []
        for k in range(2):
            roots = (self.lhs_roots if side == 'lhs' else self.rhs_roots)[k]
            for formal, name in roots.items():
                out.append((name, self.instance(self.kernel_roots[formal], k, side)))
        return out


def load_spec(name_or_path: str) -> IdentitySpec:
    if name_or_path in FIXTURES:
        return IdentitySpec(name_or_path, FIXTURES[name_or_path])
    try:
        with open(name_or_path) as f:
            data = json.load(f)
    except (OSError, ValueError) as e:
        raise kernels_utils.ParamsError('unknown fixture and unreadable file %r: %s' % (name_or_path, e))
    return IdentitySpec.from_dict(data.pop('name', name_or_path), data)


def _total_derivative(spec: IdentitySpec, expr):
    """d expr / dy along the left curve: dw/dy = (d radicand/dy) / (2w)."""
    y = spec.y
    result = diff(expr, y)
    for root, radicand in spec.root_relations('lhs'):
        result += diff(expr, root) * diff(radicand, y) / (2 * root)
    return result


def identity_sides(spec: IdentitySpec) -> list:
    """[(label, left, right)] in curve coordinates, with ỹ and the right-hand roots still symbolic."""
    sides = []
    if spec.kind == 'exp':
        sides.append(('exponent', spec.instance(spec.exponent, 0) + spec.instance(spec.exponent, 1),
                      spec.instance(spec.exponent, 0, 'rhs') + spec.instance(spec.exponent, 1, 'rhs')))
    else:
        for k, base in enumerate(spec.bases):
            sides.append(('base%d' % (k + 1), spec.instance(base, 0) * spec.instance(base, 1),
                          spec.instance(base, 0, 'rhs') * spec.instance(base, 1, 'rhs')))
    substitution = dict(spec.substitution)
    jacobian = _total_derivative(spec, substitution[spec.yt]) if spec.yt in substitution else Symbol('dyt_dy')
    sides.append(('measure', spec.instance(spec.measure, 0) * spec.instance(spec.measure, 1),
                  spec.instance(spec.measure, 0, 'rhs') * spec.instance(spec.measure, 1, 'rhs') * jacobian))
    return sides


def parametrize(spec: IdentitySpec) -> dict:
    """Every non-free coordinate as a rational function of the free variables."""
    values = {}
    radicands = dict(spec.root_relations('lhs'))
    for root, target in spec.relations:
        if root not in radicands:
            raise kernels_utils.ParamsError('relation names %s, which is not a left root' % root)
        equation = (radicands[root] - root ** 2).xreplace(values)
        poly = Poly(equation, target)
        if poly.degree() != 1:
            raise kernels_utils.ParamsError('%s is not linear in %s' % (radicands[root], target))
        c1, c0 = poly.all_coeffs()
        values[target] = cancel(-c0 / c1)
    for name, expr in spec.substitution:
        values[name] = expr.xreplace(values)
    return values


def _full_point(spec: IdentitySpec, values: dict, free_point: dict) -> dict:
    point = dict(free_point)
    for name, expr in values.items():
        point[name] = _value(expr, free_point)
    return point


def _rand_point(names, bound, rng):
    return {n: Rational(rng.randint(1, bound), rng.randint(1, bound)) for n in names}


def sample_points(spec: IdentitySpec, samples: int, seed: int, bound: int):
    """Seeded curve points with every coordinate and every identity side finite."""
    values = parametrize(spec)
    sides = identity_sides(spec)
    rng = random.Random(seed)
    points = []
    for _ in range(SAMPLE_TRIES * samples):
        if len(points) == samples:
            break
        try:
            point = _full_point(spec, values, _rand_point(spec.free, bound, rng))
            for _, left, right in sides:
                _value(left, point)
                _value(right, point)
        except _Pole:
            continue
        points.append(point)
    else:
        raise kernels_utils.ParamsError('could not sample %d pole-free points for %s' % (samples, spec.name))
    return points


def _fmt_point(point) -> str:
    return '{%s}' % ', '.join('%s: %s' % (k, format_rat(v)) for k, v in sorted((str(k), v) for k, v in point.items()))


def identity_degree(spec: IdentitySpec, values=None) -> int:
    """Total degree of num(L) den(R) - num(R) den(L) over the free variables, maximized over all sides."""
    values = parametrize(spec) if values is None else values
    degree = 0
    for _, left, right in identity_sides(spec):
        nl, dl = fraction(together(left.xreplace(values)))
        nr, dr = fraction(together(right.xreplace(values)))
        degs = []
        for a, b in ((nl, dr), (nr, dl)):
            degs.append(sum(Poly(p, *spec.free).total_degree() for p in (a, b)))
        degree = max([degree] + degs)
    return degree


def verify_identity(spec: IdentitySpec, samples: int, seed: int, bound: int) -> dict:
    """Exact check of every side of the identity and of the right-hand curve relations at seeded points."""
    if not spec.exact:
        raise kernels_utils.ParamsError('%s has irrational curve points; use the high-precision check' % spec.name)
    points = sample_points(spec, samples, seed, bound)
    sides = identity_sides(spec)
    rhs_curves = spec.root_relations('rhs')
    for point in points:
        for root, radicand in rhs_curves:
            if _value(root ** 2 - radicand, point):
                raise kernels_utils.MismatchError('%s is off its curve at %s' % (root, _fmt_point(point)))
        for label, left, right in sides:
            if _value(left, point) != _value(right, point):
                raise kernels_utils.MismatchError('%s identity of %s fails at %s' % (label, spec.name, _fmt_point(point)))
    degree = identity_degree(spec)
    space = bound * bound
    per_point = min(1.0, degree / space)
    logger.debug('%s verified at %d points, degree %d', spec.name, len(points), degree)
    return {
        'points': len(points),
        'identities': [label for label, _, _ in sides],
        'degree': degree,
        'sample_space': space,
        'false_pass_bound': per_point ** len(points),
    }


def verify_exponent_identity(spec: IdentitySpec, samples: int, seed: int, bound: int) -> dict:
    if spec.kind != 'exp':
        raise kernels_utils.ParamsError('%s is not an exponential kernel' % spec.name)
    return verify_identity(spec, samples, seed, bound)


def verify_power_identity(spec: IdentitySpec, samples: int, seed: int, bound: int, bits: int = 200,
                          tolerance_bits: int = 150) -> dict:
    if spec.kind != 'power':
        raise kernels_utils.ParamsError('%s is not a power kernel' % spec.name)
    if spec.exact:
        return verify_identity(spec, samples, seed, bound)
    return continue_map_bigf(spec, seed=seed, bits=bits, tolerance_bits=tolerance_bits)


def _draw_parameters(spec: IdentitySpec, seed: int, bound: int, accept):
    rng = random.Random(seed)
    for _ in range(SAMPLE_TRIES):
        params = _rand_point(spec.parameters, bound, rng)
        try:
            if accept(params):
                return params
        except _Pole:
            continue
    raise kernels_utils.ParamsError('cannot draw admissible parameters for %s' % spec.name)


def check_stated_points(spec: IdentitySpec, samples: int = 5, seed: int = 1, bound: int = 50, params=None) -> int:
    """Each stated point lies on its curve and each stated pair satisfies the linear relations, exactly in Q."""
    if not spec.maps:
        raise kernels_utils.ParamsError('%s states no rational points' % spec.name)
    source, target = spec.map_curves

    def check(values):
        for pair in spec.maps:
            start = {k: _value(v, values) for k, v in pair[0].items()}
            end = {k: _value(v, values) for k, v in pair[1].items()}
            for curve, point in ((source, start), (target, end)):
                full = dict(values)
                full.update(point)
                for equation in spec.curves[curve]:
                    residual = _value(equation, full)
                    if residual:
                        raise kernels_utils.MismatchError('stated point %s is off %s at %s: residual %s'
                                                          % (_fmt_point(point), curve, _fmt_point(values),
                                                             format_rat(residual)))
            full = dict(values)
            full.update(start)
            full.update(end)
            for relation in spec.linear_relations:
                if _value(relation, full):
                    raise kernels_utils.MismatchError('linear relation fails between %s and %s'
                                                      % (_fmt_point(start), _fmt_point(end)))
        return True

    if params is not None:
        check({Symbol(k): Rational(str(v)) for k, v in params.items()})
        return 1
    for s in range(samples):
        values = _draw_parameters(spec, seed * 1000 + s, bound, lambda p: _admissible(spec, p))
        check(values)
    return samples


def _admissible(spec, params):
    """Parameters at which every stated point is finite."""
    for pair in spec.maps:
        for point in pair:
            for v in point.values():
                _value(v, params)
    t = params.get(Symbol('t'))
    if t is not None and t in (0, 1):
        return False
    return True


def _nearest_sqrt(value, previous):
    root = mpmath.sqrt(value)
    return root if abs(root - previous) <= abs(root + previous) else -root


def continue_map_bigf(spec: IdentitySpec, seed: int = 1, bits: int = 200, tolerance_bits: int = 150,
                      steps: int = 40, checks: int = 5, y_end='1/8', params=None) -> dict:
    """
    Follows the map from its first stated rational point along y in [0, y_end].
    The right-hand point is the root of its curve equations and the linear relations
    continued by Newton steps; the identity sides are evaluated at ``checks``
    points of the path, with dỹ/dy from the implicit function theorem.
    """
    start, image = spec.maps[0]
    y, yt = spec.y, spec.yt
    unknowns = [yt] + [name for name, _ in spec.root_relations('rhs')]
    equations = [name ** 2 - radicand for name, radicand in spec.root_relations('rhs')] + spec.linear_relations
    if len(equations) != len(unknowns):
        raise kernels_utils.ParamsError('%s: %d equations for %d unknowns' % (spec.name, len(equations), len(unknowns)))
    lhs_roots = spec.root_relations('lhs')
    if params is None:
        values = _draw_parameters(spec, seed, 12, lambda p: _separated(spec, p))
    else:
        values = {Symbol(k): Rational(str(v)) for k, v in params.items()}
    inputs = spec.parameters + [y] + [name for name, _ in lhs_roots]
    variables = inputs + unknowns

    G = lambdify(variables, equations, modules='mpmath')
    J = lambdify(variables, [[diff(e, u) for u in unknowns] for e in equations], modules='mpmath')
    G_y = lambdify(variables, [_total_derivative(spec, e) for e in equations], modules='mpmath')
    sides = identity_sides(spec)
    jacobian_symbol = Symbol('dyt_dy')
    side_fns = [(label, lambdify(variables + [jacobian_symbol], [left, right], modules='mpmath'))
                for label, left, right in sides]
    radicand_fns = [lambdify(spec.parameters + [y], radicand, modules='mpmath') for _, radicand in lhs_roots]

    tolerance = mpmath.mpf(2) ** -tolerance_bits
    residuals = []
    with mpmath.workprec(bits):
        fixed = [mpmath.mpf(int(values[p].p)) / int(values[p].q) for p in spec.parameters]
        roots = [mpmath.mpf(int(v.p)) / int(v.q) for v in (_value(start[name], values) for name, _ in lhs_roots)]
        current = [mpmath.mpf(int(v.p)) / int(v.q) for v in (_value(image[u], values) for u in unknowns)]
        end = mpmath.mpf(Rational(y_end).p) / Rational(y_end).q
        every = max(1, steps // checks)
        for k in range(1, steps + 1):
            yk = end * k / steps
            roots = [_nearest_sqrt(f(*fixed, yk), r) for f, r in zip(radicand_fns, roots)]
            known = fixed + [yk] + roots

            def g(*u):
                return G(*(known + list(u)))

            def jac(*u):
                return J(*(known + list(u)))

            try:
                current = list(mpmath.findroot(g, current, J=jac, maxsteps=100))
            except (ValueError, ZeroDivisionError) as e:
                raise kernels_utils.MismatchError('continuation of %s lost the branch at y=%s: %s'
                                                  % (spec.name, mpmath.nstr(yk, 10), e))
            if k % every:
                continue
            point = known + current
            du = mpmath.lu_solve(mpmath.matrix(J(*point)), -mpmath.matrix(G_y(*point)))
            for label, fn in side_fns:
                left, right = fn(*(point + [du[0]]))
                residual = abs(left - right) / max(1, abs(left))
                residuals.append(residual)
                if residual > tolerance:
                    raise kernels_utils.MismatchError('%s identity of %s misses by %s at y=%s'
                                                      % (label, spec.name, mpmath.nstr(residual, 5),
                                                         mpmath.nstr(yk, 10)))
        worst = max(residuals) if residuals else mpmath.mpf(0)
        return {
            'points': len(residuals) // len(side_fns),
            'identities': [label for label, _ in side_fns],
            'precision': bits,
            'residual': format_bigf(worst, bits),
            'residual_log2': float(mpmath.log(worst, 2)) if worst else None,
        }


def _separated(spec, params):
    """Admissible and far from the branch points of the stated start."""
    if not _admissible(spec, params):
        return False
    xs = [params[s] for s in spec.parameters if str(s).startswith('x')]
    t = params[Symbol('t')]
    if len(set(xs + [t, 0, 1])) != len(xs) + 3:
        return False
    start, image = spec.maps[0]
    return all(abs(_value(v, params)) >= 2 for v in list(start.values()) + list(image.values()) if v != 0)


def probe_identity_bigf(spec: IdentitySpec, samples: int = 5, seed: int = 1, bound: int = 20, bits: int = 200) -> dict:
    """Evaluates every side with principal square roots; reported as a finding, never as pass/fail."""
    sides = identity_sides(spec)
    values = parametrize(spec)
    rng = random.Random(seed)
    worst = {label: mpmath.mpf(0) for label, _, _ in sides}
    with mpmath.workprec(bits):
        for _ in range(samples):
            point = {}
            for name, v in _rand_point(spec.free, bound, rng).items():
                point[name] = mpmath.mpf(int(v.p)) / int(v.q)
            for name, expr in values.items():
                point[name] = lambdify(list(point), expr, modules='mpmath')(*point.values())
            for side in ('lhs', 'rhs'):
                for root, radicand in spec.root_relations(side):
                    point[root] = mpmath.sqrt(lambdify(list(point), radicand, modules='mpmath')(*point.values()))
            if spec.yt not in values:
                raise kernels_utils.ParamsError('%s has no substitution for %s' % (spec.name, spec.yt))
            derivative = _total_derivative(spec, dict(spec.substitution)[spec.yt])
            point[Symbol('dyt_dy')] = lambdify(list(point), derivative, modules='mpmath')(*point.values())
            for label, left, right in sides:
                fn = lambdify(list(point), [left, right], modules='mpmath')
                l, r = fn(*point.values())
                worst[label] = max(worst[label], abs(l - r) / max(1, abs(l)))
        return {label: {'residual': mpmath.nstr(v, 8), 'holds': bool(v < mpmath.mpf(2) ** -(bits // 2))}
                for label, v in worst.items()}


def solve_ybar_perturbative(spec: IdentitySpec, order: int, known=None) -> dict:
    """
    Expands ỹ = y + sum_k q_k (x2 - x3)^k and solves the base equation order by
    order (it is linear in the newest q_k), then checks the measure equation
    with the solved coefficients.  Returns q_k as strings, with 'undetermined'
    where the base equation leaves q_k free and the obstruction where it has
    no solution.
    """
    if spec.kind not in ('exp', 'power') or spec.kernel_roots:
        raise kernels_utils.ParamsError('perturbative solver needs a rational kernel')
    x2, x3 = (Symbol(v) for v in spec.data.get('swap', ['x2', 'x3']))
    eps = Symbol('eps')
    lhs, rhs = spec.lhs, spec.rhs
    qs = make_symbols('q1:%d' % (order + 1)) if order else ()
    ybar = spec.y + sum(q * eps ** (k + 1) for k, q in enumerate(qs))
    if spec.kind == 'exp':
        equations = [spec.instance(spec.exponent, 0) + spec.instance(spec.exponent, 1)
                     - spec.instance(spec.exponent, 0, 'rhs') - spec.instance(spec.exponent, 1, 'rhs')]
    else:
        equations = [spec.instance(b, 0) * spec.instance(b, 1) - spec.instance(b, 0, 'rhs') * spec.instance(b, 1, 'rhs')
                     for b in spec.bases]
    if x3 not in [a for side in lhs + rhs for a in side]:
        raise kernels_utils.ParamsError('expansion variable %s - %s needs both among the arguments' % (x2, x3))
    equations = [e.xreplace({spec.yt: ybar}).xreplace({x3: x2 - eps}) for e in equations]

    solved = {}
    result = {'order': order, 'q': {}, 'status': 'solved'}
    for e in equations:
        zero_order = cancel(e.xreplace({eps: 0}))
        if zero_order != 0:
            result['status'] = 'obstructed'
            result['obstruction'] = {'order': 0, 'residual': str(zero_order)}
            return result
    for k, q in enumerate(qs, start=1):
        coeffs = [(diff(e, eps, k).xreplace({eps: 0}) / factorial(k)).xreplace(solved) for e in equations]
        slopes = [cancel(diff(c, q)) for c in coeffs]
        if any(cancel(diff(s, q)) != 0 for s in slopes):
            raise kernels_utils.ParamsError('order %d is not linear in q%d' % (k, k))
        pivot = next((i for i, s in enumerate(slopes) if s != 0), None)
        if pivot is None:
            rest = next((r for r in (cancel(c.xreplace({q: 0})) for c in coeffs) if r != 0), 0)
            if rest != 0:
                result['status'] = 'obstructed'
                result['obstruction'] = {'order': k, 'residual': str(rest)}
                return result
            result['q'][str(q)] = 'undetermined'
            solved[q] = 0
            result['status'] = 'undetermined'
            continue
        solved[q] = cancel(-coeffs[pivot].xreplace({q: 0}) / slopes[pivot])
        result['q'][str(q)] = str(solved[q])
        for c in coeffs:
            residual = cancel(c.xreplace(solved))
            if residual != 0:
                result['status'] = 'obstructed'
                result['obstruction'] = {'order': k, 'residual': str(residual)}
                return result

    if result['status'] == 'solved' and spec.measure is not None:
        ytilde = spec.y + sum(solved[q] * eps ** (k + 1) for k, q in enumerate(qs))
        measure_eq = (spec.instance(spec.measure, 0) * spec.instance(spec.measure, 1)
                      - spec.instance(spec.measure, 0, 'rhs') * spec.instance(spec.measure, 1, 'rhs')
                      * diff(ytilde, spec.y))
        measure_eq = measure_eq.xreplace({spec.yt: ytilde}).xreplace({x3: x2 - eps})
        for k in range(order + 1):
            residual = cancel(diff(measure_eq, eps, k).xreplace({eps: 0}))
            if residual != 0:
                result['status'] = 'obstructed'
                result['obstruction'] = {'order': k, 'residual': str(residual), 'equation': 'measure'}
                return result

    if known is not None:
        expansion = _sym(known).xreplace({x3: x2 - eps})
        for k, q in enumerate(qs, start=1):
            expected = cancel(diff(expansion, eps, k).xreplace({eps: 0}) / factorial(k))
            if result['q'][str(q)] != 'undetermined' and cancel(expected - solved[q]) != 0:
                raise kernels_utils.MismatchError('q%d = %s disagrees with the expansion of %s (%s)'
                                                  % (k, solved[q], known, expected))
    return result
