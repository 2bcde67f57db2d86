"""
Differential operators and the normalized analytic solution of D f = 0.

An operator is ``sum_k p_k(x, lam) (d/dx)^k`` with p_k polynomial in x and in
the spectral variables lam1..lamg.  ``expand_solution`` finds
``f = sum_i P_i(lam) x^i`` with ``P_0 = 1`` by coefficient matching.
"""
import logging

from sympy import QQ

from kernels import utils as kernels_utils
from kernels.exact import Series, format_rat, lift, make_ring, parse_rat, poly_from_string, rename

logger = logging.getLogger(__name__)

FAMILIES = ('first_order_g', 'heun4', 'heun_n', 'third_order3', 'custom')

PRESET_PARAMS = {
    'heun4': {'t': '2', 's1': '1/3', 's2': '1/5', 's3': '1/7', 'r1': '1/2'},
    'heun_n': {'t1': '2', 't2': '3', 's1': '1/3', 's2': '1/5', 's3': '1/7', 's4': '1/11', 'r1': '1/2'},
    'third_order3': {'a1': '1/2', 'a2': '1/3', 'a3': '1/5', 'a4': '1/7', 'a5': '1/11', 'a6': '1/13'},
    # the s1 = r1 = 1 specialisation of heun4 with a closed-form kernel
    'heun4_unit': {'t': '2', 's1': '1', 's2': '1/5', 's3': '1/7', 'r1': '1'},
}


def lambda_names(g: int) -> tuple:
    return tuple('lam%d' % (k + 1) for k in range(g))


class DiffOp(object):
    def __init__(self, terms: dict, g: int = 1, var='x', params=None, family='custom'):
        self.var = var
        self.lambdas = lambda_names(g)
        self.ring = make_ring((var,) + self.lambdas)
        self.terms = {}
        for k, p in terms.items():
            p = lift(p, self.ring) if hasattr(p, 'ring') else self.ring.ground_new(parse_rat(p))
            if p:
                self.terms[int(k)] = p
        if not self.terms:
            raise kernels_utils.ParamsError('zero operator')
        self.params = {k: parse_rat(v) for k, v in (params or {}).items()}
        self.family = family

    @classmethod
    def from_strings(cls, pairs, g: int = 1, var='x'):
        names = (var,) + lambda_names(g)
        terms = {}
        for k, text in pairs:
            k = int(k)
            terms[k] = terms.get(k, make_ring(names).zero) + poly_from_string(text, names)
        return cls(terms, g=g, var=var, params={}, family='custom')

    @property
    def g(self) -> int:
        return len(self.lambdas)

    @property
    def order(self) -> int:
        return max(self.terms)

    def _is_free(self, monom) -> bool:
        return not any(monom[1:])

    def free_part(self):
        """D0: the operator with every lam-dependent term removed."""
        terms = {}
        for k, p in self.terms.items():
            free = self.ring.from_dict({m: c for m, c in p.items() if self._is_free(m)})
            if free:
                terms[k] = free
        return DiffOp(terms, g=self.g, var=self.var, params=self.params, family=self.family)

    def shifted_coefficients(self) -> dict:
        """{(k, k - e): coefficient of x^e d^k/dx^k as a polynomial in lam}."""
        lam_ring = make_ring(self.lambdas)
        grouped = {}
        for k, p in self.terms.items():
            for m, c in p.items():
                key = (k, k - m[0])
                grouped.setdefault(key, {})
                grouped[key][m[1:]] = grouped[key].get(m[1:], QQ.zero) + c
        return {key: lam_ring.from_dict(d) for key, d in grouped.items() if lam_ring.from_dict(d)}

    def coefficient(self, k: int, var=None):
        """p_k renamed to var."""
        p = self.terms.get(k, self.ring.zero)
        return rename(p, {self.var: var}) if var and var != self.var else p

    def fingerprint(self) -> dict:
        data = {'family': self.family, 'g': self.g, 'params': {k: format_rat(v) for k, v in sorted(self.params.items())}}
        if self.family == 'custom':
            data['terms'] = {str(k): str(p.as_expr()) for k, p in sorted(self.terms.items())}
        return data

    def __str__(self):
        return ' + '.join('(%s)*D^%d' % (p.as_expr(), k) for k, p in sorted(self.terms.items(), reverse=True))


def _require(params: dict, names, optional=()):
    missing = [n for n in names if n not in params]
    if missing:
        raise kernels_utils.ParamsError('missing parameters: %s' % ', '.join(missing))
    unknown = sorted(set(params) - set(names) - set(optional))
    if unknown:
        raise kernels_utils.ParamsError('unknown parameters: %s' % ', '.join(unknown))


def _derive_r2(params: dict, s_sum):
    r2 = s_sum - 1 - params['r1']
    if 'r2' in params and params['r2'] != r2:
        raise kernels_utils.ParamsError('r1 + r2 must equal %s, got %s' % (format_rat(s_sum - 1),
                                                                          format_rat(params['r1'] + params['r2'])))
    params['r2'] = r2
    return r2


def _first_order_g(params, g):
    _require(params, ())
    if not g or g < 1:
        raise kernels_utils.ParamsError('first_order_g needs g >= 1')
    ring = make_ring(('x',) + lambda_names(g))
    x, lams = ring.gens[0], ring.gens[1:]
    return {1: ring.one, 0: -sum((k + 1) * lams[k] * x ** k for k in range(g))}, g


def _heun4(params, g):
    _require(params, ('t', 's1', 's2', 's3', 'r1'), optional=('r2',))
    t, s1, s2, s3, r1 = (params[k] for k in ('t', 's1', 's2', 's3', 'r1'))
    if t in (0, 1):
        raise kernels_utils.ParamsError('t must avoid 0 and 1')
    r2 = _derive_r2(params, s1 + s2 + s3)
    ring = make_ring(('x', 'lam1'))
    x, lam = ring.gens
    return {
        2: x * (x - 1) * (x - t),
        1: s1 * (x - 1) * (x - t) + s2 * x * (x - t) + s3 * x * (x - 1),
        0: r1 * r2 * x + lam,
    }, 1


def _heun_n(params, g):
    n = g or len([k for k in params if k.startswith('t')])
    if n < 1:
        raise kernels_utils.ParamsError('heun_n needs at least one point t1')
    ts = ['t%d' % (i + 1) for i in range(n)]
    ss = ['s%d' % (i + 1) for i in range(n + 2)]
    _require(params, ts + ss + ['r1'], optional=('r2',))
    points = [params[k] for k in ts]
    if any(p in (0, 1) for p in points) or len(set(points)) != n:
        raise kernels_utils.ParamsError('points t_i must avoid 0 and 1 and be pairwise distinct')
    r2 = _derive_r2(params, sum(params[k] for k in ss))
    ring = make_ring(('x',) + lambda_names(n))
    x, lams = ring.gens[0], ring.gens[1:]
    factors = [x, x - 1] + [x - p for p in points]
    leading = ring.one
    for f in factors:
        leading *= f
    first = ring.zero
    for k, f in enumerate(factors):
        rest = ring.one
        for m, h in enumerate(factors):
            if m != k:
                rest *= h
        first += params[ss[k]] * rest
    free = sum(lams[k] * x ** k for k in range(n)) + params['r1'] * r2 * x ** n
    return {2: leading, 1: first, 0: free}, n


def _third_order3(params, g):
    names = ['a%d' % i for i in range(1, 7)]
    _require(params, names)
    a1, a2, a3, a4, a5, a6 = (params[k] for k in names)
    ring = make_ring(('x', 'lam1'))
    x, lam = ring.gens
    return {
        3: x ** 2 * (x - 1) ** 2,
        2: x * (x - 1) * (a1 + a2 * x),
        1: a3 + a4 * x + a5 * x ** 2,
        0: a6 * x + lam,
    }, 1


BUILDERS = {
    'first_order_g': _first_order_g,
    'heun4': _heun4,
    'heun_n': _heun_n,
    'third_order3': _third_order3,
}


def preset_operator(family: str, params=None, g=None) -> DiffOp:
    if family not in BUILDERS:
        raise kernels_utils.ParamsError('unknown operator family %r' % family)
    params = {k: parse_rat(v) for k, v in (params or {}).items()}
    terms, g = BUILDERS[family](params, g)
    return DiffOp(terms, g=g, params=params, family=family)


class SolutionTable(object):
    def __init__(self, op: DiffOp, polys: list):
        self.op = op
        self.P = list(polys)
        self.g = op.g
        self.ring = make_ring(op.lambdas)
        self.weighted_degrees = [self.weighted_degree(p) for p in self.P]

    @property
    def upto(self) -> int:
        return len(self.P) - 1

    @staticmethod
    def weighted_degree(poly) -> int:
        if not poly:
            return -1
        return max(sum((k + 1) * e for k, e in enumerate(m)) for m in poly.keys())

    def generating_series(self, var: str, upto=None, role='x') -> Series:
        """sum_{i <= upto} P_i var^i; truncated in var when role is x, exact polynomial otherwise."""
        upto = self.upto if upto is None else upto
        if upto > self.upto:
            raise kernels_utils.PlanError('solution known up to %d, %d requested' % (self.upto, upto))
        ring = make_ring((var,) + self.ring_names())
        v = ring.gens[0]
        poly = ring.zero
        for i in range(upto + 1):
            poly += lift(self.P[i], ring) * v ** i
        if role == 'x':
            return Series(poly, x_vars=(var,), trunc=upto)
        return Series(poly, y_vars=(var,))

    def ring_names(self) -> tuple:
        return self.op.lambdas


def expand_solution(op: DiffOp, N: int) -> SolutionTable:
    coeffs = op.shifted_coefficients()
    d = max(delta for _, delta in coeffs)
    if d <= 0:
        raise kernels_utils.ParamsError('operator is not analytic-normalizable at 0: no positive degree shift')
    if d > 1:
        raise kernels_utils.ParamsError('operator is not analytic-normalizable at 0: coefficients 1..%d are free'
                                        % (d - 1))
    lam_ring = make_ring(op.lambdas)
    P = [lam_ring.one]
    for i in range(1, N + 1):
        pivot = lam_ring.zero
        for (k, delta), c in coeffs.items():
            if delta == d:
                pivot += c * kernels_utils.falling(i, k)
        if not pivot:
            raise kernels_utils.ResonanceError(i, 'recurrence pivot vanishes at index %d' % i)
        if not pivot.is_ground:
            raise kernels_utils.ParamsError('recurrence pivot at index %d depends on lam' % i)
        m = i - d
        rest = lam_ring.zero
        for (k, delta), c in coeffs.items():
            j = m + delta
            if delta == d or j < 0:
                continue
            rest += c * P[j] * kernels_utils.falling(j, k)
        P.append(-rest * (QQ.one / pivot.LC))
    logger.debug('expanded %s to N=%d', op.family, N)
    return SolutionTable(op, P)


def apply_op(op: DiffOp, f: Series, in_var: str, adjoint=False) -> Series:
    """sum_k p_k(in_var) d^k f, or the formal adjoint sum_k (-d)^k (p_k f)."""
    if in_var in f.x_vars:
        roles = dict(x_vars=(in_var,))
    elif in_var in f.y_vars:
        roles = dict(y_vars=(in_var,))
    else:
        roles = {}
    result = None
    for k in sorted(op.terms):
        coeff = Series.from_poly(op.coefficient(k, in_var), **roles)
        if adjoint:
            term = coeff * f
            for _ in range(k):
                term = term.diff(in_var)
            if k % 2:
                term = -term
        else:
            term = f
            for _ in range(k):
                term = term.diff(in_var)
            term = coeff * term
        result = term if result is None else result + term
    if result.trunc is not None and result.trunc < 0:
        raise kernels_utils.WindowError('faithful window empty after applying the operator in %s' % in_var)
    return result


def substitution_residual(op: DiffOp, sol: SolutionTable) -> Series:
    return apply_op(op, sol.generating_series(op.var), op.var)


def substitution_check(op: DiffOp, sol: SolutionTable) -> int:
    """Asserts D(sum P_i x^i) vanishes on its faithful window; returns the window."""
    residual = substitution_residual(op, sol)
    if not residual.is_zero():
        raise kernels_utils.MismatchError('substitution identity fails at %s' % residual.first_term())
    return residual.trunc


def perturbed(sol: SolutionTable, index: int, delta=1) -> SolutionTable:
    P = list(sol.P)
    P[index] = P[index] + parse_rat(delta)
    return SolutionTable(sol.op, P)


def degree_check(sol: SolutionTable):
    """g=1 triangularity: deg P_i = i with nonzero leading coefficient."""
    for i, p in enumerate(sol.P):
        if p.degree() != i:
            raise kernels_utils.BasisError('deg P_%d = %d' % (i, p.degree()))
