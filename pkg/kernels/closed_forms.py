"""
Closed-form kernels expanded as exact truncated series.

Each oracle rebuilds a kernel from an explicit formula, independently of the
structure-constant tables, so ``compare_kernels`` against ``build_kernel`` is a
real cross-check.  Symmetric functions of exponent roots are always taken from
the defining polynomials; no root is ever extracted.
"""
import logging
from itertools import combinations, permutations, product
from math import factorial, prod

from sympy import QQ, expand, symbols
from sympy.polys.polyfuncs import symmetrize

from kernels import utils as kernels_utils
from kernels.exact import (Series, first_difference, format_rat, geometric, inverse_power_at_infinity, make_ring,
                           monomial_label, parse_rat, pochhammer, series_pow_fractional, series_sqrt, variable)
from kernels.kernel import Kernel, kernel_diffeq_check, kernel_vars
from kernels.ode import DiffOp, apply_op
from kernels.structure import solve_exact

logger = logging.getLogger(__name__)


class HypergeomSpec(object):
    def __init__(self, a, b, c, order: int):
        self.a, self.b, self.c = parse_rat(a), parse_rat(b), parse_rat(c)
        self.order = order

    def __repr__(self):
        return 'F(%s, %s, %s; order %d)' % (format_rat(self.a), format_rat(self.b), format_rat(self.c), self.order)


def hypergeom_coefficients(a, b, c, order: int) -> list:
    """(a)_n (b)_n / ((c)_n n!) for n <= order; a terminating series stays zero past its last term."""
    a, b, c = parse_rat(a), parse_rat(b), parse_rat(c)
    coeffs = [QQ.one]
    for k in range(order):
        prev = coeffs[-1]
        num = (a + k) * (b + k)
        if not prev or not num:
            coeffs.append(QQ.zero)
            continue
        if not c + k:
            raise kernels_utils.ResonanceError(k, 'hypergeometric pole: c + %d = 0 for c = %s' % (k, format_rat(c)))
        coeffs.append(prev * num / ((c + k) * (k + 1)))
    return coeffs


def hypergeom_series(spec: HypergeomSpec, var='u') -> Series:
    coeffs = hypergeom_coefficients(spec.a, spec.b, spec.c, spec.order)
    return Series.from_terms((var,), [((n,), c) for n, c in enumerate(coeffs) if c], x_vars=(var,), trunc=spec.order)


def hypergeom_derivative_check(spec: HypergeomSpec, var='u') -> int:
    """d/du F(a,b,c,u) = (ab/c) F(a+1,b+1,c+1,u) termwise."""
    lhs = hypergeom_series(spec, var).diff(var)
    shifted = HypergeomSpec(spec.a + 1, spec.b + 1, spec.c + 1, spec.order - 1)
    rhs = hypergeom_series(shifted, var) * (spec.a * spec.b / spec.c)
    found = first_difference(lhs, rhs)
    if found:
        raise kernels_utils.MismatchError('derivative identity fails for %r at %s' % (spec, monomial_label(found[0])))
    return spec.order - 1


def hypergeom_of(a, b, c, arg: Series) -> Series:
    """F(a, b, c, arg) for an argument without constant term, to arg's truncation."""
    if arg.trunc is None:
        raise kernels_utils.ParamsError('hypergeometric substitution needs a truncated argument')
    order = arg.x_order()
    if order < 1:
        raise kernels_utils.ParamsError('argument of F must vanish at x = 0')
    count = arg.trunc // order
    coeffs = hypergeom_coefficients(a, b, c, count)
    result = arg * 0 + 1
    power = arg * 0 + 1
    for n in range(1, count + 1):
        power = (power * arg).truncate(arg.trunc)
        if coeffs[n]:
            result = result + power * coeffs[n]
    return result.truncate(arg.trunc)


def _product_argument(x_vars, scale, trunc: int) -> Series:
    """scale * prod(x_vars) as a truncated x-series."""
    ring = make_ring(tuple(x_vars))
    monomial = ring.one
    for x in ring.gens:
        monomial *= x
    return Series(monomial * parse_rat(scale), x_vars=tuple(x_vars), trunc=trunc)


def compare_kernels(oracle: Kernel, built: Kernel, within=None) -> int:
    """Exact equality on the common faithful window; returns the x-truncation compared."""
    if oracle.g != built.g:
        raise kernels_utils.IncompatibleError('kernels of genus %d and %d' % (oracle.g, built.g))
    found = first_difference(oracle.series, built.series, within)
    if found:
        exps, coeff = found
        raise kernels_utils.MismatchError('closed form differs from the constructed kernel at %s by %s'
                                          % (monomial_label(exps), format_rat(coeff)))
    return min(oracle.trunc, built.trunc)


def _require(params, names):
    try:
        return [parse_rat(params[n]) for n in names]
    except KeyError as e:
        raise kernels_utils.ParamsError('missing parameter %s' % e)


def oracle_elementary(g: int, N: int, M=None) -> Kernel:
    """
    (1/g!) sum_sigma prod 1/(y_sigma(k) - q_k), where e_k(q1..qg) = e_k(x1..x_{g+1})
    for k = 1..g.  Each coefficient is a symmetric polynomial in the q's, rewritten
    in their elementary symmetric polynomials and then in those of the x's; no
    root is ever taken.
    """
    if g < 1:
        raise kernels_utils.ParamsError('g must be at least 1')
    x_vars, y_vars = kernel_vars(g)
    xs = symbols(x_vars)
    qs = symbols(['q%d' % (k + 1) for k in range(g)])
    elementary = [sum(prod(c) for c in combinations(xs, k + 1)) for k in range(g)]
    ring = make_ring(x_vars)
    weight = QQ(1, factorial(g))
    cache = {}
    terms = []
    for m in product(range(N + 1), repeat=g):
        if sum(m) > N or (M is not None and sum(m) + g > M):
            continue
        key = tuple(sorted(m))
        if key not in cache:
            if not any(key):
                cache[key] = ring.one
            else:
                expr = expand(sum(prod(q ** e for q, e in zip(qs, p)) for p in permutations(key)))
                sym, rem, defs = symmetrize(expr, *qs, formal=True)
                if rem != 0:
                    raise kernels_utils.MismatchError('symmetrization left a remainder for %s' % (key,))
                subs = {s: elementary[k] for k, (s, _) in enumerate(defs)}
                cache[key] = ring.from_expr(expand(sym.subs(subs))) * weight
        for monom, coeff in cache[key].items():
            terms.append((list(monom) + [-e - 1 for e in m], coeff))
    series = Series.from_terms(x_vars + y_vars, terms, x_vars=x_vars, trunc=N, y_vars=y_vars)
    return Kernel(series, g, N)


def _heun4_params(params):
    t, s1, s2, s3, r1 = _require(params, ('t', 's1', 's2', 's3', 'r1'))
    r2 = s1 + s2 + s3 - 1 - r1
    if 'r2' in params and parse_rat(params['r2']) != r2:
        raise kernels_utils.ParamsError('r2 violates r1 + r2 = s1 + s2 + s3 - 1')
    if t in (0, 1):
        raise kernels_utils.ParamsError('t must avoid 0 and 1')
    return t, s1, s2, s3, r1, r2


def oracle_heun4(params: dict, N: int, M: int) -> Kernel:
    """
    K = 1/(y-1) sum_i R_i (x1x2/t - 1)^i F(-i, b+i, a+1, u) F(r1+i, r2+i, s1, x1x2/t)
        ((t-1)/(y-1))^i F(i+1, a+i+1, b+2i+1, (t-1)/(y-1))
    with b = r1 + r2 - s1, a = b - s3 and u = t(x1-1)(x2-1)/((t-1)(x1x2-t)).
    Only i <= M-1 reach the y-window [-M, -1].
    """
    t, s1, s2, s3, r1, r2 = _heun4_params(params)
    beta = r1 + r2 - s1
    alpha = beta - s3
    x_vars, y_vars = kernel_vars(1)
    ring = make_ring(x_vars)
    x1, x2 = ring.gens
    arg = _product_argument(x_vars, 1 / t, N)
    total = None
    for i in range(M):
        den = pochhammer(beta + i, i)
        if not den:
            raise kernels_utils.ResonanceError(i, 'Pochhammer ratio pole at i = %d' % i)
        ratio = pochhammer(alpha + 1, i) / den
        if not ratio:
            continue
        # (x1x2/t - 1)^i F(-i, b+i, a+1, u) cleared of its denominators
        c = hypergeom_coefficients(-i, beta + i, alpha + 1, i)
        poly = ring.zero
        for n in range(i + 1):
            if c[n]:
                poly += ((x1 - 1) * (x2 - 1)) ** n * (x1 * x2 - t) ** (i - n) * (c[n] * t ** (n - i) / (t - 1) ** n)
        h = hypergeom_coefficients(i + 1, alpha + i + 1, beta + 2 * i + 1, M - i - 1)
        y_part = None
        for n, hn in enumerate(h):
            if hn:
                piece = inverse_power_at_infinity('y', 1, n + i + 1, M) * (hn * (t - 1) ** n)
                y_part = piece if y_part is None else y_part + piece
        if y_part is None:
            continue
        term = Series(poly, x_vars=x_vars, trunc=N) * hypergeom_of(r1 + i, r2 + i, s1, arg) * y_part
        term = term * (ratio * (t - 1) ** i)
        total = term if total is None else total + term
    logger.debug('heun4 closed form summed over i < %d', M)
    return Kernel(total, 1, N)


def _laurent(names, entries, x_vars, y_vars, trunc=None) -> Series:
    return Series.from_terms(names, entries, x_vars=x_vars, trunc=trunc, y_vars=y_vars)


def oracle_heun4_unit(params: dict, N: int) -> Kernel:
    """The s1 = r1 = 1 kernel: B2^(s2-1) B3^(s3-1) / (y sqrt(P))."""
    t, s1, s2, s3, r1, r2 = _heun4_params(params)
    if s1 != 1 or r1 != 1:
        raise kernels_utils.ParamsError('closed form needs s1 = r1 = 1')
    names = ('x1', 'x2', 'y')
    x_vars, y_vars = ('x1', 'x2'), ('y',)
    P = _laurent(names, [
        ((0, 0, 0), 1), ((1, 0, -1), -2), ((0, 1, -1), -2), ((2, 0, -2), 1), ((0, 2, -2), 1),
        ((2, 1, -1), -2 / t), ((1, 2, -1), -2 / t), ((2, 2, 0), 1 / t ** 2),
        ((1, 1, -1), 4 + 4 / t), ((1, 1, 0), -2 / t), ((1, 1, -2), -2),
    ], x_vars, y_vars, trunc=N)
    root = series_sqrt(P)
    tyS = root * variable('y', 'y') * t
    linear = [((1, 0, 0), -t), ((0, 1, 0), -t), ((0, 0, 1), -t), ((1, 1, 1), 1)]
    num2 = tyS + _laurent(names, [((0, 0, 0), 2 * t)] + linear, x_vars, y_vars)
    num3 = tyS + _laurent(names, [((0, 0, 0), 2 * t ** 2)] + linear, x_vars, y_vars)
    B2 = num2 * geometric('x1', 1, N) * geometric('x2', 1, N) * (1 / (2 * t))
    B3 = num3 * geometric('x1', 1 / t, N) * geometric('x2', 1 / t, N) * (1 / (2 * t ** 2))
    y_inv = _laurent(('y',), [((-1,), 1)], (), y_vars)
    K = series_pow_fractional(B2.truncate(N), s2 - 1) * series_pow_fractional(B3.truncate(N), s3 - 1)
    K = (K * series_pow_fractional(P, QQ(-1, 2)) * y_inv).truncate(N)
    for exps, _ in K.terms():
        if exps['y'] >= 0:
            raise kernels_utils.MismatchError('positive y power survives at %s' % monomial_label(exps))
    return Kernel(K, 1, N)


def _third_order_symmetric(params):
    """Elementary symmetric functions of the b and c exponents, from a1..a6."""
    a1, a2, a3, a4, a5, a6 = _require(params, ['a%d' % k for k in range(1, 7)])
    e1b, e2b = -a1 - 1, a3
    e1c, e2c, e3c = a2 - 3, a5 - a2 + 2, a6
    return {'e1b': e1b, 'e2b': e2b, 'e1c': e1c, 'e2c': e2c, 'e3c': e3c, 'a4': a4}


def _b_value(sym, l):
    """(b1 + l)(b2 + l)"""
    return l * l + sym['e1b'] * l + sym['e2b']


def _c_value(sym, l):
    """(c1 + l)(c2 + l)(c3 + l)"""
    return l ** 3 + sym['e1c'] * l * l + sym['e2c'] * l + sym['e3c']


def oracle_third_order(params: dict, N: int, M: int) -> Kernel:
    sym = _third_order_symmetric(params)
    A = sym['e2b'] + sym['e2c'] + sym['a4']
    x_vars, y_vars = kernel_vars(1)
    ring = make_ring(x_vars)
    x1, x2 = ring.gens
    total = None
    for k in range(M):
        poly = ring.zero
        for j in range(k + 1):
            middle = QQ.one
            for l in range(j + 1, k + 1):
                middle *= A + l * sym['e1c'] + (1 - l) * sym['e1b'] + l * l - l + 1
            if not middle:
                continue
            for i in range(max(0, k - j), N // 2 + 1):
                den = QQ.one
                for l in range(i):
                    den *= _b_value(sym, l)
                if not den:
                    raise kernels_utils.ResonanceError(i, 'b-product vanishes at i = %d' % i)
                num = QQ.one
                for l in range(k, i + j):
                    num *= _c_value(sym, l)
                coef = QQ((-1) ** j * factorial(k), factorial(j) * factorial(k - j) * factorial(i + j - k))
                coef = coef * middle * num / den
                if coef:
                    poly += (x1 * x2) ** i * ((x1 - 1) * (x2 - 1)) ** j * coef
        if poly:
            term = Series(poly, x_vars=x_vars, trunc=N) * inverse_power_at_infinity('y', 1, k + 1, M)
            total = term if total is None else total + term
    return Kernel(total, 1, N)


def _raise_first(series: Series, message: str):
    for exps, coeff in series.terms():
        raise kernels_utils.MismatchError('%s: %s at %s' % (message, format_rat(coeff), monomial_label(exps)))


def check_heun4_equations(kernel: Kernel, op: DiffOp) -> dict:
    """The three differential equations of the heun4 kernel; returns the windows checked."""
    t, s1, s2, s3, r1, r2 = _heun4_params(op.params)
    windows = kernel_diffeq_check(kernel, op)
    free = op.free_part()
    K = kernel.series
    x_vars, y_vars = kernel.x_vars, kernel.y_vars
    N = kernel.trunc

    diff = apply_op(free, K, 'y', adjoint=True) - apply_op(free, K, 'x1')
    rhs = hypergeom_of(r1, r2, s1, _product_argument(x_vars, 1 / t, N)) * ((r1 - 1) * (r2 - 1))
    _raise_first(diff - rhs, 'D*_y K - D_x1 K differs from its hypergeometric right side')
    windows['inhomogeneous'] = (diff - rhs).trunc

    ring = make_ring(('x1', 'x2', 'y'))
    x1, x2, y = ring.gens

    def as_series(poly):
        return Series.from_poly(poly, x_vars=x_vars, y_vars=y_vars)

    N4 = ((r1 + r2 - 2) * x1 * x2 * y + (s2 + 1 - r1 - r2) * x1 * x2 - (s1 + s2 - 2) * t * x1 * x2
          + (s1 - 1) * t * (x1 + x2 - y))
    lhs = (as_series((x1 - 1) * (x1 - t) * x1 * x2 * (x2 - y)) * K.diff('x1')
           - as_series((x2 - 1) * (x2 - t) * x1 * x2 * (x1 - y)) * K.diff('x2')
           + as_series((y - 1) * (y - t) * x1 * x2 * (x1 - x2)) * K.diff('y')
           - as_series(N4 * (x1 - x2)) * K)
    cleared = lhs
    if s1 != 1:
        arg = _product_argument(x_vars, 1 / t, N + 1)
        cleared = lhs - as_series((x1 - x2) * ((s1 - 1) * t)) * hypergeom_of(r1 - 1, r2 - 1, s1 - 1, arg)
    _raise_first(cleared, 'cleared L-equation fails')
    windows['cleared'] = cleared.trunc
    return windows


def check_third_order_equations(kernel: Kernel, op: DiffOp) -> dict:
    sym = _third_order_symmetric(op.params)
    windows = kernel_diffeq_check(kernel, op)
    free = op.free_part()
    K = kernel.series
    N = kernel.trunc
    diff = apply_op(free, K, 'y', adjoint=True) - apply_op(free, K, 'x1')
    ring = make_ring(kernel.x_vars)
    x1, x2 = ring.gens
    poly = ring.zero
    coef = _c_value(sym, -1)
    for i in range(N // 2 + 1):
        if i:
            b = _b_value(sym, i - 1)
            if not b:
                raise kernels_utils.ResonanceError(i, 'b-product vanishes at i = %d' % i)
            coef = coef * _c_value(sym, i - 1) / (b * i)
        poly += (x1 * x2) ** i * coef
    rhs = Series(poly, x_vars=kernel.x_vars, trunc=N)
    _raise_first(diff - rhs, 'D*_y K - D_x1 K differs from its right side')
    windows['inhomogeneous'] = (diff - rhs).trunc
    return windows


def _heun_n_points(params, n):
    ts = _require(params, ['t%d' % (k + 1) for k in range(n)])
    ss = _require(params, ['s%d' % (k + 1) for k in range(n + 2)])
    r1 = parse_rat(params['r1'])
    r2 = sum(ss) - 1 - r1
    return ts, ss, r1, r2


def _u_polys(ring, ts):
    xs = ring.gens
    u0 = ring.one
    for x in xs:
        u0 *= x - 1
    den = QQ.one
    for t in ts:
        den *= t - 1
    u0 = u0 * (1 / den)
    us = []
    for k, tk in enumerate(ts):
        u = ring.one
        for x in xs:
            u *= x - tk
        den = tk * (tk - 1)
        for l, tl in enumerate(ts):
            if l != k:
                den *= tl - tk
        us.append(u * (1 / den))
    return u0, us


def _u_family_poly(i, u0, us, ss):
    """u0^|i| P_i(u1/u0, ..., un/u0) as a polynomial in the u's."""
    size = sum(i)
    total = u0 * 0
    for j in product(*(range(ik + 1) for ik in i)):
        coef = QQ.one
        for l in range(1, sum(j) + 1):
            coef *= ss[1] + size - l
        for k, jk in enumerate(j):
            den = pochhammer(ss[k + 2], jk) * factorial(jk)
            if not den:
                raise kernels_utils.ResonanceError(jk, 'Pochhammer pole in s%d' % (k + 3))
            coef = coef * kernels_utils.falling(i[k], jk) / den
        if not coef:
            continue
        term = u0 ** (size - sum(j))
        for k, jk in enumerate(j):
            term *= us[k] ** jk
        total += term * coef
    return total


def _boundary_rhs(ring, alpha):
    """(1/n!) sum_sigma prod x_k^(alpha_sigma(k) - 1) over the first n generators."""
    n = len(alpha)
    xs = ring.gens
    out = ring.zero
    for sigma in permutations(range(n)):
        term = ring.one
        for k in range(n):
            term *= xs[k] ** (alpha[sigma[k]] - 1)
        out += term
    return out * QQ(1, factorial(n))


def heun_n_formula(params: dict, n: int, N: int, M: int) -> Kernel:
    """
    sum_i F(r1+|i|, r2+|i|, s1, prod x / prod t) u0^|i| P_i(u/u0) Q_i(y), with the
    Laurent coefficients of Q_i solved from the x_{n+1} = 0 system degree by degree.
    """
    ts, ss, r1, r2 = _heun_n_points(params, n)
    x_vars, y_vars = kernel_vars(n)
    ring = make_ring(x_vars)
    u0, us = _u_polys(ring, ts)
    top = max(M - n, 0)
    indices = [i for i in product(range(top + 1), repeat=n) if sum(i) <= top]
    family = {i: _u_family_poly(i, u0, us, ss) for i in indices}
    last = len(x_vars) - 1
    boundary = {i: ring.from_dict({m: c for m, c in p.items() if not m[last]}) for i, p in family.items()}

    q = {i: {} for i in indices}
    for d in range(top + 1):
        unknowns = [i for i in indices if sum(i) <= d]
        alphas = [a for a in product(range(1, d + 2), repeat=n) if sum(a) - n == d]
        rhs = {a: _boundary_rhs(ring, a) for a in alphas}
        monomials = sorted({m for i in unknowns for m in boundary[i].keys()} | {m for p in rhs.values() for m in p.keys()})
        rows = [[boundary[i].get(m, QQ.zero) for i in unknowns] for m in monomials]
        columns = [[rhs[a].get(m, QQ.zero) for m in monomials] for a in alphas]
        try:
            solutions = solve_exact(rows, columns, len(unknowns))
        except kernels_utils.BasisError as e:
            if getattr(e, 'index', None) is None:
                raise
            raise kernels_utils.BasisError('Q system inconsistent for y-exponent %s' % (alphas[e.index],))
        for a, vector in zip(alphas, solutions):
            for i, v in zip(unknowns, vector):
                if v:
                    q[i][a] = v

    scale = QQ.one
    for t in ts:
        scale /= t
    arg = _product_argument(x_vars, scale, N)
    total = None
    for i in indices:
        if not q[i]:
            continue
        Q = Series.from_terms(y_vars, [([-e for e in a], v) for a, v in q[i].items()], y_vars=y_vars)
        term = hypergeom_of(r1 + sum(i), r2 + sum(i), ss[0], arg) * Series(family[i], x_vars=x_vars, trunc=N) * Q
        total = term if total is None else total + term
    return Kernel(total, n, N)


def check_heun_n_formula(kernel: Kernel, op: DiffOp, M: int) -> int:
    """Compares the low-order heun_n formula with a constructed kernel for |y-exponent| <= M."""
    formula = heun_n_formula(op.params, kernel.g, kernel.trunc, M)
    y_vars = kernel.y_vars
    return compare_kernels(formula, kernel, within=lambda exps: -sum(exps[y] for y in y_vars) <= M)
