"""
Exact arithmetic substrate.

Rationals are elements of sympy's ``QQ``, polynomials are sparse ``PolyElement``
objects over ``QQ``.  The
``Series`` class adds the truncation bookkeeping the engine needs: total-degree
truncation in a block of x-variables and explicit lower exponent windows for
Laurent variables (the y-block).
"""
import logging
import math
import random
from functools import lru_cache

from sympy import QQ, sympify
from sympy.polys.monomials import monomial_mul
from sympy.polys.rings import PolyRing

from kernels import utils as kernels_utils

logger = logging.getLogger(__name__)

SAMPLE_TRIES = 1000


def parse_rat(value):
    if isinstance(value, int):
        return QQ(value)
    if not isinstance(value, str) and hasattr(value, 'numerator') and hasattr(value, 'denominator'):
        return QQ(int(value.numerator), int(value.denominator))
    text = str(value).strip()
    num, sep, den = text.partition('/')
    try:
        num = int(num)
        den = int(den) if sep else 1
    except ValueError:
        raise kernels_utils.ParamsError('not a rational literal: %r' % (value,))
    if den == 0:
        raise kernels_utils.ParamsError('zero denominator: %r' % (value,))
    return QQ(num, den)


def format_rat(value) -> str:
    value = parse_rat(value)
    return '%d/%d' % (int(value.numerator), int(value.denominator))


@lru_cache(maxsize=None)
def make_ring(names: tuple) -> PolyRing:
    return PolyRing(tuple(names), QQ)


def ring_names(ring) -> tuple:
    return tuple(str(s) for s in ring.symbols)


def lift(poly, ring):
    """Moves poly into ring, matching generators by name."""
    src = ring_names(poly.ring)
    dst = ring_names(ring)
    if src == dst:
        return poly
    index = [dst.index(n) if n in dst else None for n in src]
    out = {}
    for monom, coeff in poly.items():
        m = [0] * len(dst)
        for i, e in zip(index, monom):
            if not e:
                continue
            if i is None:
                raise kernels_utils.IncompatibleError('cannot drop generator %s' % src[index.index(i)])
            m[i] += e
        out[tuple(m)] = coeff
    return ring.from_dict(out)


def unify(*polys):
    names = []
    for p in polys:
        names.extend(n for n in ring_names(p.ring) if n not in names)
    ring = make_ring(tuple(names))
    return [lift(p, ring) for p in polys]


def poly_mul(a, b):
    a, b = unify(a, b)
    return a * b


def rename(poly, mapping: dict):
    ring = make_ring(tuple(mapping.get(n, n) for n in ring_names(poly.ring)))
    return ring.from_dict(dict(poly))


def poly_from_string(text: str, names):
    ring = make_ring(tuple(names))
    try:
        return ring.from_expr(sympify(text))
    except (ValueError, TypeError, SyntaxError) as e:
        raise kernels_utils.ParamsError('cannot parse %r over %s: %s' % (text, ', '.join(names), e))



def evaluate(poly, point: dict, convert=None):
    """Evaluates a polynomial at values of any ring-like type (QQ, FracElement, mpf, PolyElement)."""
    names = ring_names(poly.ring)
    total = None
    for monom, coeff in poly.items():
        term = None
        for name, e in zip(names, monom):
            if e:
                factor = point[name] ** e
                term = factor if term is None else term * factor
        coeff = convert(coeff) if convert else coeff
        term = coeff if term is None else term * coeff
        total = term if total is None else total + term
    if total is None:
        return convert(QQ.zero) if convert else QQ.zero
    return total


def rand_rat_point(names, bound: int, seed: int, forbidden=(), reject=None):
    if bound < 2:
        raise kernels_utils.ParamsError('sampling bound must be at least 2')
    rng = random.Random(seed)
    forbidden = {parse_rat(v) for v in forbidden}
    for _ in range(SAMPLE_TRIES):
        point = {}
        for name in names:
            for _ in range(SAMPLE_TRIES):
                value = QQ(rng.randint(1, bound), rng.randint(1, bound))
                if value not in forbidden:
                    break
            else:
                raise kernels_utils.ParamsError('cannot avoid forbidden values for %s' % name)
            point[name] = value
        if reject is None or not reject(point):
            return point
    raise kernels_utils.ParamsError('cannot avoid forbidden values after %d draws' % SAMPLE_TRIES)


def pochhammer(a, n: int):
    result = QQ.one
    for l in range(n):
        result *= a + l
    return result


def binomial(e, n: int):
    result = QQ.one
    for j in range(n):
        result = result * (e - j) / (j + 1)
    return result


def _min_none(*values):
    values = [v for v in values if v is not None]
    return min(values) if values else None


def _truncated_product(p, q, x_idx, trunc):
    if trunc is None:
        return p * q
    ring = p.ring
    if trunc < 0:
        return ring.zero

    def degree(m):
        return sum(m[i] for i in x_idx)

    right = sorted(((degree(m), m, c) for m, c in q.items()), key=lambda t: t[0])
    zero = ring.domain.zero
    out = {}
    for m1, c1 in p.items():
        d1 = degree(m1)
        if d1 > trunc:
            continue
        for d2, m2, c2 in right:
            if d1 + d2 > trunc:
                break
            m = monomial_mul(m1, m2)
            out[m] = out.get(m, zero) + c1 * c2
    return ring.from_dict(out)


class Series(object):
    """
    poly * prod(y ** -shift[y]) with bookkeeping of which coefficients are exact.

    Terms of total x-degree above ``trunc`` are unknown (``trunc=None`` means
    exact).  For a y-variable with ``y_lo[y]`` set, exponents below that bound
    are unknown.  Both are carried through arithmetic, so every comparison of
    two series only looks at coefficients known on both sides.
    """
    __slots__ = ('poly', 'x_vars', 'y_vars', 'trunc', 'shift', 'y_lo')

    def __init__(self, poly, x_vars=(), trunc=None, y_vars=(), shift=None, y_lo=None):
        names = ring_names(poly.ring)
        for name in tuple(x_vars) + tuple(y_vars):
            if name not in names:
                raise kernels_utils.IncompatibleError('%s is not a generator of %s' % (name, names))
        if set(x_vars) & set(y_vars):
            raise kernels_utils.IncompatibleError('variables %s are both x and y' % sorted(set(x_vars) & set(y_vars)))
        self.x_vars = tuple(x_vars)
        self.y_vars = tuple(y_vars)
        self.trunc = trunc
        shift = shift or {}
        self.shift = {y: shift.get(y, 0) for y in self.y_vars}
        self.y_lo = {y: v for y, v in (y_lo or {}).items() if v is not None and y in self.y_vars}
        self.poly = self._clip(poly)

    def _clip(self, poly):
        names = ring_names(poly.ring)
        xi = [names.index(x) for x in self.x_vars]
        bounds = [(names.index(y), lo + self.shift[y]) for y, lo in self.y_lo.items()]
        if self.trunc is None and not bounds:
            return poly
        keep = {}
        for m, c in poly.items():
            if self.trunc is not None and sum(m[i] for i in xi) > self.trunc:
                continue
            if any(m[i] < b for i, b in bounds):
                continue
            keep[m] = c
        if len(keep) == len(poly):
            return poly
        return poly.ring.from_dict(keep)

    def replace(self, **kwargs):
        data = dict(poly=self.poly, x_vars=self.x_vars, trunc=self.trunc, y_vars=self.y_vars, shift=self.shift,
                    y_lo=self.y_lo)
        data.update(kwargs)
        return Series(**data)

    @property
    def ring(self):
        return self.poly.ring

    @property
    def names(self):
        return ring_names(self.poly.ring)

    @classmethod
    def from_poly(cls, poly, x_vars=(), trunc=None, y_vars=()):
        """Wraps an exact polynomial; roles for names absent from its ring are ignored."""
        names = ring_names(poly.ring)
        return cls(poly, [v for v in x_vars if v in names], trunc, [v for v in y_vars if v in names])

    @classmethod
    def from_terms(cls, names, entries, x_vars=(), trunc=None, y_vars=(), y_lo=None):
        """entries: iterable of (exponents aligned with names, coefficient); y exponents may be negative."""
        names = tuple(names)
        ring = make_ring(names)
        entries = list(entries)
        yi = [(y, names.index(y)) for y in y_vars]
        shift = {y: max([0] + [-exps[i] for exps, _ in entries]) for y, i in yi}
        zero = QQ.zero
        out = {}
        for exps, coeff in entries:
            m = list(exps)
            for y, i in yi:
                m[i] += shift[y]
            m = tuple(m)
            out[m] = out.get(m, zero) + parse_rat(coeff)
        return cls(ring.from_dict(out), x_vars, trunc, y_vars, shift, y_lo)

    def exponents(self, monom) -> tuple:
        """Actual exponents of a raw monomial."""
        return tuple(e - self.shift.get(n, 0) for n, e in zip(self.names, monom))

    def terms(self):
        for monom, coeff in sorted(self.poly.items()):
            yield dict(zip(self.names, self.exponents(monom))), coeff

    def coeff(self, **exponents):
        names = self.names
        for name in exponents:
            if name not in names:
                return QQ.zero
        monom = tuple(exponents.get(n, 0) + self.shift.get(n, 0) for n in names)
        if any(e < 0 for e in monom):
            return QQ.zero
        return self.poly.get(monom, QQ.zero)

    def is_zero(self) -> bool:
        return not self.poly

    def x_degree(self, monom, x_vars=None) -> int:
        names = self.names
        x_vars = self.x_vars if x_vars is None else x_vars
        return sum(monom[names.index(x)] for x in x_vars if x in names)

    def x_order(self, x_vars=None):
        if self.poly:
            return min(self.x_degree(m, x_vars) for m in self.poly.keys())
        if self.trunc is not None:
            return self.trunc + 1
        return math.inf

    def y_top(self, y):
        """Largest actual exponent of y among present terms (None for an exact zero)."""
        names = self.names
        if self.poly:
            if y not in names:
                return 0
            i = names.index(y)
            return max(m[i] for m in self.poly.keys()) - self.shift.get(y, 0)
        if y in self.y_lo:
            return self.y_lo[y] - 1
        return None

    def _align(self, other):
        for name in self.x_vars:
            if name in other.y_vars:
                raise kernels_utils.IncompatibleError('%s is x on one side and y on the other' % name)
        for name in self.y_vars:
            if name in other.x_vars:
                raise kernels_utils.IncompatibleError('%s is y on one side and x on the other' % name)
        names = list(self.names)
        names.extend(n for n in other.names if n not in names)
        ring = make_ring(tuple(names))
        x_vars = self.x_vars + tuple(n for n in other.x_vars if n not in self.x_vars)
        y_vars = self.y_vars + tuple(n for n in other.y_vars if n not in self.y_vars)
        return lift(self.poly, ring), lift(other.poly, ring), ring, x_vars, y_vars

    def _coerce(self, other):
        if isinstance(other, Series):
            return other
        return Series(self.ring.ground_new(parse_rat(other)))

    @staticmethod
    def _raise_y(poly, ring, raise_by: dict):
        names = ring_names(ring)
        raise_by = {names.index(y): k for y, k in raise_by.items() if k}
        if not raise_by:
            return poly
        out = {}
        for m, c in poly.items():
            m = list(m)
            for i, k in raise_by.items():
                m[i] += k
            out[tuple(m)] = c
        return ring.from_dict(out)

    def __add__(self, other):
        other = self._coerce(other)
        p, q, ring, x_vars, y_vars = self._align(other)
        shift = {y: max(self.shift.get(y, 0), other.shift.get(y, 0)) for y in y_vars}
        p = self._raise_y(p, ring, {y: shift[y] - self.shift.get(y, 0) for y in y_vars})
        q = self._raise_y(q, ring, {y: shift[y] - other.shift.get(y, 0) for y in y_vars})
        y_lo = {}
        for y in y_vars:
            los = [s.y_lo[y] for s in (self, other) if y in s.y_lo]
            if los:
                y_lo[y] = max(los)
        return Series(p + q, x_vars, _min_none(self.trunc, other.trunc), y_vars, shift, y_lo)

    __radd__ = __add__

    def __neg__(self):
        return self.replace(poly=-self.poly)

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if not isinstance(other, Series):
            return self.replace(poly=self.poly * parse_rat(other))
        p, q, ring, x_vars, y_vars = self._align(other)
        bounds = []
        if self.trunc is not None:
            bounds.append(self.trunc + other.x_order(x_vars))
        if other.trunc is not None:
            bounds.append(other.trunc + self.x_order(x_vars))
        trunc = min(bounds) if bounds else None
        if trunc == math.inf:
            trunc = None
        shift = {y: self.shift.get(y, 0) + other.shift.get(y, 0) for y in y_vars}
        y_lo = {}
        for y in y_vars:
            los = []
            for a, b in ((self, other), (other, self)):
                top = b.y_top(y)
                if y in a.y_lo and top is not None:
                    los.append(a.y_lo[y] + top)
            if los:
                y_lo[y] = max(los)
        names = ring_names(ring)
        poly = _truncated_product(p, q, [names.index(x) for x in x_vars], trunc)
        return Series(poly, x_vars, trunc, y_vars, shift, y_lo)

    __rmul__ = __mul__

    def __pow__(self, n: int):
        result = self * 0 + 1
        for _ in range(n):
            result = result * self
        return result

    def diff(self, var):
        names = self.names
        if var not in names:
            return self * 0
        gen = self.ring.gens[names.index(var)]
        if var in self.y_vars:
            s = self.shift[var]
            shift = dict(self.shift)
            shift[var] = s + 1
            y_lo = dict(self.y_lo)
            if var in y_lo:
                y_lo[var] -= 1
            return self.replace(poly=gen * self.poly.diff(gen) - self.poly * s, shift=shift, y_lo=y_lo)
        trunc = self.trunc
        if var in self.x_vars and trunc is not None:
            trunc -= 1
        return self.replace(poly=self.poly.diff(gen), trunc=trunc)

    def truncate(self, n):
        return self.replace(trunc=_min_none(self.trunc, n))

    def select(self, predicate):
        """Keeps the terms whose actual exponent dict satisfies predicate."""
        keep = {m: c for m, c in self.poly.items() if predicate(dict(zip(self.names, self.exponents(m))))}
        return self.replace(poly=self.ring.from_dict(keep))

    def subs_zero(self, var):
        if var not in self.names:
            return self
        return self.select(lambda exps: exps[var] == 0)

    def swap(self, a, b):
        names = self.names
        if (a in self.x_vars) != (b in self.x_vars) or (a in self.y_vars) != (b in self.y_vars):
            raise kernels_utils.IncompatibleError('cannot swap %s and %s with different roles' % (a, b))
        i, j = names.index(a), names.index(b)
        out = {}
        for m, c in self.poly.items():
            m = list(m)
            m[i], m[j] = m[j], m[i]
            out[tuple(m)] = c
        shift = dict(self.shift)
        y_lo = dict(self.y_lo)
        if a in self.y_vars:
            shift[a], shift[b] = shift[b], shift[a]
            y_lo = {({a: b, b: a}.get(k, k)): v for k, v in y_lo.items()}
        return self.replace(poly=self.ring.from_dict(out), shift=shift, y_lo=y_lo)

    def residue(self, y):
        """Coefficient of y**-1, as a series without y."""
        if y not in self.y_vars:
            raise kernels_utils.WindowError('%s is not a Laurent variable of this series' % y)
        lo = self.y_lo.get(y)
        if lo is not None and lo > -1:
            raise kernels_utils.WindowError('window of %s starts at %d and excludes -1' % (y, lo))
        i = self.names.index(y)
        target = self.shift[y] - 1
        out = {}
        for m, c in self.poly.items():
            if m[i] == target:
                out[m[:i] + (0,) + m[i + 1:]] = c
        y_vars = tuple(v for v in self.y_vars if v != y)
        return Series(self.ring.from_dict(out), self.x_vars, self.trunc, y_vars,
                      {v: self.shift[v] for v in y_vars}, {v: lo for v, lo in self.y_lo.items() if v != y})

    def equals(self, other) -> bool:
        return (self - other).is_zero()

    def first_term(self) -> str:
        for exps, coeff in self.terms():
            monomial = '*'.join('%s^%d' % (n, e) for n, e in exps.items() if e) or '1'
            return '%s*%s' % (format_rat(coeff), monomial)
        return '0'

    def as_expr(self):
        expr = self.poly.as_expr()
        for y, s in self.shift.items():
            if s:
                expr = expr / self.ring.symbols[self.names.index(y)] ** s
        return expr

    def __repr__(self):
        return 'Series(%s, trunc=%s, y_lo=%s)' % (self.as_expr(), self.trunc, self.y_lo)


def constant_part(a: Series) -> Series:
    return a.select(lambda exps: sum(exps[x] for x in a.x_vars) == 0)


def series_pow_fractional(a: Series, e) -> Series:
    e = parse_rat(e)
    if a.trunc is None:
        raise kernels_utils.ParamsError('fractional power needs a truncated series')
    if not (constant_part(a) - 1).is_zero():
        raise kernels_utils.ParamsError('constant term must be 1, got %s' % constant_part(a).as_expr())
    h = a - 1
    result = h * 0 + 1
    power = h * 0 + 1
    for n in range(1, a.trunc + 1):
        power = (power * h).truncate(a.trunc)
        coeff = binomial(e, n)
        if coeff:
            result = result + power * coeff
    return result.truncate(a.trunc)


def series_sqrt(a: Series) -> Series:
    return series_pow_fractional(a, QQ(1, 2))


def residue_y(f: Series, y: str) -> Series:
    return f.residue(y)


def geometric(var: str, ratio, trunc: int, names=None) -> Series:
    """1 / (1 - ratio * var) to total degree trunc."""
    names = tuple(names or (var,))
    ratio = parse_rat(ratio)
    i = names.index(var)
    entries = []
    for k in range(trunc + 1):
        exps = [0] * len(names)
        exps[i] = k
        entries.append((exps, ratio ** k))
    return Series.from_terms(names, entries, x_vars=(var,), trunc=trunc)


def inverse_power_at_infinity(y: str, a, m: int, depth: int) -> Series:
    """(y - a) ** -m expanded in 1/y, faithful for exponents >= -depth."""
    a = parse_rat(a)
    entries = [((-(m + j),), binomial(m + j - 1, j) * a ** j) for j in range(0, depth - m + 1)]
    return Series.from_terms((y,), entries, y_vars=(y,), y_lo={y: -depth})


def variable(name: str, role='x') -> Series:
    ring = make_ring((name,))
    if role == 'x':
        return Series(ring.gens[0], x_vars=(name,))
    if role == 'y':
        return Series(ring.gens[0], y_vars=(name,))
    return Series(ring.gens[0])


def monomial_label(exps: dict) -> str:
    return ', '.join('%s^%d' % (n, e) for n, e in sorted(exps.items()) if e) or '1'


def first_difference(a: Series, b: Series, within=None):
    """First term of a - b on the common faithful window (optionally restricted), or None."""
    diff = a - b
    if within is not None:
        diff = diff.select(within)
    for exps, coeff in diff.terms():
        return exps, coeff
    return None


def format_bigf(value, bits: int) -> dict:
    def hex_float(x):
        man, exp = x.man_exp
        if not man:
            return '0x0p+0'
        return '%s0x%xp%+d' % ('-' if man < 0 else '', abs(int(man)), int(exp))

    if type(value).__name__ == 'mpc':
        return {'real': hex_float(value.real), 'imag': hex_float(value.imag), 'precision': bits}
    return {'value': hex_float(value), 'precision': bits}
