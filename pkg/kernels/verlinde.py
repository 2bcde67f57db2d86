"""
The piecewise-linear kernel: indicator of the closed tetrahedron

    x <= y + z,  y <= x + z,  z <= x + y,  x + y + z <= TETRA_SUM_BOUND

on [0, 1]^3, the algebras A_n it induces on the grid {0, 1/n, ..., 1}, and the
comparison of the fibers of the two polytopes over (x1, x2, x3, x4).
"""
import logging
import random

import numpy as np
from django.conf import settings
from sympy import QQ

from kernels import utils as kernels_utils
from kernels.exact import format_rat, parse_rat

logger = logging.getLogger(__name__)

EINSUM_MAX_N = 20


def _bound():
    return parse_rat(getattr(settings, 'TETRA_SUM_BOUND', 2))


def _unit(value):
    value = parse_rat(value)
    if value < 0 or value > 1:
        raise kernels_utils.ParamsError('%s is outside [0, 1]' % format_rat(value))
    return value


def tetra_kernel(x, y, z, bound=None) -> int:
    x, y, z = _unit(x), _unit(y), _unit(z)
    bound = _bound() if bound is None else parse_rat(bound)
    return int(x <= y + z and y <= x + z and z <= x + y and x + y + z <= bound)


class GridAlgebra(object):
    """A_n with basis e_0 .. e_n for the grid points 0, 1/n, .., 1; table[a, b, c] = K(a/n, b/n, c/n)."""

    def __init__(self, n: int, table: np.ndarray):
        self.n = n
        self.table = table

    @property
    def dimension(self) -> int:
        return self.n + 1

    def product(self, a: int, b: int) -> dict:
        return {c: int(v) for c, v in enumerate(self.table[a, b]) if v}

    def support(self, a: int, b: int) -> list:
        return [c for c in range(self.dimension) if self.table[a, b, c]]

    def is_commutative(self) -> bool:
        return bool((self.table == self.table.transpose(1, 0, 2)).all())

    def to_json(self) -> dict:
        return {'n': self.n, 'products': {'%d,%d' % (a, b): self.support(a, b)
                                          for a in range(self.dimension) for b in range(a, self.dimension)}}


def build_algebra(n: int, bound=None) -> GridAlgebra:
    if n < 1:
        raise kernels_utils.ParamsError('level must be at least 1')
    bound = _bound() if bound is None else parse_rat(bound)
    # in grid units every inequality is integral
    limit = bound * n
    idx = np.arange(n + 1)
    a, b, c = np.meshgrid(idx, idx, idx, indexing='ij')
    table = ((a <= b + c) & (b <= a + c) & (c <= a + b) & (a + b + c <= int(limit.numerator) // int(limit.denominator)))
    logger.debug('A_%d built, %d nonzero structure constants', n, int(table.sum()))
    return GridAlgebra(n, table.astype(np.int64))


def assoc_test(algebra: GridAlgebra) -> int:
    """Exhaustive (e_a e_b) e_c = e_a (e_b e_c); returns the number of triples checked."""
    t = algebra.table
    if algebra.n <= EINSUM_MAX_N:
        left = np.einsum('abx,xcd->abcd', t, t)
        right = np.einsum('bcx,axd->abcd', t, t)
        bad = np.argwhere(left != right)
        if len(bad):
            a, b, c, d = (int(v) for v in bad[0])
            raise kernels_utils.MismatchError('A_%d: coefficient of e_%d in (e_%d e_%d) e_%d is %d, in e_%d (e_%d e_%d) %d'
                                              % (algebra.n, d, a, b, c, left[a, b, c, d], a, b, c, right[a, b, c, d]))
        return algebra.dimension ** 3
    dim = algebra.dimension
    for a in range(dim):
        for b in range(dim):
            ab = t[a, b] @ t.reshape(dim, -1)
            for c in range(dim):
                left = ab.reshape(dim, dim)[c]
                right = t[a].T @ t[b, c]
                if (left != right).any():
                    raise kernels_utils.MismatchError('A_%d fails associativity at (%d, %d, %d)' % (algebra.n, a, b, c))
    return dim ** 3


def support_check(algebra: GridAlgebra, bound=None) -> int:
    """Product support equals the grid points on the closed tetrahedron."""
    n = algebra.n
    for a in range(n + 1):
        for b in range(n + 1):
            expected = [c for c in range(n + 1) if tetra_kernel(QQ(a, n), QQ(b, n), QQ(c, n), bound)]
            if algebra.support(a, b) != expected:
                raise kernels_utils.MismatchError('A_%d: e_%d e_%d supported on %s, expected %s'
                                                  % (n, a, b, algebra.support(a, b), expected))
    return (n + 1) ** 2


def _pair_interval(a, b, bound):
    """{y in [0, 1] : (a, b, y) in the closed tetrahedron}, as (lo, hi) or None."""
    lo = max(abs(a - b), QQ(0))
    hi = min(a + b, bound - a - b, QQ(1))
    return (lo, hi) if lo <= hi else None


def _meet(i, j):
    if i is None or j is None:
        return None
    lo, hi = max(i[0], j[0]), min(i[1], j[1])
    return (lo, hi) if lo <= hi else None


def _fmt_interval(interval):
    return None if interval is None else [format_rat(interval[0]), format_rat(interval[1])]


def fiber_compare(x1, x2, x3, x4, bound=None) -> dict:
    """
    Fibers over (x1..x4) of P1 = {(x1,x2,y), (y,x3,x4) in K} and
    P2 = {(x1,x3,y), (y,x2,x4) in K}: both empty, or closed intervals of
    equal length identified by a shift.
    """
    x1, x2, x3, x4 = (_unit(v) for v in (x1, x2, x3, x4))
    bound = _bound() if bound is None else parse_rat(bound)
    first = _meet(_pair_interval(x1, x2, bound), _pair_interval(x3, x4, bound))
    second = _meet(_pair_interval(x1, x3, bound), _pair_interval(x2, x4, bound))
    report = {'interval1': _fmt_interval(first), 'interval2': _fmt_interval(second)}
    if (first is None) != (second is None):
        raise kernels_utils.MismatchError('exactly one fiber over (%s) is empty: %s / %s'
                                          % (', '.join(format_rat(v) for v in (x1, x2, x3, x4)),
                                             report['interval1'], report['interval2']))
    if first is None:
        report.update(equal_length=True, shift=None)
        return report
    report['equal_length'] = first[1] - first[0] == second[1] - second[0]
    report['shift'] = format_rat(second[0] - first[0])
    if not report['equal_length']:
        raise kernels_utils.MismatchError('fibers over (%s) differ: %s / %s'
                                          % (', '.join(format_rat(v) for v in (x1, x2, x3, x4)),
                                             report['interval1'], report['interval2']))
    return report


def fiber_samples(samples: int, seed: int, denominator: int = 1000, bound=None) -> int:
    rng = random.Random(seed)
    for _ in range(samples):
        xs = [QQ(rng.randint(0, denominator), denominator) for _ in range(4)]
        fiber_compare(*xs, bound=bound)
    return samples


def fiber_grid(n: int, bound=None) -> int:
    grid = [QQ(k, n) for k in range(n + 1)]
    count = 0
    for x1 in grid:
        for x2 in grid:
            for x3 in grid:
                for x4 in grid:
                    fiber_compare(x1, x2, x3, x4, bound=bound)
                    count += 1
    return count


def fault_inject(algebra: GridAlgebra, a: int, b: int, c: int) -> GridAlgebra:
    """Flips one structure constant symmetrically, for negative tests."""
    table = algebra.table.copy()
    table[a, b, c] = 1 - table[a, b, c]
    table[b, a, c] = table[a, b, c]
    return GridAlgebra(algebra.n, table)
