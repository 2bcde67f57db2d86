"""
Residue pairings of kernels: composite constants, associativity and the product identity.

Contour integrals are coefficient-of-y^-1 extractions, so every pairing here is
an exact finite sum over table entries or a ``Series.residue`` call.
"""
import logging

from sympy import QQ

from kernels import utils as kernels_utils
from kernels.exact import Series, format_rat, monomial_label
from kernels.kernel import build_kernel, kernel_vars
from kernels.ode import SolutionTable
from kernels.structure import GenSCTable, SCTable

logger = logging.getLogger(__name__)


class ConvolutionPlan(object):
    """oint K(x1, x2, y) K(y, x3, z) dy for outer indices up to N."""

    def __init__(self, left: SCTable, right: SCTable, N: int):
        if left.upto < N:
            raise kernels_utils.PlanError('left table reaches %d, outer indices need %d' % (left.upto, N))
        if right.upto < 2 * N:
            raise kernels_utils.PlanError('right table reaches %d, middle sums need %d' % (right.upto, 2 * N))
        self.left = left
        self.right = right
        self.N = N
        self.contracted = ('y',)
        self.outputs = ('x1', 'x2', 'x3', 'z')


def convolve(plan: ConvolutionPlan) -> dict:
    """{(i1, i2, i3): {k: sum_m C_{i1,i2}^m C_{m,i3}^k}} for every i <= N."""
    N = plan.N
    composite = {}
    for i1 in range(N + 1):
        for i2 in range(N + 1):
            middle = plan.left.row(i1, i2)
            for i3 in range(N + 1):
                out = {}
                for m, c in middle.items():
                    for k, v in plan.right.row(m, i3).items():
                        out[k] = out.get(k, QQ.zero) + c * v
                composite[(i1, i2, i3)] = {k: v for k, v in out.items() if v}
    return composite


def composite_series(composite: dict, trunc: int) -> Series:
    """sum x1^i1 x2^i2 x3^i3 z^(-k-1) over a composite table, to total x-degree trunc."""
    names = ('x1', 'x2', 'x3', 'z')
    terms = [([i1, i2, i3, -k - 1], v)
             for (i1, i2, i3), row in composite.items() if i1 + i2 + i3 <= trunc
             for k, v in row.items()]
    return Series.from_terms(names, terms, x_vars=names[:3], trunc=trunc, y_vars=('z',))


def assoc_check(table: SCTable, N: int) -> int:
    """Both bracketings of the triple product agree; returns the number of entries compared."""
    composite = convolve(ConvolutionPlan(table, table, N))
    for (i1, i2, i3), row in sorted(composite.items()):
        other = composite[(i1, i3, i2)]
        if row != other:
            for k in sorted(set(row) | set(other)):
                if row.get(k, QQ.zero) != other.get(k, QQ.zero):
                    raise kernels_utils.MismatchError(
                        'associativity fails at i=%s, k=%d: %s != %s'
                        % ((i1, i2, i3), k, format_rat(row.get(k, QQ.zero)), format_rat(other.get(k, QQ.zero))))
    logger.debug('associativity checked on %d composite rows', len(composite))
    return len(composite)


def gen_composite(table: GenSCTable, indices) -> dict:
    """
    Composite constants of mu o (mu x id) for one ordered upper tuple of g+2 indices:
    E^L = sum_j C^j_{i1..i(g+1)} D^L_{j + i(g+2)}, keyed by sorted L.
    """
    head, last = tuple(indices[:-1]), indices[-1]
    out = {}
    for J in table.row(head):
        share = table.coefficient(head, J)
        for j in kernels_utils.distinct_permutations(J):
            for L, v in table.row(tuple(j) + (last,)).items():
                out[L] = out.get(L, QQ.zero) + share * v
    return {L: v for L, v in out.items() if v}


def gen_assoc_check(table: GenSCTable, N: int) -> int:
    """The composite is symmetric in all g+2 upper indices; returns the number of orderings compared."""
    if table.upto < N:
        raise kernels_utils.PlanError('table reaches %d, composite sums need %d' % (table.upto, N))
    compared = 0
    for I in kernels_utils.multisets(table.g + 2, N):
        reference = gen_composite(table, I)
        for i in kernels_utils.distinct_permutations(I):
            if gen_composite(table, i) != reference:
                raise kernels_utils.MismatchError('composite for upper indices %s differs from %s' % (i, I))
            compared += 1
    logger.debug('generalized associativity: %d orderings', compared)
    return compared


def _sym_product(table: GenSCTable, ab, cd) -> dict:
    """(P_a P_b)(P_c P_d) in the basis of symmetric pairs."""
    a, b = ab
    c, d = cd
    out = {}
    for J, v in table.row((a, b, c)).items():
        for L, w in table.row(J + (d,)).items():
            out[L] = out.get(L, QQ.zero) + v * w
    return {L: v for L, v in out.items() if v}


def sym_power_check(table: GenSCTable, N: int) -> int:
    """
    The product of Sym^2 elements induced by the composite is commutative and
    associative for index sets of total weight at most N (g = 2 only).
    """
    if table.g != 2:
        raise kernels_utils.ParamsError('symmetric-square probe is defined for g = 2')
    if table.upto < N:
        raise kernels_utils.PlanError('table reaches %d, symmetric-square sums need %d' % (table.upto, N))
    pairs = kernels_utils.multisets(2, N)
    checked = 0
    for p in pairs:
        for q in pairs:
            if sum(p) + sum(q) > N:
                continue
            if _sym_product(table, p, q) != _sym_product(table, q, p):
                raise kernels_utils.MismatchError('symmetric-square product not commutative at %s, %s' % (p, q))
            checked += 1
            for r in pairs:
                if sum(p) + sum(q) + sum(r) > N:
                    continue
                left, right = {}, {}
                for L, v in _sym_product(table, p, q).items():
                    for R, w in _sym_product(table, L, r).items():
                        left[R] = left.get(R, QQ.zero) + v * w
                for L, v in _sym_product(table, q, r).items():
                    for R, w in _sym_product(table, p, L).items():
                        right[R] = right.get(R, QQ.zero) + v * w
                left = {k: v for k, v in left.items() if v}
                right = {k: v for k, v in right.items() if v}
                if left != right:
                    raise kernels_utils.MismatchError('symmetric-square product not associative at %s, %s, %s'
                                                      % (p, q, r))
                checked += 1
    return checked


def product_identity_check(table, sol: SolutionTable, N=None) -> int:
    """
    Residues of K * prod f(y_k) reproduce prod f(x_i) to total x-degree N.
    Returns N.
    """
    N = table.upto if N is None else N
    kernel = build_kernel(table, N)
    if sol.upto < N:
        raise kernels_utils.PlanError('solution known up to %d, pairing needs %d' % (sol.upto, N))
    g = 1 if isinstance(table, SCTable) else table.g
    x_vars, y_vars = kernel_vars(g)
    paired = kernel.series
    for y in y_vars:
        paired = (paired * sol.generating_series(y, N, role='y')).residue(y)
    expected = None
    for x in x_vars:
        f = sol.generating_series(x, N, role='x')
        expected = f if expected is None else expected * f
    diff = paired - expected.truncate(N)
    for exps, coeff in diff.terms():
        raise kernels_utils.MismatchError('product identity differs at %s by %s' % (monomial_label(exps), format_rat(coeff)))
    return N
