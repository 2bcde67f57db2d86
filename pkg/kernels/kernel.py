"""
Kernels as generating series of structure constants and their structural checks.
"""
import json
import logging
import random
from itertools import product

from sympy import QQ

from kernels import utils as kernels_utils
from kernels.exact import Series, format_rat, make_ring, monomial_label, parse_rat
from kernels.ode import DiffOp, apply_op
from kernels.structure import GenSCTable, SCTable

logger = logging.getLogger(__name__)


def kernel_vars(g: int):
    x_vars = tuple('x%d' % (i + 1) for i in range(g + 1))
    y_vars = ('y',) if g == 1 else tuple('y%d' % (i + 1) for i in range(g))
    return x_vars, y_vars


class Kernel(object):
    def __init__(self, series: Series, g: int, trunc: int):
        self.series = series
        self.g = g
        self.trunc = trunc
        self.x_vars, self.y_vars = kernel_vars(g)

    @property
    def depth(self) -> int:
        """M such that every y-exponent lies in [-M, -1]."""
        depth = 1
        for exps, _ in self.series.terms():
            depth = max([depth] + [-exps[y] for y in self.y_vars])
        return depth

    def coefficient(self, x_exps, y_exps):
        exps = dict(zip(self.x_vars, x_exps))
        exps.update(zip(self.y_vars, y_exps))
        return self.series.coeff(**exps)

    def replace_series(self, series: Series) -> 'Kernel':
        return Kernel(series, self.g, self.trunc)

    def to_json(self) -> str:
        entries = []
        for exps, coeff in self.series.terms():
            entries.append([[exps[x] for x in self.x_vars], [exps[y] for y in self.y_vars], format_rat(coeff)])
        return json.dumps({
            'g': self.g,
            'x_trunc': self.trunc,
            'y_window': [-self.depth, -1],
            'entries': entries,
        }, sort_keys=True, indent=4)

    @classmethod
    def from_json(cls, text: str) -> 'Kernel':
        try:
            data = json.loads(text)
            g, trunc, entries = int(data['g']), int(data['x_trunc']), data['entries']
            lo, hi = data['y_window']
        except (ValueError, KeyError, TypeError) as e:
            raise kernels_utils.ParamsError('malformed kernel file: %s' % e)
        x_vars, y_vars = kernel_vars(g)
        terms = []
        for x_exps, y_exps, value in entries:
            if len(x_exps) != g + 1 or len(y_exps) != g:
                raise kernels_utils.ParamsError('entry %s has the wrong number of exponents' % [x_exps, y_exps])
            if any(e < 0 for e in x_exps) or sum(x_exps) > trunc:
                raise kernels_utils.ParamsError('x exponents %s outside truncation %d' % (x_exps, trunc))
            if any(e > -1 or e < lo for e in y_exps) or hi != -1:
                raise kernels_utils.ParamsError('y exponents %s outside window [%d, -1]' % (y_exps, lo))
            terms.append((list(x_exps) + list(y_exps), parse_rat(value)))
        series = Series.from_terms(x_vars + y_vars, terms, x_vars=x_vars, trunc=trunc, y_vars=y_vars)
        return cls(series, g, trunc)


def build_kernel(table, N=None) -> Kernel:
    N = table.upto if N is None else N
    if N > table.upto:
        raise kernels_utils.PlanError('kernel to %d needs a table up to %d, got %d' % (N, N, table.upto))
    if isinstance(table, SCTable):
        g = 1
        x_vars, y_vars = kernel_vars(1)
        terms = []
        for i in range(N + 1):
            for j in range(N + 1 - i):
                for k, c in table.row(i, j).items():
                    terms.append(([i, j, -k - 1], c))
    elif isinstance(table, GenSCTable):
        g = table.g
        x_vars, y_vars = kernel_vars(g)
        terms = []
        for I in kernels_utils.multisets(g + 1, N):
            for i in kernels_utils.distinct_permutations(I):
                for J, D in table.row(I).items():
                    share = D / kernels_utils.perms_count(J)
                    for j in kernels_utils.distinct_permutations(J):
                        terms.append((list(i) + [-e - 1 for e in j], share))
    else:
        raise kernels_utils.ParamsError('cannot build a kernel from %s' % type(table).__name__)
    series = Series.from_terms(x_vars + y_vars, terms, x_vars=x_vars, trunc=N, y_vars=y_vars)
    logger.debug('kernel g=%d N=%d with %d terms', g, N, len(series.poly))
    return Kernel(series, g, N)


def extract_table(kernel: Kernel) -> SCTable:
    """Reads C_ij^k back from a g=1 kernel."""
    if kernel.g != 1:
        raise kernels_utils.ParamsError('table extraction is defined for g = 1')
    N = kernel.trunc
    entries = {(i, j): {} for i in range(N + 1) for j in range(N + 1 - i)}
    for exps, coeff in kernel.series.terms():
        entries[(exps['x1'], exps['x2'])][-exps['y'] - 1] = coeff
    return SCTable(N, entries)


def geometric_boundary(kernel: Kernel) -> Series:
    """(1/n!) sum_sigma prod_i 1/(y_sigma(i) - x_i), x_{n+1} = 0, over the kernel's variables."""
    n = kernel.g
    names = kernel.x_vars + kernel.y_vars
    weight = QQ(1, len(list(kernels_utils.distinct_permutations(range(n)))))
    terms = []
    for i in product(range(kernel.trunc + 1), repeat=n):
        if sum(i) > kernel.trunc:
            continue
        for sigma in kernels_utils.distinct_permutations(range(n)):
            y_exps = [0] * n
            for k in range(n):
                y_exps[sigma[k]] = -i[k] - 1
            terms.append((list(i) + [0] + y_exps, weight))
    return Series.from_terms(names, terms, x_vars=kernel.x_vars, trunc=kernel.trunc, y_vars=kernel.y_vars)


def boundary_check(kernel: Kernel) -> int:
    sliced = kernel.series.subs_zero(kernel.x_vars[-1])
    diff = sliced - geometric_boundary(kernel)
    for exps, coeff in diff.terms():
        raise kernels_utils.MismatchError('boundary slice differs at %s by %s' % (monomial_label(exps), format_rat(coeff)))
    return len(sliced.poly)


def symmetry_check(kernel: Kernel) -> int:
    series = kernel.series
    pairs = [(a, b) for a, b in zip(kernel.x_vars, kernel.x_vars[1:])]
    pairs += [(a, b) for a, b in zip(kernel.y_vars, kernel.y_vars[1:])]
    for a, b in pairs:
        diff = series - series.swap(a, b)
        for exps, coeff in diff.terms():
            raise kernels_utils.MismatchError('asymmetric under %s<->%s at %s' % (a, b, monomial_label(exps)))
    return len(pairs)


def sign_check(kernel: Kernel) -> int:
    for exps, _ in kernel.series.terms():
        if any(exps[y] > -1 for y in kernel.y_vars) or any(exps[x] < 0 for x in kernel.x_vars):
            raise kernels_utils.MismatchError('exponent sign violated at %s' % monomial_label(exps))
    return len(kernel.series.poly)


def _vandermonde_weights(x_vars):
    """V / prod_{j != i} (x_j - x_i) for every i, with V = prod_{a<b} (x_b - x_a)."""
    ring = make_ring(tuple(x_vars))
    xs = ring.gens
    V = ring.one
    for a in range(len(xs)):
        for b in range(a + 1, len(xs)):
            V *= xs[b] - xs[a]
    weights = []
    for i in range(len(xs)):
        den = ring.one
        for j in range(len(xs)):
            if j != i:
                den *= xs[j] - xs[i]
        weights.append(V.exquo(den))
    return weights


def kernel_diffeq_check(kernel: Kernel, op: DiffOp) -> dict:
    """
    g=1: D0_x1 K = D0_x2 K and D0*_y K - D0_x1 K has no negative y-powers.
    g>=2: sum_i (V / prod_{j!=i}(x_j - x_i)) D0_{x_i} K = 0.
    Returns the faithful windows that were checked.
    """
    free = op.free_part()
    K = kernel.series
    windows = {}
    if kernel.g == 1:
        d1 = apply_op(free, K, 'x1')
        d2 = apply_op(free, K, 'x2')
        diff = d1 - d2
        for exps, coeff in diff.terms():
            raise kernels_utils.MismatchError('D_x1 K - D_x2 K = %s at %s' % (format_rat(coeff), monomial_label(exps)))
        windows['symmetric'] = diff.trunc
        dy = apply_op(free, K, 'y', adjoint=True)
        rest = (dy - d1).select(lambda exps: exps['y'] < 0)
        for exps, coeff in rest.terms():
            raise kernels_utils.MismatchError('D*_y K - D_x1 K has %s at %s' % (format_rat(coeff), monomial_label(exps)))
        windows['adjoint'] = rest.trunc
        return windows
    total = None
    for w, x in zip(_vandermonde_weights(kernel.x_vars), kernel.x_vars):
        term = Series.from_poly(w, x_vars=kernel.x_vars) * apply_op(free, K, x)
        total = term if total is None else total + term
    for exps, coeff in total.terms():
        raise kernels_utils.MismatchError('cleared identity has %s at %s' % (format_rat(coeff), monomial_label(exps)))
    windows['cleared'] = total.trunc
    return windows


def fault_inject(kernel: Kernel, exps: dict, delta=1) -> Kernel:
    names = kernel.series.names
    entry = ([exps.get(n, 0) for n in names], parse_rat(delta))
    bump = Series.from_terms(names, [entry], x_vars=kernel.x_vars, y_vars=kernel.y_vars)
    return kernel.replace_series(kernel.series + bump)


def kernel_properties(kernel: Kernel, op: DiffOp):
    """Runs every structural property; raises on the first failure."""
    sign_check(kernel)
    symmetry_check(kernel)
    kernel_diffeq_check(kernel, op)
    boundary_check(kernel)


def uniqueness_probe(kernel: Kernel, op: DiffOp, count: int = 5, seed: int = 1) -> list:
    """Fault-injects count random coefficients; each one must break some property."""
    terms = [exps for exps, _ in kernel.series.terms()]
    rng = random.Random(seed)
    chosen = rng.sample(terms, min(count, len(terms)))
    caught = []
    for exps in chosen:
        try:
            kernel_properties(fault_inject(kernel, exps), op)
        except kernels_utils.MismatchError as e:
            caught.append((monomial_label(exps), str(e)))
            continue
        raise kernels_utils.MismatchError('fault at %s went undetected' % monomial_label(exps))
    return caught
