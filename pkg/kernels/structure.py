"""
Structure constants of the polynomial product in the basis P_i (g=1) and in the
product basis P_j1...P_jg (any g).
"""
import logging

from sympy import QQ
from sympy.polys.matrices import DomainMatrix

from kernels import utils as kernels_utils
from kernels.exact import evaluate, format_rat, make_ring, parse_rat, rand_rat_point
from kernels.ode import SolutionTable

logger = logging.getLogger(__name__)


class SCTable(object):
    """C[(i, j)] = {k: C_ij^k}, stored for every ordered pair with i, j <= upto."""

    def __init__(self, upto: int, entries: dict):
        self.upto = upto
        self.entries = entries

    def row(self, i: int, j: int) -> dict:
        if (i, j) not in self.entries:
            raise kernels_utils.PlanError('C_{%d,%d} is outside the table (upto %d)' % (i, j, self.upto))
        return self.entries[(i, j)]

    def coefficient(self, i, j, k):
        return self.row(i, j).get(k, QQ.zero)

    def corrupted(self, i, j, k, delta=1):
        entries = {key: dict(row) for key, row in self.entries.items()}
        entries[(i, j)][k] = entries[(i, j)].get(k, QQ.zero) + delta
        return SCTable(self.upto, entries)

    def to_entries(self) -> list:
        return [[i, j, k, format_rat(v)] for (i, j), row in sorted(self.entries.items()) for k, v in sorted(row.items())]

    @classmethod
    def from_entries(cls, upto: int, items) -> 'SCTable':
        entries = {(i, j): {} for i in range(upto + 1) for j in range(upto + 1)}
        for i, j, k, v in items:
            entries[(int(i), int(j))][int(k)] = parse_rat(v)
        return cls(upto, entries)

    def __eq__(self, other):
        return isinstance(other, SCTable) and self.upto == other.upto and self.entries == other.entries


class GenSCTable(object):
    """D[I][J]: coefficient of P_J in prod P_I, for sorted I (g+1 indices) and sorted J (g indices)."""

    def __init__(self, g: int, upto: int, entries: dict):
        self.g = g
        self.upto = upto
        self.entries = entries
        weights = {}
        for I, row in entries.items():
            if row:
                weights[sum(I)] = max(weights.get(sum(I), 0), max(sum(J) for J in row))
        self.support = weights
        self.support_bound = max(weights.values()) if weights else 0

    def row(self, indices) -> dict:
        I = tuple(sorted(indices))
        if I not in self.entries:
            raise kernels_utils.PlanError('product %s is outside the table (upto %d)' % (I, self.upto))
        return self.entries[I]

    def coefficient(self, upper, lower):
        """Per-tuple constant C^{lower}_{upper}: the multiset value spread over distinct orderings."""
        J = tuple(sorted(lower))
        return self.row(upper).get(J, QQ.zero) / kernels_utils.perms_count(J)

    def corrupted(self, upper, lower, delta=1):
        entries = {key: dict(row) for key, row in self.entries.items()}
        I, J = tuple(sorted(upper)), tuple(sorted(lower))
        entries[I][J] = entries[I].get(J, QQ.zero) + delta
        return GenSCTable(self.g, self.upto, entries)

    def to_entries(self) -> list:
        return [[list(I), list(J), format_rat(v)] for I, row in sorted(self.entries.items()) for J, v in sorted(row.items())]

    @classmethod
    def from_entries(cls, g: int, upto: int, items) -> 'GenSCTable':
        entries = {I: {} for I in kernels_utils.multisets(g + 1, upto)}
        for I, J, v in items:
            entries[tuple(I)][tuple(J)] = parse_rat(v)
        return cls(g, upto, entries)

    def __eq__(self, other):
        return isinstance(other, GenSCTable) and (self.g, self.upto, self.entries) == (other.g, other.upto, other.entries)


def solve_exact(rows: list, rhs_columns: list, ncols: int):
    """
    Solves A x = b for every b in rhs_columns by one rref of the augmented matrix.
    Returns the solution vectors; BasisError when A has dependent columns or a b is
    outside its span (the index of that b is attached).
    """
    nrows = len(rows)
    aug = [list(row) + [col[r] for col in rhs_columns] for r, row in enumerate(rows)]
    matrix = DomainMatrix(aug, (nrows, ncols + len(rhs_columns)), QQ)
    rref, pivots = matrix.rref()
    if tuple(pivots[:ncols]) != tuple(range(ncols)):
        raise kernels_utils.BasisError('columns are linearly dependent (rank %d < %d)'
                                       % (len([p for p in pivots if p < ncols]), ncols))
    reduced = rref.to_list()
    solutions = []
    for c in range(len(rhs_columns)):
        for r in range(ncols, nrows):
            if reduced[r][ncols + c]:
                error = kernels_utils.BasisError('right-hand side %d is not in the span' % c)
                error.index = c
                raise error
        solutions.append([reduced[r][ncols + c] for r in range(ncols)])
    return solutions


def weighted_monomials(g: int, w: int) -> list:
    """Exponent tuples over lam1..lamg with sum (k+1) e_k <= w."""
    if g == 0:
        return [()]
    result = []
    for e in range(w // g + 1):
        for rest in weighted_monomials(g - 1, w - g * e):
            result.append(rest + (e,))
    return sorted(result)


def _product(sol: SolutionTable, indices):
    poly = sol.ring.one
    for i in indices:
        poly = poly * sol.P[i]
    return poly


def check_basis(sol: SolutionTable, W: int) -> dict:
    g = sol.g
    blocks = []
    for w in range(W + 1):
        basis = kernels_utils.multisets(g, w)
        products = [_product(sol, J) for J in basis]
        monomials = weighted_monomials(g, w)
        extra = sorted({m for p in products for m in p.keys()} - set(monomials))
        rows = monomials + extra
        index = {m: r for r, m in enumerate(rows)}
        data = [[QQ.zero] * len(basis) for _ in rows]
        for c, p in enumerate(products):
            for m, v in p.items():
                data[index[m]][c] = v
        rank = DomainMatrix(data, (len(rows), len(basis)), QQ).rank()
        blocks.append({
            'weight': w,
            'monomials': len(monomials),
            'products': len(basis),
            'rank': rank,
            'independent': rank == len(basis),
            'spanning': not extra and rank == len(monomials),
        })
    return {
        'independent': all(b['independent'] for b in blocks),
        'spanning': all(b['spanning'] for b in blocks),
        'span_defect': [b['weight'] for b in blocks if not b['spanning']],
        'blocks': blocks,
    }


def _lam_basis_table(P: list) -> list:
    """T[k] = {m: coefficient}: lam^k written in the basis P_m (back substitution)."""
    T = []
    for k, p in enumerate(P):
        if p.degree() != k:
            raise kernels_utils.BasisError('deg P_%d = %d, expected %d' % (k, p.degree(), k))
        lc = p.get((k,), QQ.zero)
        if not lc:
            raise kernels_utils.BasisError('leading coefficient of P_%d vanishes' % k)
        row = {k: QQ.one / lc}
        for m in range(k):
            c = p.get((m,), QQ.zero)
            if not c:
                continue
            for idx, v in T[m].items():
                row[idx] = row.get(idx, QQ.zero) - c / lc * v
        T.append({m: v for m, v in row.items() if v})
    return T


def structure_constants(sol: SolutionTable, N: int) -> SCTable:
    if sol.g != 1:
        raise kernels_utils.ParamsError('structure_constants needs g = 1, got %d' % sol.g)
    if sol.upto < 2 * N:
        raise kernels_utils.PlanError('solution table reaches %d, products up to %d need P_%d'
                                      % (sol.upto, N, 2 * N))
    T = _lam_basis_table(sol.P[:2 * N + 1])
    entries = {}
    for i in range(N + 1):
        for j in range(i, N + 1):
            row = {}
            for (e,), c in (sol.P[i] * sol.P[j]).items():
                for m, v in T[e].items():
                    row[m] = row.get(m, QQ.zero) + c * v
            row = {k: v for k, v in row.items() if v}
            entries[(i, j)] = entries[(j, i)] = row
    logger.debug('structure constants for %s up to %d', sol.op.family, N)
    return SCTable(N, entries)


def gen_structure_constants(sol: SolutionTable, N: int) -> GenSCTable:
    g = sol.g
    basis = kernels_utils.multisets(g, N)
    for i, w in enumerate(sol.weighted_degrees[:N + 1]):
        if w > i:
            raise kernels_utils.BasisError('P_%d has weighted degree %d > %d' % (i, w, i))
    monomials = weighted_monomials(g, N)
    index = {m: r for r, m in enumerate(monomials)}
    columns = [_product(sol, J) for J in basis]
    rows = [[QQ.zero] * len(basis) for _ in monomials]
    for c, p in enumerate(columns):
        for m, v in p.items():
            rows[index[m]][c] = v
    uppers = kernels_utils.multisets(g + 1, N)
    rhs = []
    for I in uppers:
        col = [QQ.zero] * len(monomials)
        for m, v in _product(sol, I).items():
            col[index[m]] = v
        rhs.append(col)
    try:
        solutions = solve_exact(rows, rhs, len(basis))
    except kernels_utils.BasisError as e:
        if getattr(e, 'index', None) is None:
            raise
        raise kernels_utils.BasisError('product %s is not in the span of the product basis' % (uppers[e.index],))
    entries = {}
    for I, vector in zip(uppers, solutions):
        entries[I] = {J: v for J, v in zip(basis, vector) if v}
    table = GenSCTable(g, N, entries)
    logger.debug('generalized structure constants g=%d N=%d support bound %d', g, N, table.support_bound)
    return table


def _lam_points(sol: SolutionTable, samples: int, seed: int, points=None):
    names = [str(s) for s in sol.ring.symbols]
    if points is not None:
        return [dict(zip(names, p if isinstance(p, (list, tuple)) else (p,))) for p in points]
    return [rand_rat_point(names, 100, seed * 1000 + s) for s in range(samples)]


def evaluate_product_identity(table, sol: SolutionTable, samples: int = 10, seed: int = 1, points=None) -> int:
    """Pointwise check of the product expansion; returns the number of points used."""
    lam_points = [{k: parse_rat(v) for k, v in p.items()} for p in _lam_points(sol, samples, seed, points)]
    for point in lam_points:
        values = [evaluate(p, point) for p in sol.P]
        if isinstance(table, SCTable):
            for (i, j), row in sorted(table.entries.items()):
                rhs = sum((v * values[k] for k, v in row.items()), QQ.zero)
                if values[i] * values[j] != rhs:
                    raise kernels_utils.MismatchError('C_{%d,%d} fails at %s' % (i, j, _fmt_point(point)))
        else:
            for I, row in sorted(table.entries.items()):
                lhs = QQ.one
                for i in I:
                    lhs *= values[i]
                rhs = QQ.zero
                for J, v in row.items():
                    term = v
                    for j in J:
                        term *= values[j]
                    rhs += term
                if lhs != rhs:
                    raise kernels_utils.MismatchError('C_%s fails at %s' % (I, _fmt_point(point)))
    return len(lam_points)


def _fmt_point(point: dict) -> str:
    return '{%s}' % ', '.join('%s: %s' % (k, format_rat(v)) for k, v in sorted(point.items()))


def interpolate_entry(sol: SolutionTable, i: int, j: int) -> dict:
    """C_ij^k recomputed from the values at lam = 0..i+j (g=1)."""
    n = i + j + 1
    ring = make_ring(sol.op.lambdas)
    name = str(ring.symbols[0])
    rows, rhs = [], []
    for s in range(n):
        point = {name: QQ(s)}
        rows.append([evaluate(sol.P[m], point) for m in range(n)])
        rhs.append([evaluate(sol.P[i], point) * evaluate(sol.P[j], point)])
    A = DomainMatrix(rows, (n, n), QQ)
    b = DomainMatrix(rhs, (n, 1), QQ)
    x = A.lu_solve(b).to_list()
    return {k: x[k][0] for k in range(n) if x[k][0]}


def symmetry_check(table) -> int:
    count = 0
    if isinstance(table, SCTable):
        for (i, j), row in table.entries.items():
            if table.entries.get((j, i)) != row:
                raise kernels_utils.MismatchError('C_{%d,%d} != C_{%d,%d}' % (i, j, j, i))
            count += 1
    else:
        for I in table.entries:
            if tuple(sorted(I)) != I:
                raise kernels_utils.MismatchError('unsorted representative %s' % (I,))
            for J in table.entries[I]:
                if tuple(sorted(J)) != J:
                    raise kernels_utils.MismatchError('unsorted lower index %s under %s' % (J, I))
                count += 1
    return count


def triangular_check(table: SCTable) -> int:
    for (i, j), row in table.entries.items():
        for k, v in row.items():
            if k > i + j and v:
                raise kernels_utils.MismatchError('C_{%d,%d}^%d = %s above i+j' % (i, j, k, format_rat(v)))
        if j == 0 and row != {i: QQ.one}:
            raise kernels_utils.MismatchError('C_{%d,0} is not the unit row' % i)
    return len(table.entries)
