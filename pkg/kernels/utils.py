from itertools import combinations_with_replacement
from math import factorial

from sympy.utilities.iterables import multiset_permutations


class BaseKernelError(Exception):
    pass


class ParamsError(BaseKernelError):
    """Bad configuration, violated family constraint or unsatisfiable sampling request."""
    pass


class ResonanceError(BaseKernelError):
    def __init__(self, index, message=None):
        self.index = index
        super().__init__(message or 'resonant index %s' % (index,))


class WindowError(BaseKernelError):
    pass


class IncompatibleError(BaseKernelError):
    pass


class BasisError(BaseKernelError):
    pass


class PlanError(BaseKernelError):
    pass


class MismatchError(BaseKernelError):
    pass


class CorruptCacheError(BaseKernelError):
    pass


class SkipCheck(Exception):
    pass


def falling(i: int, k: int) -> int:
    result = 1
    for l in range(k):
        result *= i - l
    return result


def perms_count(indices) -> int:
    """Number of distinct orderings of a multiset."""
    result = factorial(len(indices))
    for value in set(indices):
        result //= factorial(list(indices).count(value))
    return result


def multisets(size: int, total: int):
    """Non-decreasing tuples of length size with sum at most total."""
    return [c for c in combinations_with_replacement(range(total + 1), size) if sum(c) <= total]


def distinct_permutations(indices):
    """Distinct orderings of a multiset, in lexicographic order."""
    return [tuple(p) for p in multiset_permutations(list(indices))]
