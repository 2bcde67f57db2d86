"""
Check registry.

A check is a static method of a ``BaseChecks`` subclass decorated with
``@check``; the modules listed in ``settings.CHECK_MODULES`` are scanned once
and every non-abstract checks class registers its methods.
"""
import logging
import time
from collections import OrderedDict
from importlib import import_module

from django.conf import settings
from django.core.exceptions import ImproperlyConfigured

from base import utils as base_utils
from kernels import utils as kernels_utils
from kernels.cache import TableCache
from kernels.exact import format_rat
from kernels.kernel import build_kernel
from kernels.ode import PRESET_PARAMS, DiffOp, SolutionTable, expand_solution, preset_operator
from kernels.structure import gen_structure_constants, structure_constants

logger = logging.getLogger(__name__)

REGISTRY = OrderedDict()


class CheckInfo(object):
    def __init__(self, name: str, anchor: str, commands: tuple, targets, fnc):
        self.name = name
        self.anchor = anchor
        self.commands = commands
        self.targets = targets
        self.fnc = fnc

    def selected(self, command: str, target=None) -> bool:
        if command == 'all':
            return 'all' in self.commands
        if command not in self.commands:
            return False
        if target is None:
            return True
        if callable(self.targets):
            return self.targets(target)
        return not self.targets or target in self.targets


def check(name, anchor, commands=(), targets=()):
    def decorator(fnc):
        fnc.check_info = CheckInfo(name, anchor, tuple(commands), targets, fnc)
        return fnc

    return decorator


class BaseChecks(object):
    abstract = True

    @classmethod
    def is_abstract(cls):
        return cls.__dict__.get('abstract', False)

    @classmethod
    def define_checks(cls):
        for name in dir(cls):
            info = getattr(getattr(cls, name), 'check_info', None)
            if info is None:
                continue
            if info.name in REGISTRY and REGISTRY[info.name].fnc is not info.fnc:
                raise ImproperlyConfigured('check %s is defined twice' % info.name)
            REGISTRY[info.name] = info


def define_checks(path):
    module = import_module(path)
    for name in dir(module):
        kls = 'Checks' in name and getattr(module, name)
        if not isinstance(kls, type) or not issubclass(kls, BaseChecks):
            continue
        if not kls.is_abstract():
            kls.define_checks()


def load_checks():
    if not REGISTRY:
        for pth in settings.CHECK_MODULES:
            define_checks(pth)
    return REGISTRY


def select_checks(command: str, target=None) -> list:
    checks = [info for info in load_checks().values() if info.selected(command, target)]
    if not checks:
        raise kernels_utils.ParamsError('nothing to run for %s %s' % (command, target or ''))
    return sorted(checks, key=lambda info: info.name)


class RunContext(object):
    """Validated run config plus memoized expansions, tables and kernels shared by the checks of one run."""

    def __init__(self, config: dict):
        self.config = config
        self.command = config['command']
        self.target = config.get('target')
        self.seed = config.get('seed', 1)
        self.cache = TableCache(config['cache']) if config.get('cache') else None
        self._memo = {}

    def value(self, key, default):
        value = self.config.get(key)
        return default if value is None else value

    def memo(self, key, compute):
        if key not in self._memo:
            self._memo[key] = compute()
        return self._memo[key]

    def operator(self, family=None, params=None, g=None, preset=None) -> DiffOp:
        """
        The configured operator, or the preset one when the check pins a family
        the config does not name.
        """
        configured = family is None or family == self.config.get('family')
        family = family or self.config.get('family')
        if family is None:
            raise kernels_utils.ParamsError('no operator family configured')
        if configured and params is None:
            params = self.config.get('params')
            g = self.config.get('g', g)
        if family == 'custom':
            terms = self.config.get('operator')
            if not terms:
                raise kernels_utils.ParamsError('the custom family needs operator terms')
            key = ('op', 'custom', g, tuple(terms))
            return self.memo(key, lambda: DiffOp.from_strings(terms, g=g or 1))
        if params is None:
            params = PRESET_PARAMS.get(preset or family, {})
        params = {k: format_rat(v) for k, v in params.items()}
        key = ('op', family, g, tuple(sorted(params.items())))
        return self.memo(key, lambda: preset_operator(family, params, g))

    def _op_key(self, op: DiffOp) -> str:
        return base_utils.to_json(op.fingerprint())

    def solution(self, op: DiffOp, N: int):
        op_key = self._op_key(op)
        # a longer expansion serves every shorter request
        for key, sol in self._memo.items():
            if key[:2] == ('sol', op_key) and key[2] >= N:
                return SolutionTable(op, sol.P[:N + 1])
        return self.memo(('sol', op_key, N), lambda: expand_solution(op, N))

    def table(self, op: DiffOp, N: int):
        def compute():
            sol = self.solution(op, 2 * N)
            return structure_constants(sol, N)

        if self.cache is not None:
            return self.memo(('sc', self._op_key(op), N), lambda: self.cache.fetch(op, N, 'sc', compute))
        return self.memo(('sc', self._op_key(op), N), compute)

    def gen_table(self, op: DiffOp, N: int):
        def compute():
            return gen_structure_constants(self.solution(op, N), N)

        if self.cache is not None:
            return self.memo(('gensc', self._op_key(op), N), lambda: self.cache.fetch(op, N, 'gensc', compute))
        return self.memo(('gensc', self._op_key(op), N), compute)

    def kernel(self, op: DiffOp, N: int):
        def compute():
            table = self.table(op, N) if op.g == 1 else self.gen_table(op, N)
            return build_kernel(table, N)

        return self.memo(('kernel', self._op_key(op), N), compute)


def exec_check(info: CheckInfo, ctx: RunContext) -> dict:
    """Runs one check; kernel errors become a failed record, anything else propagates."""
    start = time.monotonic()
    try:
        witness = info.fnc(ctx)
        status = 'pass'
    except kernels_utils.SkipCheck as e:
        status = 'skipped'
        witness = str(e)
    except kernels_utils.BaseKernelError as e:
        name = base_utils.un_camel(e.__class__.__name__).replace('_error', '')
        status = 'fail'
        witness = '%s:%s' % (name, str(e))
    elapsed_ms = int((time.monotonic() - start) * 1000)
    logger.info('%s: %s (%d ms)', info.name, status, elapsed_ms)
    return {
        'check': info.name,
        'anchor': info.anchor,
        'status': status,
        'witness': witness,
        'elapsed_ms': elapsed_ms,
    }
