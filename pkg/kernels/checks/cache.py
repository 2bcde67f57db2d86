import logging
import os
import tempfile

from kernels import utils as kernels_utils
from kernels.cache import TableCache, cache_roundtrip
from kernels.checks import BaseChecks, RunContext, check

logger = logging.getLogger(__name__)


class CacheChecks(BaseChecks):
    abstract = False

    @staticmethod
    @check('cache.roundtrip', 'cached tables read back exactly and edited files are rejected',
           commands=('cache', 'all'))
    def roundtrip(ctx: RunContext):
        op = ctx.operator('heun4')
        N = ctx.value('N', 6)
        table = ctx.table(op, N)
        with tempfile.TemporaryDirectory() as directory:
            cache = TableCache(directory)
            witness = cache_roundtrip(cache, op, N, 'sc', table)

            path = cache.path(op, N, 'sc')
            with open(path) as f:
                text = f.read()
            # bump the first stored rational
            head, sep, tail = text.partition('"entries": [')
            edited = head + sep + tail.replace('"', '"1+', 1)
            with open(path, 'w') as f:
                f.write(edited)
            try:
                cache.read(op, N, 'sc')
            except kernels_utils.CorruptCacheError:
                witness['edited'] = 'rejected'
            else:
                raise kernels_utils.MismatchError('edited cache file %s was accepted' % os.path.basename(path))

            other = ctx.operator('heun4', params=dict(op.params, t=3))
            if cache.read(other, N, 'sc') is not None:
                raise kernels_utils.MismatchError('a changed parameter hit the cache')
            witness['changed_param'] = 'miss'
        return witness
