"""
On-disk cache of structure-constant tables.

One JSON file per (operator, N, table kind), named by the md5 of its
fingerprint.  Files carry the cache version, the fingerprint and an md5 of the
entries; anything that does not match is rejected.
"""
import json
import logging
import os

from django.conf import settings

from base.utils import lock, md5, to_json
from kernels import utils as kernels_utils
from kernels.ode import DiffOp
from kernels.structure import GenSCTable, SCTable

logger = logging.getLogger(__name__)

KINDS = ('sc', 'gensc')


def fingerprint(op: DiffOp, N: int, kind: str) -> dict:
    if kind not in KINDS:
        raise kernels_utils.ParamsError('unknown table kind %r' % kind)
    return {'operator': op.fingerprint(), 'N': N, 'kind': kind, 'version': settings.KERNELS_CACHE_VERSION}


def _encode_table(table) -> dict:
    if isinstance(table, GenSCTable):
        return {'g': table.g, 'upto': table.upto, 'entries': table.to_entries()}
    return {'g': 1, 'upto': table.upto, 'entries': table.to_entries()}


def _decode_table(kind: str, data: dict):
    if kind == 'gensc':
        return GenSCTable.from_entries(data['g'], data['upto'], data['entries'])
    return SCTable.from_entries(data['upto'], data['entries'])


class TableCache(object):
    def __init__(self, directory=None):
        self.directory = directory or settings.KERNELS_CACHE_DIR

    def key(self, op: DiffOp, N: int, kind: str) -> str:
        return md5(to_json(fingerprint(op, N, kind)))

    def path(self, op: DiffOp, N: int, kind: str) -> str:
        return os.path.join(self.directory, self.key(op, N, kind) + '.json')

    def write(self, op: DiffOp, N: int, kind: str, table) -> str:
        data = _encode_table(table)
        payload = {
            'version': settings.KERNELS_CACHE_VERSION,
            'fingerprint': fingerprint(op, N, kind),
            'table': data,
            'checksum': md5(to_json(data['entries'])),
        }
        path = self.path(op, N, kind)
        os.makedirs(self.directory, exist_ok=True)
        with lock('cache_' + self.key(op, N, kind)):
            tmp = path + '.tmp'
            with open(tmp, 'w') as f:
                f.write(to_json(payload))
            os.replace(tmp, path)
        logger.info('cached %s table for %s N=%d in %s', kind, op.family, N, path)
        return path

    def read(self, op: DiffOp, N: int, kind: str):
        """The cached table, None on a miss, CorruptCacheError on anything unreadable or inconsistent."""
        path = self.path(op, N, kind)
        if not os.path.exists(path):
            return None
        with lock('cache_' + self.key(op, N, kind)):
            try:
                with open(path) as f:
                    payload = json.load(f)
            except (OSError, ValueError) as e:
                raise kernels_utils.CorruptCacheError('%s: %s' % (path, e))
        if not isinstance(payload, dict):
            raise kernels_utils.CorruptCacheError('%s: not a cache object' % path)
        if payload.get('version') != settings.KERNELS_CACHE_VERSION:
            raise kernels_utils.CorruptCacheError('%s: version %r, expected %r'
                                                  % (path, payload.get('version'), settings.KERNELS_CACHE_VERSION))
        if payload.get('fingerprint') != json.loads(to_json(fingerprint(op, N, kind))):
            raise kernels_utils.CorruptCacheError('%s: fingerprint mismatch' % path)
        data = payload.get('table')
        if not isinstance(data, dict) or not isinstance(data.get('entries'), list):
            raise kernels_utils.CorruptCacheError('%s: no table entries' % path)
        if md5(to_json(data['entries'])) != payload.get('checksum'):
            raise kernels_utils.CorruptCacheError('%s: checksum mismatch' % path)
        try:
            table = _decode_table(kind, data)
        except (KeyError, TypeError, ValueError, kernels_utils.ParamsError) as e:
            raise kernels_utils.CorruptCacheError('%s: %s' % (path, e))
        logger.info('cache hit %s', path)
        return table

    def fetch(self, op: DiffOp, N: int, kind: str, compute):
        try:
            table = self.read(op, N, kind)
        except kernels_utils.CorruptCacheError as e:
            logger.warning('rejected cache file, recomputing: %s', e)
            table = None
        if table is None:
            logger.info('cache miss for %s %s N=%d', kind, op.family, N)
            table = compute()
            self.write(op, N, kind, table)
        return table


def cache_roundtrip(cache: TableCache, op: DiffOp, N: int, kind: str, table) -> dict:
    """Write, read back and compare exactly."""
    path = cache.write(op, N, kind, table)
    restored = cache.read(op, N, kind)
    if restored != table:
        raise kernels_utils.MismatchError('table read back from %s differs from the one written' % path)
    return {'path': os.path.basename(path), 'entries': len(table.to_entries())}
