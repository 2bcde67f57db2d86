import json
import os
import tempfile

from django.test import SimpleTestCase

from kernels import utils as kernels_utils
from kernels.cache import TableCache, cache_roundtrip, fingerprint
from kernels.ode import PRESET_PARAMS, expand_solution, preset_operator
from kernels.structure import gen_structure_constants, structure_constants


class TableCacheTest(SimpleTestCase):
    def setUp(self):
        self.directory = tempfile.TemporaryDirectory()
        self.cache = TableCache(self.directory.name)
        self.op = preset_operator('heun4', PRESET_PARAMS['heun4'])
        self.table = structure_constants(expand_solution(self.op, 6), 3)

    def tearDown(self):
        self.directory.cleanup()

    def rewrite(self, edit):
        path = self.cache.path(self.op, 3, 'sc')
        with open(path) as f:
            payload = json.load(f)
        edit(payload)
        with open(path, 'w') as f:
            json.dump(payload, f)

    def test_roundtrip(self):
        witness = cache_roundtrip(self.cache, self.op, 3, 'sc', self.table)
        self.assertEqual(witness['entries'], len(self.table.to_entries()))
        self.assertTrue(os.path.exists(os.path.join(self.directory.name, witness['path'])))

    def test_generalized_table(self):
        op = preset_operator('first_order_g', {}, 2)
        table = gen_structure_constants(expand_solution(op, 3), 3)
        cache_roundtrip(self.cache, op, 3, 'gensc', table)

    def test_miss(self):
        self.assertIsNone(self.cache.read(self.op, 3, 'sc'))
        self.cache.write(self.op, 3, 'sc', self.table)
        other = preset_operator('heun4', dict(PRESET_PARAMS['heun4'], t=3))
        self.assertIsNone(self.cache.read(other, 3, 'sc'))
        self.assertIsNone(self.cache.read(self.op, 4, 'sc'))

    def test_checksum(self):
        self.cache.write(self.op, 3, 'sc', self.table)

        def bump(payload):
            payload['table']['entries'][0][-1] = '7/1'

        self.rewrite(bump)
        with self.assertRaises(kernels_utils.CorruptCacheError):
            self.cache.read(self.op, 3, 'sc')

    def test_version(self):
        self.cache.write(self.op, 3, 'sc', self.table)
        self.rewrite(lambda payload: payload.update(version=0))
        with self.assertRaises(kernels_utils.CorruptCacheError):
            self.cache.read(self.op, 3, 'sc')

    def test_unreadable(self):
        os.makedirs(self.directory.name, exist_ok=True)
        with open(self.cache.path(self.op, 3, 'sc'), 'w') as f:
            f.write('{"version": ')
        with self.assertRaises(kernels_utils.CorruptCacheError):
            self.cache.read(self.op, 3, 'sc')

    def test_fetch_recomputes(self):
        calls = []

        def compute():
            calls.append(1)
            return self.table

        self.assertEqual(self.cache.fetch(self.op, 3, 'sc', compute), self.table)
        self.assertEqual(self.cache.fetch(self.op, 3, 'sc', compute), self.table)
        self.assertEqual(len(calls), 1)
        self.rewrite(lambda payload: payload.update(checksum='0'))
        self.assertEqual(self.cache.fetch(self.op, 3, 'sc', compute), self.table)
        self.assertEqual(len(calls), 2)

    def test_unknown_kind(self):
        with self.assertRaises(kernels_utils.ParamsError):
            fingerprint(self.op, 3, 'table')
