import json

from django.test import SimpleTestCase

from base import utils as base_utils
from kernels.management.commands import expand


class BaseUtilsTest(SimpleTestCase):
    def test_to_json_keeps_none(self):
        witness = {'points': 3, 'residual_log2': None, 'identities': ['exact', None]}
        self.assertEqual(json.loads(base_utils.to_json(witness)), witness)

    def test_to_json_lists_stay_lists(self):
        entries = [[0, 1, 1, '1/1'], [1, 0, 1, '1/1']]
        self.assertEqual(json.loads(base_utils.to_json(entries)), entries)

    def test_to_json_is_stable(self):
        self.assertEqual(base_utils.to_json({'b': 1, 'a': 2}, indent=None), '{"a": 2, "b": 1}')

    def test_md5(self):
        self.assertEqual(base_utils.md5('abc'), base_utils.md5(b'abc'))
        self.assertEqual(base_utils.md5(''), 'd41d8cd98f00b204e9800998ecf8427e')

    def test_un_camel(self):
        self.assertEqual(base_utils.un_camel('MismatchError'), 'mismatch_error')
        self.assertEqual(base_utils.un_camel('CorruptCacheError'), 'corrupt_cache_error')
        self.assertEqual(base_utils.un_camel('Kernel'), 'kernel')

    def test_execute_command_by_name(self):
        by_module = json.loads(base_utils.execute_command(expand, family='first_order_g', g=1, N=2))
        by_name = json.loads(base_utils.execute_command('expand', family='first_order_g', g=1, N=2))
        self.assertEqual(by_module, by_name)
