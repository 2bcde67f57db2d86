from django.test import SimpleTestCase

from kernels.checks import RunContext, exec_check, load_checks
from kernels.checks.oracles import OracleChecks
from kernels.checks.residue import ResidueChecks


class OracleChecksTest(SimpleTestCase):
    def test_elementary_to_total_degree_six(self):
        compared = OracleChecks.elementary(RunContext({'command': 'oracle', 'N': 6}))
        self.assertEqual(compared, {'g2': 6, 'g3': 6})


class ResidueChecksTest(SimpleTestCase):
    def test_presets_cover_every_operator(self):
        witness = ResidueChecks.presets(RunContext({'command': 'all'}))
        for preset in ('first_order_g', 'heun4', 'heun4_unit', 'third_order3'):
            self.assertEqual(witness['product.%s' % preset], 6)
            self.assertIn('assoc.%s' % preset, witness)
        self.assertEqual(witness['product.first_order_g2'], 4)
        self.assertEqual(witness['product.heun_n'], 4)
        self.assertIn('genassoc.heun_n', witness)
        self.assertIn('sym_square.first_order_g2', witness)

    def test_product_check_on_heun_n(self):
        info = load_checks()['residue.product']
        self.assertFalse(info.selected('all'))
        record = exec_check(info, RunContext({'command': 'productcheck', 'family': 'heun_n'}))
        self.assertEqual(record['status'], 'pass')
        self.assertIn('N', record['witness'])
