from django.test import SimpleTestCase
from sympy import QQ

from kernels.ode import PRESET_PARAMS
from kernels.serializers import RunConfigSerializer


class RunConfigSerializerTest(SimpleTestCase):
    def validated(self, **data):
        serializer = RunConfigSerializer(data=data)
        self.assertTrue(serializer.is_valid(), serializer.errors)
        return serializer.validated_data

    def errors(self, **data):
        serializer = RunConfigSerializer(data=data)
        self.assertFalse(serializer.is_valid())
        return serializer.errors

    def test_valid(self):
        params = dict(PRESET_PARAMS['heun4'], t='3')
        data = self.validated(command='expand', family='heun4', params=params, N=6)
        self.assertEqual(data['params']['t'], QQ(3))
        self.assertEqual(data['params']['s1'], QQ(1, 3))
        self.assertEqual(data['seed'], 1)
        self.assertFalse(data['timings'])

    def test_commands_without_operator(self):
        self.validated(command='verlinde', target='assoc', max_n=5)
        self.validated(command='birat', target='exp_product')
        self.validated(command='all')

    def test_unknown_key(self):
        self.assertIn('colour', self.errors(command='all', colour='red'))

    def test_unknown_command(self):
        self.assertIn('command', self.errors(command='plot'))

    def test_family_required(self):
        self.assertIn('family', self.errors(command='sctable', N=4))

    def test_custom_operator(self):
        data = self.validated(command='expand', family='custom', operator=[[0, '-lam1'], [1, '1']])
        self.assertEqual(data['operator'], [(0, '-lam1'), (1, '1')])
        self.assertIn('operator', self.errors(command='expand', family='custom'))
        self.assertIn('operator', self.errors(command='expand', family='heun4', operator=[[0, '1']]))
        self.assertIn('operator', self.errors(command='expand', family='custom', operator=[['0', '1']]))

    def test_bad_rational(self):
        self.assertIn('params', self.errors(command='expand', family='heun4', params={'t': '1/0'}))
        self.assertIn('params', self.errors(command='expand', family='heun4', params={'t': 0.5}))

    def test_ranges(self):
        self.assertIn('N', self.errors(command='expand', family='heun4', N=-1))
        self.assertIn('precision', self.errors(command='birat', precision=10))

    def test_operator_is_built(self):
        self.assertIn('operator', self.errors(command='expand', family='custom', operator=[[1, 'x +* 2']]))
        self.assertIn('operator', self.errors(command='expand', family='custom', operator=[[1, 'y']]))
        self.assertIn('params', self.errors(command='expand', family='heun4', params={'zz': '1'}))
        singular = dict(PRESET_PARAMS['heun4'], t='1')
        self.assertIn('params', self.errors(command='expand', family='heun4', params=singular))
        self.assertIn('params', self.errors(command='expand', family='first_order_g'))
        self.validated(command='expand', family='heun_n')
