import io
import json
import os
import tempfile

from django.core.management import call_command
from django.core.management.base import CommandError
from django.test import SimpleTestCase

from base.utils import execute_command
from kernels.birational import FIXTURES
from kernels.management.commands import expand, verlinde
from kernels.ode import PRESET_PARAMS


def run(name, *args, **options):
    out = io.StringIO()
    call_command(name, *args, stdout=out, **options)
    return json.loads(out.getvalue())


class ExpandCommandTest(SimpleTestCase):
    def test_exponential(self):
        report = json.loads(execute_command(expand, family='first_order_g', g=1, N=4))
        self.assertEqual(report['status'], 'pass')
        self.assertEqual(report['config']['family'], 'first_order_g')
        self.assertEqual([c['check'] for c in report['checks']], ['expansion.substitution', 'expansion.uniqueness'])
        self.assertNotIn('elapsed_ms', report['checks'][0])

    def test_config_file(self):
        with tempfile.TemporaryDirectory() as directory:
            path = os.path.join(directory, 'run.json')
            with open(path, 'w') as f:
                json.dump({'family': 'heun4', 'N': 3, 'params': dict(PRESET_PARAMS['heun4'], t='3')}, f)
            report = run('expand', config=path, timings=True)
        self.assertEqual(report['config']['params']['t'], '3/1')
        self.assertIn('elapsed_ms', report['checks'][0])

    def test_invalid_config(self):
        with self.assertRaises(CommandError) as cm:
            call_command('expand', N=4)
        self.assertEqual(cm.exception.returncode, 2)
        with self.assertRaises(CommandError) as cm:
            call_command('expand', family='heun4', params=['t'])
        self.assertEqual(cm.exception.returncode, 2)

    def test_operator_errors_are_config_errors(self):
        with self.assertRaises(CommandError) as cm:
            execute_command(expand, '--family', 'custom', '--operator', '[[1, "x +* 2"]]')
        self.assertEqual(cm.exception.returncode, 2)
        with self.assertRaises(CommandError) as cm:
            execute_command(expand, '--family', 'heun4', '--params', 'zz=1')
        self.assertEqual(cm.exception.returncode, 2)
        with self.assertRaises(CommandError) as cm:
            call_command('expand', family='heun4', params=['t=1'])
        self.assertEqual(cm.exception.returncode, 2)


class VerlindeCommandTest(SimpleTestCase):
    def test_assoc(self):
        report = json.loads(execute_command(verlinde, assoc=True, max_n=4))
        self.assertEqual(report['status'], 'pass')
        self.assertEqual(len(report['checks']), 1)
        self.assertEqual(report['checks'][0]['witness'], {'sizes': [1, 4], 'triples': 224})

    def test_report_file(self):
        with tempfile.TemporaryDirectory() as directory:
            path = os.path.join(directory, 'report.json')
            call_command('verlinde', fibers=True, samples=10, report=path)
            with open(path) as f:
                report = json.load(f)
        self.assertEqual(report['status'], 'pass')
        self.assertEqual(report['checks'][0]['check'], 'verlinde.fibers')
        self.assertNotIn('report', report['config'])


class BiratCommandTest(SimpleTestCase):
    def test_fixture(self):
        report = run('birat', 'exp_product', samples=3)
        self.assertEqual(report['status'], 'pass')
        self.assertEqual([c['check'] for c in report['checks']], ['birational.exact', 'birational.perturbative'])

    def test_failing_file(self):
        data = dict(FIXTURES['exp_product'], name='broken',
                    substitution=[['yt', '(x1*x2 + x3*z + 1)/(x1*x3 + x2*z + 2)*y']])
        with tempfile.TemporaryDirectory() as directory:
            path = os.path.join(directory, 'broken.json')
            with open(path, 'w') as f:
                json.dump(data, f)
            with self.assertRaises(CommandError) as cm:
                call_command('birat', path, samples=3, stdout=io.StringIO())
        self.assertEqual(cm.exception.returncode, 1)
        self.assertIn('birational.file', str(cm.exception))

    def test_unknown_target(self):
        with self.assertRaises(CommandError) as cm:
            call_command('oracle', 'nothing')
        self.assertEqual(cm.exception.returncode, 2)
