"""
Run reports and the management command base every verification command shares.
"""
import json
import logging

from django.core.management.base import BaseCommand, CommandError

from base import utils as base_utils
from kernels import utils as kernels_utils
from kernels.checks import RunContext, exec_check, select_checks
from kernels.serializers import RunConfigSerializer

logger = logging.getLogger(__name__)

ECHO_SKIP = ('report', 'cache', 'timings')


class Report(object):
    def __init__(self, config: dict, records: list):
        self.config = config
        self.records = sorted(records, key=lambda r: r['check'])

    @property
    def status(self) -> str:
        return 'fail' if any(r['status'] == 'fail' for r in self.records) else 'pass'

    @property
    def failed(self) -> list:
        return [r['check'] for r in self.records if r['status'] == 'fail']

    def as_dict(self) -> dict:
        echo = RunConfigSerializer().to_representation(self.config)
        timings = self.config.get('timings')
        checks = []
        for record in self.records:
            record = dict(record)
            if not timings:
                record.pop('elapsed_ms', None)
            checks.append(record)
        return {
            'config': {k: v for k, v in echo.items() if k not in ECHO_SKIP and v is not None},
            'status': self.status,
            'checks': checks,
        }

    def to_json(self) -> str:
        return base_utils.to_json(self.as_dict())

    def write(self, path: str):
        with open(path, 'w') as f:
            f.write(self.to_json())
            f.write('\n')


def run_checks(config: dict) -> Report:
    checks = select_checks(config['command'], config.get('target'))
    ctx = RunContext(config)
    records = []
    for info in checks:
        logger.debug('running %s', info.name)
        records.append(exec_check(info, ctx))
    return Report(config, records)


def parse_params(pairs) -> dict:
    params = {}
    for pair in pairs or ():
        key, sep, value = pair.partition('=')
        if not sep or not key:
            raise CommandError('parameters are key=value, got %r' % pair, returncode=2)
        params[key] = value
    return params


class ReportCommand(BaseCommand):
    """
    Validates a run config from a JSON file and command-line options, runs the
    checks registered for ``command_name`` and prints or writes the report.
    Exit status 2 on an invalid config, 1 when any check fails.
    """
    command_name = None
    takes_target = True

    def add_arguments(self, parser):
        if self.takes_target:
            parser.add_argument('target', nargs='?', help='restrict the run to one target')
        parser.add_argument('--config', help='JSON run config; options given here override it')
        parser.add_argument('--family', help='operator family')
        parser.add_argument('--g', type=int, help='number of spectral parameters')
        parser.add_argument('--params', nargs='*', metavar='KEY=P/Q', help='operator parameters')
        parser.add_argument('--operator', help='custom operator as a JSON list of [k, "polynomial"] pairs')
        parser.add_argument('--N', type=int, dest='N', help='truncation order')
        parser.add_argument('--M', type=int, dest='M', help='y-depth of closed-form comparisons')
        parser.add_argument('--seed', type=int)
        parser.add_argument('--samples', type=int)
        parser.add_argument('--precision', type=int, help='bits of high-precision checks')
        parser.add_argument('--max-n', type=int, dest='max_n')
        parser.add_argument('--cache', help='structure-constant cache directory')
        parser.add_argument('--report', help='write the JSON report here instead of stdout')
        parser.add_argument('--timings', action='store_true', default=None)

    def get_config(self, options) -> dict:
        data = {}
        if options.get('config'):
            try:
                with open(options['config']) as f:
                    data = json.load(f)
            except (OSError, ValueError) as e:
                raise CommandError('cannot read config %s: %s' % (options['config'], e), returncode=2)
            if not isinstance(data, dict):
                raise CommandError('config %s is not an object' % options['config'], returncode=2)
        for key in ('target', 'family', 'g', 'N', 'M', 'seed', 'samples', 'precision', 'max_n', 'cache', 'report',
                    'timings'):
            if options.get(key) is not None:
                data[key] = options[key]
        if options.get('params'):
            data['params'] = dict(data.get('params', {}), **parse_params(options['params']))
        if options.get('operator'):
            try:
                data['operator'] = json.loads(options['operator'])
            except ValueError as e:
                raise CommandError('operator is not JSON: %s' % e, returncode=2)
        data['command'] = self.command_name
        return data

    def validate(self, data: dict) -> dict:
        serializer = RunConfigSerializer(data=data)
        if not serializer.is_valid():
            raise CommandError('invalid config: %s' % base_utils.to_json(serializer.errors, indent=None),
                               returncode=2)
        return dict(serializer.validated_data)

    def handle(self, *args, **options):
        if options.get('verbosity', 1) > 1:
            logging.getLogger('kernels').setLevel(logging.DEBUG)
        config = self.validate(self.get_config(options))
        try:
            report = run_checks(config)
        except kernels_utils.ParamsError as e:
            raise CommandError(str(e), returncode=2)
        if config.get('report'):
            report.write(config['report'])
            logger.info('report written to %s', config['report'])
        else:
            self.stdout.write(report.to_json())
        if report.status == 'fail':
            raise CommandError('failed: %s' % ', '.join(report.failed), returncode=1)
