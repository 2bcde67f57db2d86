from kernels.report import ReportCommand


class Command(ReportCommand):
    help = 'Verify birational convolution identities; target is a fixture name or a JSON file'
    command_name = 'birat'
