from kernels.report import ReportCommand


class Command(ReportCommand):
    help = 'Compare constructed kernels with their closed forms'
    command_name = 'oracle'
