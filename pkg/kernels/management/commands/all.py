from kernels.report import ReportCommand


class Command(ReportCommand):
    help = 'Run every check on the preset operators and fixtures'
    command_name = 'all'
    takes_target = False
