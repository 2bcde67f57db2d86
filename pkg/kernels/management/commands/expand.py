from kernels.report import ReportCommand


class Command(ReportCommand):
    help = 'Expand the normalized analytic solution of an operator and substitute it back'
    command_name = 'expand'
    takes_target = False
