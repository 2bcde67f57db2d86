from kernels.report import ReportCommand


class Command(ReportCommand):
    help = 'Structure constants in the product basis for any g'
    command_name = 'gensctable'
    takes_target = False
