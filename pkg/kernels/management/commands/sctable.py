from kernels.report import ReportCommand


class Command(ReportCommand):
    help = 'Structure constants C_ij^k of a g = 1 operator'
    command_name = 'sctable'
    takes_target = False
