from kernels.report import ReportCommand


class Command(ReportCommand):
    help = 'Write, read back and tamper with the structure-constant cache'
    command_name = 'cache'
    takes_target = False
