from kernels.report import ReportCommand


class Command(ReportCommand):
    help = 'Build the kernel series and check its properties'
    command_name = 'kernel'
    takes_target = False
