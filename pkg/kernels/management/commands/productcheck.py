from kernels.report import ReportCommand


class Command(ReportCommand):
    help = 'Residue pairing of the kernel with the solution series'
    command_name = 'productcheck'
    takes_target = False
