from kernels.report import ReportCommand


class Command(ReportCommand):
    help = 'Associativity through the residue convolution of two kernels'
    command_name = 'assoc'
    takes_target = False
