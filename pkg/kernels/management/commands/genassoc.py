from kernels.report import ReportCommand


class Command(ReportCommand):
    help = 'Associativity of the generalized structure constants'
    command_name = 'genassoc'
    takes_target = False
