from kernels.report import ReportCommand


class Command(ReportCommand):
    help = 'Grid algebras and fibres of the tetrahedron kernel'
    command_name = 'verlinde'

    def add_arguments(self, parser):
        super().add_arguments(parser)
        group = parser.add_mutually_exclusive_group()
        group.add_argument('--assoc', action='store_true', help='only the grid algebras')
        group.add_argument('--fibers', action='store_true', help='only the fibre comparison')

    def get_config(self, options):
        if options.get('assoc') and not options.get('target'):
            options['target'] = 'assoc'
        elif options.get('fibers'):
            options['target'] = 'fibers'
        return super().get_config(options)
