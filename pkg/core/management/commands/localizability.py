from core.management.base import NetSpectraCommand
from core.utils.dynsys import CoupledCellSystem, dependency_graph, koopman_lift
from core.utils.file_io import load_system
from core.utils.localizability import hautus_localizable, is_localizable, is_strongly_connected


class Command(NetSpectraCommand):
    help = 'Report whether vertices of a system can recover its global state from their own trajectory'

    def add_command_arguments(self, parser):
        parser.add_argument('system', help='System JSON file; coupled systems are tested through their lift')
        which = parser.add_mutually_exclusive_group()
        which.add_argument('--vertex', type=int, default=1, help='1-based vertex (default: 1)')
        which.add_argument('--all', action='store_true', help='Test every vertex')
        parser.add_argument('--hautus', action='store_true', help='Cross-check with the Hautus rank test')

    def run(self, **options):
        system = load_system(self.uses(options['system']))
        if isinstance(system, CoupledCellSystem):
            system = koopman_lift(system)
            self.status(f'testing the {system.n}-dimensional lift of the coupled system')

        vertices = range(1, system.n + 1) if options['all'] else [options['vertex']]
        reports = []
        for vertex in vertices:
            report = is_localizable(system, vertex, options['tol_rank'])
            entry = report.to_dict()
            if options['hautus'] and system.n > 1:
                entry['hautus'] = hautus_localizable(system, vertex, options['tol_rank'], options['tol_distinct'])
            reports.append(entry)

        payload = {
            'n': system.n,
            'strongly_connected': is_strongly_connected(dependency_graph(system)),
            'vertices': reports,
        }
        if options['all']:
            payload['localizable_everywhere'] = all(r['localizable'] for r in reports)
        self.write_payload(payload, options['out'])
