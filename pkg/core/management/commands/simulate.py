import numpy as np

from core.exceptions import InputError
from core.management.base import NetSpectraCommand
from core.utils.dynsys import CoupledCellSystem, koopman_lift, lift_state, project_lifted, simulate, simulate_coupled
from core.utils.file_io import load_system, load_vector, parse_vector, save_trajectory


class Command(NetSpectraCommand):
    help = 'Simulate a system file from x0 and write the trajectory as CSV'

    def add_command_arguments(self, parser):
        parser.add_argument('system', help='System JSON file (linear or coupled)')
        parser.add_argument('--steps', type=int, default=None, help='Number of steps m (default: 4n)')
        source = parser.add_mutually_exclusive_group()
        source.add_argument('--x0', help='Literal initial state, e.g. "1,0,-1/2"')
        source.add_argument('--x0-file', help='JSON array or {"x0": [...]}')
        lift = parser.add_mutually_exclusive_group()
        lift.add_argument('--lift', action='store_true', help='Coupled systems: run the lifted linear system, write original coordinates')
        lift.add_argument('--full-lift', action='store_true', help='Coupled systems: write all lifted coordinates')

    def initial_state(self, options, dimension: int) -> np.ndarray:
        if options['x0']:
            x0 = parse_vector(options['x0'])
        elif options['x0_file']:
            x0 = load_vector(self.uses(options['x0_file']))
        else:
            x0 = np.random.default_rng(options['seed']).standard_normal(dimension)
        if x0.size != dimension:
            raise InputError(f'x0 has dimension {x0.size}, the system needs {dimension}')
        return x0

    def run(self, **options):
        out = self.require_out(options)
        system = load_system(self.uses(options['system']))
        coupled = isinstance(system, CoupledCellSystem)
        if (options['lift'] or options['full_lift']) and not coupled:
            raise InputError('--lift only applies to coupled-cell systems')

        dimension = 2 * system.d if coupled else system.n
        steps = 4 * dimension if options['steps'] is None else options['steps']
        x0 = self.initial_state(options, dimension)
        self.parameters['x0'] = x0.tolist()

        if not coupled:
            trajectory = simulate(system, x0, steps)
        elif options['lift'] or options['full_lift']:
            trajectory = simulate(koopman_lift(system), lift_state(x0), steps)
            if options['lift']:
                trajectory = project_lifted(trajectory)
        else:
            trajectory = simulate_coupled(system, x0, steps)

        if not np.all(np.isfinite(trajectory.states)):
            raise InputError('trajectory diverged to non-finite values; reduce --steps')
        self.produced(save_trajectory(trajectory, out))
