from core.management.base import NetSpectraCommand
from core.utils.file_io import load_trajectory
from core.utils.spectral import AnalysisOptions, analyze_vertex


class Command(NetSpectraCommand):
    help = 'Estimate the spectrum (and optionally components, bipartiteness, cluster count) from one vertex'

    def add_command_arguments(self, parser):
        parser.add_argument('trajectory', help='Trajectory CSV (k,x1,...); a single column is taken as the vertex')
        parser.add_argument('--vertex', type=int, default=1)
        parser.add_argument('--delays', type=int, default=None, help='Delay count s (default: number of columns)')
        parser.add_argument('--bipartite', action='store_true', help='Test the spectrum for lambda -> -lambda symmetry')
        parser.add_argument('--components', action='store_true', help='Fit eigenvector components at the vertex')
        parser.add_argument('--gap', action='store_true', help='Count clusters from the largest spectral gap')
        parser.add_argument('--max-k', type=int, default=None)
        parser.add_argument('--dynamics', choices=['laplacian', 'wave'], default='laplacian')

    def run(self, **options):
        trajectory = load_trajectory(self.uses(options['trajectory']))
        vertex = options['vertex']
        u = trajectory.states[:, 0] if trajectory.n == 1 else trajectory.component(vertex)
        s = options['delays'] or trajectory.n

        report = analyze_vertex(u, s, AnalysisOptions(
            vertex=vertex,
            bipartite=options['bipartite'],
            components=options['components'],
            detect_gap=options['gap'],
            max_k=options['max_k'],
            dynamics=options['dynamics'],
            distinct_tol=options['tol_distinct'],
        ))
        payload = report.to_dict()
        payload['vertex'] = vertex
        self.write_payload(payload, options['out'])
