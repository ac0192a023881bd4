"""
Decentralized clustering: every vertex analyzes only its own column of the
trajectory, then the labels are folded together in vertex order.

Usage:
    python manage.py cluster traj.csv --k auto --out clusters/
"""
from core.exceptions import InputError
from core.management.base import NetSpectraCommand
from core.utils.file_io import load_trajectory, write_table
from core.utils.spectral import AnalysisOptions, decentralized_clustering


def parse_k(text: str):
    if text == 'auto':
        return text
    try:
        return int(text)
    except ValueError as exc:
        raise InputError(f'--k must be "auto" or an integer, got {text!r}') from exc


class Command(NetSpectraCommand):
    help = 'Assign every vertex to a cluster from its own trajectory'

    def add_command_arguments(self, parser):
        parser.add_argument('trajectory', help='Trajectory CSV holding every vertex')
        parser.add_argument('--k', default='auto', help='Cluster count or "auto" (default: auto)')
        parser.add_argument('--delays', type=int, default=None, help='Delay count s (default: n)')
        parser.add_argument('--workers', type=int, default=None, help='Threads for per-vertex analyses')
        parser.add_argument('--max-k', type=int, default=None)
        parser.add_argument('--dynamics', choices=['laplacian', 'wave'], default='laplacian')

    def run(self, **options):
        trajectory = load_trajectory(self.uses(options['trajectory']))
        result = decentralized_clustering(
            trajectory,
            s=options['delays'],
            k=parse_k(options['k']),
            options=AnalysisOptions(
                bipartite=False,
                max_k=options['max_k'],
                dynamics=options['dynamics'],
                distinct_tol=options['tol_distinct'],
            ),
            workers=options['workers'],
        )
        payload = {
            'cluster_count': result.k,
            'labels': [{'vertex': v, 'cluster': c} for v, c in sorted(result.labels.items())],
            'per_vertex_cluster_count': [
                {'vertex': v, 'cluster_count': r.cluster_count} for v, r in sorted(result.reports.items())
            ],
        }
        self.status(f'{trajectory.n} vertices in {len(set(result.labels.values()))} groups (k={result.k})')
        if not options['out']:
            self.write_payload(payload)
            return

        out = self.require_out(options)
        self.write_payload(payload, out / 'labels.json')
        rows = [
            [v, l + 1, float(c.real), float(c.imag)]
            for v, comps in sorted(result.components().items())
            for l, c in enumerate(comps)
        ]
        self.produced(write_table(out / 'components.csv', ['vertex', 'mode', 're', 'im'], rows))
