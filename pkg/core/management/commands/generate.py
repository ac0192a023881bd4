"""
Generate a system or adjacency file.

Usage:
    python manage.py generate sbm --sizes 5,5,5 --seed 7 --out sbm.json
    python manage.py generate wave --adjacency sbm.json --c 1.0 --out wave.json
"""
from core.exceptions import InputError
from core.management.base import NetSpectraCommand
from core.utils.dynsys import (
    bipartite_fixture,
    build_laplacian_system,
    build_wave_system,
    coupled_cell_fixture,
    figure_cluster_graph,
    generate_sbm,
    normalized_laplacian,
    random_system,
)
from core.utils.file_io import load_adjacency


def parse_sizes(text: str):
    try:
        return [int(v) for v in text.split(',') if v.strip()]
    except ValueError as exc:
        raise InputError(f'--sizes must be comma-separated integers, got {text!r}') from exc


class Command(NetSpectraCommand):
    help = 'Generate an SBM adjacency or a bipartite, coupled-cell, wave, Laplacian or random system'

    def add_command_arguments(self, parser):
        parser.add_argument('kind', choices=['sbm', 'bipartite', 'coupled', 'wave', 'random', 'laplacian'])
        parser.add_argument('--sizes', default='5,5,5', help='SBM cluster sizes (default: 5,5,5)')
        parser.add_argument('--intra-p', type=float, default=0.7)
        parser.add_argument('--inter-p', type=float, default=0.05)
        parser.add_argument('--intra-weight', type=float, default=1.0)
        parser.add_argument('--inter-weight', type=float, default=0.2)
        parser.add_argument('--connected', action='store_true', help='Resample SBM graphs until connected')
        parser.add_argument('--figure-graph', action='store_true', help='Fixed 15-vertex three-cluster graph instead of a sample')
        parser.add_argument('--adjacency', help='Adjacency file for wave/laplacian')
        parser.add_argument('--c', type=float, default=1.0, help='Wave speed, 0 < c < sqrt(2) (default: 1.0)')
        parser.add_argument('--step', type=float, default=0.5, help='Laplacian step: A = I - step*L (default: 0.5)')
        parser.add_argument('--raw-laplacian', action='store_true', help='Use A = L instead of I - step*L')
        parser.add_argument('--n', type=int, default=6, help='Dimension of a random system (default: 6)')
        parser.add_argument('--density', type=float, default=1.0)
        parser.add_argument('--spectral-radius', type=float, default=None)

    def run(self, **options):
        kind = options['kind']
        out = options['out']
        seed = options['seed']

        if kind == 'sbm':
            if options['figure_graph']:
                W, _ = figure_cluster_graph(options['intra_weight'], options['inter_weight'])
            else:
                W = generate_sbm(
                    parse_sizes(options['sizes']),
                    options['intra_p'],
                    options['inter_p'],
                    options['intra_weight'],
                    options['inter_weight'],
                    seed=seed,
                    require_connected=options['connected'],
                )
            self.write_payload({'n': int(W.shape[0]), 'W': W.tolist()}, out)
            return

        if kind == 'bipartite':
            system = bipartite_fixture()
        elif kind == 'coupled':
            system = coupled_cell_fixture(seed)
        elif kind == 'random':
            system = random_system(options['n'], seed, options['density'], options['spectral_radius'])
        else:
            if not options['adjacency']:
                raise InputError(f'{kind} needs --adjacency')
            L = normalized_laplacian(load_adjacency(self.uses(options['adjacency'])))
            if kind == 'wave':
                system = build_wave_system(L, options['c'])
            else:
                system = build_laplacian_system(L, None if options['raw_laplacian'] else options['step'])
        self.write_payload(system.to_dict(), out)
