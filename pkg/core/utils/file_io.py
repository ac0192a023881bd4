"""
Reading and writing systems, adjacencies, trajectories and manifests.

System files:      {"n": int, "A": [[...], ...]}   (entries may be "p/q" strings)
Coupled systems:   {"kind": "coupled", "d", "alpha", "beta", "gamma", "S", "epsilon"}
Adjacency files:   {"n": int, "W": [[...], ...]}
Trajectory files:  CSV with header k,x1,...,xn and 17 significant digits
Manifests:         YAML sidecars next to each output file
"""
import csv
import json
from fractions import Fraction
from pathlib import Path
from typing import Iterable, List, Sequence, Union

import numpy as np
import yaml

from ..exceptions import InputError
from .dynsys import CoupledCellSystem, LinearSystem, Trajectory

DATA_DIR = Path(__file__).resolve().parent.parent / 'data'

PathLike = Union[str, Path]


def parse_entry(value) -> float:
    """Number or exact "p/q" string -> nearest double."""
    if isinstance(value, bool):
        raise InputError(f'boolean is not a matrix entry: {value!r}')
    if isinstance(value, (int, float)):
        return float(value)
    if isinstance(value, str):
        try:
            return float(Fraction(value.strip()))
        except (ValueError, ZeroDivisionError) as exc:
            raise InputError(f'cannot parse matrix entry {value!r}') from exc
    raise InputError(f'unsupported matrix entry {value!r}')


def parse_matrix(rows, n: int = None, key: str = 'A') -> np.ndarray:
    if not isinstance(rows, list) or not all(isinstance(r, list) for r in rows):
        raise InputError(f'"{key}" must be an array of arrays')
    if not rows or any(len(row) != len(rows) for row in rows):
        raise InputError(f'"{key}" must be a non-empty square matrix')
    matrix = np.array([[parse_entry(v) for v in row] for row in rows], dtype=float)
    if n is not None and matrix.shape[0] != n:
        raise InputError(f'"n" is {n} but "{key}" is {matrix.shape[0]}x{matrix.shape[1]}')
    return matrix


def read_json(path: PathLike) -> dict:
    try:
        with open(path, encoding='utf-8') as handle:
            return json.load(handle)
    except json.JSONDecodeError as exc:
        raise InputError(f'{path} is not valid JSON: {exc}') from exc


def write_json(payload, path: PathLike) -> Path:
    """Deterministic JSON: sorted keys, fixed indentation, trailing newline."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(payload, indent=2, sort_keys=True, allow_nan=False) + '\n', encoding='utf-8')
    return path


def system_from_dict(data: dict) -> Union[LinearSystem, CoupledCellSystem]:
    if data.get('kind') == 'coupled':
        try:
            return CoupledCellSystem(
                alpha=[parse_entry(v) for v in data['alpha']],
                beta=[parse_entry(v) for v in data['beta']],
                gamma=[parse_entry(v) for v in data['gamma']],
                S=parse_matrix(data['S'], key='S'),
                epsilon=parse_entry(data['epsilon']),
            )
        except KeyError as exc:
            raise InputError(f'coupled system is missing {exc}') from exc
    if 'A' not in data:
        raise InputError('system file needs an "A" matrix')
    return LinearSystem(parse_matrix(data['A'], data.get('n')))


def load_system(path: PathLike) -> Union[LinearSystem, CoupledCellSystem]:
    return system_from_dict(read_json(path))


def save_system(system: Union[LinearSystem, CoupledCellSystem], path: PathLike) -> Path:
    return write_json(system.to_dict(), path)


def load_adjacency(path: PathLike) -> np.ndarray:
    data = read_json(path)
    if 'W' not in data:
        raise InputError('adjacency file needs a "W" matrix')
    return parse_matrix(data['W'], data.get('n'), key='W')


def save_adjacency(W: np.ndarray, path: PathLike) -> Path:
    return write_json({'n': int(W.shape[0]), 'W': np.asarray(W, dtype=float).tolist()}, path)


def load_fixture(name: str) -> LinearSystem:
    """Shipped system fixture from core/data, e.g. "nonlocalizable_left"."""
    path = DATA_DIR / f'{name}.json'
    if not path.exists():
        raise InputError(f'no fixture named {name!r}')
    return load_system(path)


def format_float(value: float) -> str:
    return format(float(value), '.17g')


def write_table(path: PathLike, header: Sequence[str], rows: Iterable[Sequence]) -> Path:
    """Locale-independent CSV; floats at 17 significant digits."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, 'w', newline='', encoding='utf-8') as handle:
        writer = csv.writer(handle, lineterminator='\n')
        writer.writerow(header)
        for row in rows:
            writer.writerow([format_float(v) if isinstance(v, (float, np.floating)) else v for v in row])
    return path


def save_trajectory(trajectory: Trajectory, path: PathLike, columns: List[str] = None) -> Path:
    columns = columns or [f'x{i}' for i in range(1, trajectory.n + 1)]
    rows = ([k] + [float(v) for v in state] for k, state in enumerate(trajectory.states))
    return write_table(path, ['k'] + list(columns), rows)


def load_trajectory(path: PathLike) -> Trajectory:
    with open(path, newline='', encoding='utf-8') as handle:
        reader = csv.reader(handle)
        try:
            header = next(reader)
        except StopIteration as exc:
            raise InputError(f'{path} is empty') from exc
        if not header or header[0] != 'k':
            raise InputError(f'{path} must start with a "k,x1,...,xn" header')
        rows = []
        for line_no, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != len(header):
                raise InputError(f'{path}:{line_no} has {len(row)} fields, expected {len(header)}')
            try:
                rows.append([float(v) for v in row[1:]])
            except ValueError as exc:
                raise InputError(f'{path}:{line_no}: {exc}') from exc
    if not rows:
        raise InputError(f'{path} holds no time steps')
    return Trajectory(np.array(rows))


def parse_vector(text: str) -> np.ndarray:
    """Comma-separated literal vector, entries may be "p/q"."""
    try:
        return np.array([parse_entry(v) for v in text.split(',') if v.strip()], dtype=float)
    except InputError as exc:
        raise InputError(f'cannot parse vector {text!r}: {exc}') from exc


def load_vector(path: PathLike) -> np.ndarray:
    """Initial state file: JSON array or {"x0": [...]}."""
    data = read_json(path)
    if isinstance(data, dict):
        data = data.get('x0')
    if not isinstance(data, list):
        raise InputError(f'{path} must hold a JSON array or an "x0" array')
    return np.array([parse_entry(v) for v in data], dtype=float)


def manifest_path(output: PathLike) -> Path:
    output = Path(output)
    return output.with_name(output.name + '.manifest.yaml')


def write_manifest(payload: dict, output: PathLike) -> Path:
    path = manifest_path(output)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, 'w', encoding='utf-8') as handle:
        yaml.safe_dump(payload, handle, sort_keys=True, default_flow_style=False, allow_unicode=True)
    return path


def read_manifest(output: PathLike) -> dict:
    with open(manifest_path(output), encoding='utf-8') as handle:
        return yaml.safe_load(handle)
