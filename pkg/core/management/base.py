"""
Shared plumbing for the netspectra management commands: global flags,
run manifests (database row plus YAML sidecars) and JSON error bodies.
"""
import json
import logging
import sys
import time
from pathlib import Path

from django.core.management.base import BaseCommand, CommandError
from django.db import DatabaseError
from django.utils import timezone

import netspectra
from core.exceptions import ConsistencyError, InputError, NetSpectraError
from core.models import RunManifest
from core.utils.defaults import setting
from core.utils.file_io import write_json, write_manifest

logger = logging.getLogger('core.commands')

# argparse options every Django command carries; not part of a run's parameters
DJANGO_OPTIONS = {
    'verbosity', 'settings', 'pythonpath', 'traceback', 'no_color',
    'force_color', 'skip_checks', 'stdout', 'stderr',
}


def error_body(exc: Exception) -> str:
    return json.dumps({'error': type(exc).__name__, 'message': str(exc)}, sort_keys=True)


class NetSpectraCommand(BaseCommand):
    """
    Base class: subclasses implement add_command_arguments() and run().

    run() registers files through write_payload()/produced() and may fill
    self.checks; a failing check makes the command exit nonzero after its
    outputs and manifests are written.
    """

    def add_arguments(self, parser):
        parser.add_argument('--seed', type=int, default=0, help='Seed for every random draw (default: 0)')
        parser.add_argument('--out', default=None, help='Output file or directory')
        parser.add_argument('--tol-rank', type=float, default=None, help='Relative numeric-rank tolerance')
        parser.add_argument('--tol-distinct', type=float, default=None, help='Eigenvalue distinctness tolerance')
        parser.add_argument('--quiet', action='store_true', help='Only print errors')
        self.add_command_arguments(parser)

    def add_command_arguments(self, parser):
        pass

    def run(self, **options):
        raise NotImplementedError

    def handle(self, *args, **options):
        self.quiet = options['quiet']
        self.inputs = []
        self.outputs = []
        self.checks = {}
        self.parameters = {k: v for k, v in sorted(options.items()) if k not in DJANGO_OPTIONS}
        self.parameters['tol_rank'] = setting('RANK_REL_TOL', options['tol_rank'])
        self.parameters['tol_distinct'] = setting('DISTINCT_TOL', options['tol_distinct'])

        core_logger = logging.getLogger('core')
        previous_level = core_logger.level
        if self.quiet:
            core_logger.setLevel(logging.WARNING)

        started_at = timezone.now()
        clock = time.perf_counter()
        failure = None
        try:
            self.run(**options)
            failed = sorted(name for name, ok in self.checks.items() if not ok)
            if failed:
                failure = ConsistencyError(f'failed checks: {", ".join(failed)}')
        except (NetSpectraError, OSError) as exc:
            failure = exc
        finally:
            core_logger.setLevel(previous_level)

        self.record(options, started_at, time.perf_counter() - clock, failure)
        if failure is not None:
            raise CommandError(error_body(failure)) from failure

    # outputs

    def status(self, message: str):
        if not self.quiet:
            self.stdout.write(self.style.SUCCESS(message))

    def uses(self, path):
        self.inputs.append(str(path))
        return path

    def produced(self, path) -> Path:
        self.outputs.append(str(path))
        self.status(f'wrote {path}')
        return Path(path)

    def require_out(self, options) -> Path:
        if not options['out']:
            raise InputError(f'{self.__module__.rsplit(".", 1)[-1]} needs --out')
        return Path(options['out'])

    def write_payload(self, payload, path=None):
        """JSON to `path` (recorded as an output) or, without one, to stdout."""
        if path is None:
            self.stdout.write(json.dumps(payload, indent=2, sort_keys=True))
            return None
        return self.produced(write_json(payload, path))

    # manifests

    def record(self, options, started_at, duration: float, failure):
        manifest = RunManifest(
            command=self.__module__.rsplit('.', 1)[-1],
            parameters=json.loads(json.dumps(self.parameters, default=str)),
            seed=options.get('seed'),
            input_paths=self.inputs,
            output_paths=self.outputs,
            library_version=netspectra.__version__,
            started_at=started_at,
            duration_seconds=duration,
            succeeded=failure is None,
            error='' if failure is None else error_body(failure),
        )
        if setting('RECORD_RUNS'):
            try:
                manifest.save()
            except DatabaseError as exc:
                logger.warning('run manifest not stored (%s); run "manage.py migrate" to enable', exc)
        payload = manifest.to_yaml_dict()
        for output in self.outputs:
            write_manifest(payload, output)
        return manifest

    def execute(self, *args, **options):
        # Django prints CommandError as "CommandError: <msg>"; keep stderr pure JSON
        try:
            return super().execute(*args, **options)
        except CommandError as exc:
            if options.get('traceback') or not getattr(self, '_called_from_command_line', False):
                raise
            sys.stderr.write(str(exc) + '\n')
            sys.exit(exc.returncode)
