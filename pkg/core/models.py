from django.db import models
from django.utils import timezone


class RunManifest(models.Model):
    """One invocation of a netspectra command and everything needed to repeat it"""

    command = models.CharField(max_length=32)
    parameters = models.JSONField(default=dict)
    seed = models.BigIntegerField(null=True, blank=True)
    input_paths = models.JSONField(default=list, blank=True)
    output_paths = models.JSONField(default=list, blank=True)
    library_version = models.CharField(max_length=32)
    started_at = models.DateTimeField(default=timezone.now)
    duration_seconds = models.FloatField(default=0)
    succeeded = models.BooleanField(default=True)
    error = models.TextField(blank=True, default='')

    class Meta:
        ordering = ['-started_at', '-id']

    def __str__(self):
        status = 'ok' if self.succeeded else 'failed'
        return f"{self.command} seed={self.seed} ({status})"

    def to_yaml_dict(self):
        """Sidecar payload; everything that varies between identical runs sits under `timing`"""
        return {
            'command': self.command,
            'parameters': self.parameters,
            'seed': self.seed,
            'input_paths': list(self.input_paths),
            'output_paths': list(self.output_paths),
            'library_version': self.library_version,
            'succeeded': self.succeeded,
            'error': self.error,
            'timing': {
                'started_at': self.started_at.isoformat(),
                'duration_seconds': self.duration_seconds,
            },
        }
