# Generated by Django 5.2.7 on 2026-10-17 09:12

import django.utils.timezone
from django.db import migrations, models


class Migration(migrations.Migration):

    initial = True

    dependencies = [
    ]

    operations = [
        migrations.CreateModel(
            name='RunManifest',
            fields=[
                ('id', models.BigAutoField(auto_created=True, primary_key=True, serialize=False, verbose_name='ID')),
                ('command', models.CharField(max_length=32)),
                ('parameters', models.JSONField(default=dict)),
                ('seed', models.BigIntegerField(blank=True, null=True)),
                ('input_paths', models.JSONField(blank=True, default=list)),
                ('output_paths', models.JSONField(blank=True, default=list)),
                ('library_version', models.CharField(max_length=32)),
                ('started_at', models.DateTimeField(default=django.utils.timezone.now)),
                ('duration_seconds', models.FloatField(default=0)),
                ('succeeded', models.BooleanField(default=True)),
                ('error', models.TextField(blank=True, default='')),
            ],
            options={
                'ordering': ['-started_at', '-id'],
            },
        ),
    ]
