# Generated by Django 5.2.5 on 2026-10-16 09:12

import django.db.models.deletion
from django.db import migrations, models


class Migration(migrations.Migration):

    initial = True

    dependencies = [
    ]

    operations = [
        migrations.CreateModel(
            name='ProblemRun',
            fields=[
                ('id', models.BigAutoField(auto_created=True, primary_key=True, serialize=False, verbose_name='ID')),
                ('command', models.CharField(help_text='solve, classify, select or verify', max_length=20)),
                ('input_digest', models.CharField(help_text='SHA-256 of the input documents', max_length=64)),
                ('status', models.CharField(choices=[('SUCCESS', 'Success'), ('FAILED', 'Verification failed'), ('INPUT_ERROR', 'Input error')], default='SUCCESS', max_length=12)),
                ('exit_code', models.IntegerField(default=0)),
                ('summary', models.JSONField(blank=True, default=dict, help_text='Headline numbers of the run (TV, family count, ...)')),
                ('created_at', models.DateTimeField(auto_now_add=True)),
            ],
            options={
                'verbose_name': 'Problem Run',
                'verbose_name_plural': 'Problem Runs',
                'ordering': ['-created_at'],
            },
        ),
        migrations.CreateModel(
            name='SweepStep',
            fields=[
                ('id', models.BigAutoField(auto_created=True, primary_key=True, serialize=False, verbose_name='ID')),
                ('position', models.IntegerField(help_text='Index of this eps in the schedule')),
                ('eps', models.FloatField()),
                ('energy_f', models.FloatField()),
                ('energy_g', models.FloatField()),
                ('pnorm', models.FloatField()),
                ('lambda_hat', models.FloatField(blank=True, null=True)),
                ('iterations', models.IntegerField(default=0)),
                ('residual', models.FloatField(blank=True, null=True)),
                ('run', models.ForeignKey(on_delete=django.db.models.deletion.CASCADE, related_name='sweep_steps', to='leastgrad.problemrun')),
            ],
            options={
                'ordering': ['run', 'position'],
                'unique_together': {('run', 'position')},
            },
        ),
    ]
