from django.core.management.base import BaseCommand
from django.db import transaction

from leastgrad.models import ProblemRun, SweepStep


class Command(BaseCommand):
    help = 'Clear recorded runs from the run archive'

    def add_arguments(self, parser):
        parser.add_argument(
            '--confirm',
            action='store_true',
            help='Actually perform the deletion (required for safety)',
        )
        parser.add_argument(
            '--command',
            dest='run_command',
            help='Only clear runs of this command (solve, classify, select, verify)',
        )

    def handle(self, *args, **options):
        runs = ProblemRun.objects.all()
        if options['run_command']:
            runs = ProblemRun.for_command(options['run_command'])
            self.stdout.write(f"Limiting to {options['run_command']} runs")

        run_count = runs.count()
        step_count = SweepStep.objects.filter(run__in=runs).count()
        self.stdout.write(f"Found {run_count} runs")
        self.stdout.write(f"Found {step_count} sweep steps")

        if not options['confirm']:
            self.stdout.write(
                self.style.WARNING('This is a dry run. Use --confirm to actually delete the records.')
            )
            return

        with transaction.atomic():
            deleted, _ = runs.delete()
        self.stdout.write(self.style.SUCCESS(f'Deleted {deleted} records ({run_count} runs)'))
