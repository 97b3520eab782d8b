from pathlib import Path

from django.core.management.base import BaseCommand

from leastgrad.catalog import FIXTURES
from leastgrad.exports import write_json


class Command(BaseCommand):
    help = 'Regenerates the fixture documents (problems and imported structures) from the catalog.'

    def add_arguments(self, parser):
        parser.add_argument(
            '--out',
            default=str(Path(__file__).resolve().parents[2] / 'fixtures'),
            help='Target directory (defaults to the app fixtures directory)',
        )

    def handle(self, *args, **options):
        out = Path(options['out'])
        for name, build in FIXTURES.items():
            write_json(out / name, build())
            self.stdout.write(f"Wrote {out / name}")
        self.stdout.write(self.style.SUCCESS(f'Successfully wrote {len(FIXTURES)} fixtures.'))
