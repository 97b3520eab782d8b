from django.core.management.base import CommandError

from leastgrad.construct import build_solution, total_variation
from leastgrad.documents import serialize_solution
from leastgrad.exports import write_json
from leastgrad.forms import ProblemSpecForm

from ._base import EXIT_INPUT, LeastGradCommand


class Command(LeastGradCommand):
    help = 'Builds the canonical least gradient solution for piecewise-constant boundary data.'
    command_name = 'solve'

    def add_command_arguments(self, parser):
        parser.add_argument('--input', required=True, help='Problem document (P.json)')
        parser.add_argument('--out', required=True, help='Where to write the solution document (S.json)')

    def run(self, **options):
        problem = self.read_document(options['input'], ProblemSpecForm)['problem']
        if problem.boundary is None:
            raise CommandError('solve needs piecewise-constant boundary pieces', returncode=EXIT_INPUT)

        solution, ties = build_solution(problem.domain, problem.boundary)
        write_json(options['out'], serialize_solution(solution, ties))

        tv = total_variation(solution)
        tied = sum(1 for record in ties if record.is_tied)
        self.summary = {'chords': len(solution.chords), 'total_variation': tv, 'tied_thresholds': tied}
        self.stdout.write(self.style.SUCCESS(
            f"Wrote {options['out']}: {len(solution.chords)} chords, TV = {tv!r}"
        ))
        if tied:
            self.stdout.write(self.style.WARNING(
                f"{tied} threshold(s) have tied minimal matchings; run classify for the full family"
            ))
