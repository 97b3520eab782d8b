from django.core.management.base import CommandError

from leastgrad.classify import FamilyEnumerator, region_graph
from leastgrad.construct import build_solution
from leastgrad.documents import family_document
from leastgrad.exports import write_json
from leastgrad.forms import ProblemSpecForm, StructureForm

from ._base import EXIT_INPUT, LeastGradCommand


class Command(LeastGradCommand):
    help = 'Enumerates every family of least gradient solutions sharing the structure of the reference solution.'
    command_name = 'classify'

    def add_command_arguments(self, parser):
        source = parser.add_mutually_exclusive_group(required=True)
        source.add_argument('--input', help='Problem document (P.json)')
        source.add_argument('--structure', help='Imported structure document (I.json)')
        parser.add_argument('--out', required=True, help='Where to write the family document (F.json)')

    def run(self, **options):
        ties = []
        if options['structure']:
            graph = region_graph(self.read_document(options['structure'], StructureForm)['structure'])
        else:
            problem = self.read_document(options['input'], ProblemSpecForm)['problem']
            if problem.structure is not None:
                graph = region_graph(problem.structure)
            elif problem.boundary is not None:
                reference, ties = build_solution(problem.domain, problem.boundary)
                graph = region_graph(reference, ties)
            else:
                raise CommandError('classify needs boundary pieces or an imported structure', returncode=EXIT_INPUT)

        enumerator = FamilyEnumerator(graph)
        families = enumerator.enumerate()
        write_json(options['out'], family_document(graph, families, enumerator, ties))

        self.summary = {
            'free_components': len(graph.components),
            'families': len(families),
            'dropped': len(enumerator.dropped),
        }
        self.stdout.write(self.style.SUCCESS(
            f"Wrote {options['out']}: {len(graph.components)} free component(s), {len(families)} family(ies)"
        ))
        for dropped in enumerator.dropped:
            self.stdout.write(self.style.WARNING(f"Dropped: {dropped.reason}"))
