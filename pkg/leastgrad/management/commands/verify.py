from django.core.management.base import CommandError

from leastgrad.construct import total_variation, verify_least_gradient
from leastgrad.exceptions import VerificationFailure
from leastgrad.forms import ProblemSpecForm, SolutionDocumentForm

from ._base import EXIT_INPUT, LeastGradCommand


class Command(LeastGradCommand):
    help = 'Checks that a candidate solution attains the boundary data with the least total variation.'
    command_name = 'verify'

    def add_command_arguments(self, parser):
        parser.add_argument('--candidate', required=True, help='Candidate solution document')
        parser.add_argument('--reference', required=True, help='Reference solution document')
        parser.add_argument('--input', required=True, help='Problem document with the boundary data')

    def run(self, **options):
        candidate = self.read_document(options['candidate'], SolutionDocumentForm)['solution']
        reference = self.read_document(options['reference'], SolutionDocumentForm)['solution']
        problem = self.read_document(options['input'], ProblemSpecForm)['problem']
        if problem.boundary_function is not None:
            raise CommandError('verify needs piecewise-constant boundary data', returncode=EXIT_INPUT)
        h = problem.source

        ok = verify_least_gradient(candidate, reference, h)
        cand_tv, ref_tv = total_variation(candidate), total_variation(reference)
        self.summary = {'candidate_tv': cand_tv, 'reference_tv': ref_tv, 'verified': ok}
        if not ok:
            raise VerificationFailure(f"candidate TV {cand_tv!r} differs from reference TV {ref_tv!r}")
        self.stdout.write(self.style.SUCCESS(f"Candidate is a least gradient solution (TV = {cand_tv!r})"))
