import hashlib
import logging
from pathlib import Path

from django.core.management.base import BaseCommand, CommandError

from leastgrad.exceptions import LeastGradientError, VerificationFailure
from leastgrad.forms import first_error
from leastgrad.models import ProblemRun, SweepStep

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_INPUT = 2


class LeastGradCommand(BaseCommand):
    """
    Shared plumbing for solve, classify, select and verify: document loading
    through the validation forms, the exit-code mapping and the optional run
    archive (--record).
    """

    command_name = ''

    def add_arguments(self, parser):
        parser.add_argument(
            '--record',
            action='store_true',
            help='Store the run and its headline numbers in the run archive',
        )
        self.add_command_arguments(parser)

    def add_command_arguments(self, parser):
        pass

    def run(self, **options):
        raise NotImplementedError

    def handle(self, *args, **options):
        self.digest = hashlib.sha256()
        self.summary = {}
        self.sweep_rows = []
        try:
            self.run(**options)
        except VerificationFailure as e:
            self.archive(options, ProblemRun.Status.FAILED, EXIT_FAILED)
            raise CommandError(str(e), returncode=EXIT_FAILED)
        except LeastGradientError as e:
            self.archive(options, ProblemRun.Status.INPUT_ERROR, EXIT_INPUT)
            raise CommandError(str(e), returncode=EXIT_INPUT)
        except CommandError as e:
            status = ProblemRun.Status.FAILED if e.returncode == EXIT_FAILED else ProblemRun.Status.INPUT_ERROR
            self.archive(options, status, e.returncode)
            raise
        self.archive(options, ProblemRun.Status.SUCCESS, EXIT_OK)

    def read_document(self, path, form_class):
        """Cleaned data of form_class bound to the JSON text at path."""
        try:
            text = Path(path).read_text(encoding='utf-8')
        except OSError as e:
            raise CommandError(f'Cannot read "{path}": {e.strerror}', returncode=EXIT_INPUT)
        self.digest.update(text.encode('utf-8'))
        form = form_class(data={'document': text})
        if not form.is_valid():
            raise CommandError(f'{path}: {first_error(form)}', returncode=EXIT_INPUT)
        return form.cleaned_data

    def archive(self, options, status, exit_code):
        if not options.get('record'):
            return
        run = ProblemRun.objects.create(
            command=self.command_name,
            input_digest=self.digest.hexdigest(),
            status=status,
            exit_code=exit_code,
            summary=self.summary,
        )
        SweepStep.objects.bulk_create(SweepStep(run=run, **row) for row in self.sweep_rows)
        logger.info(f"Recorded run {run.pk} ({self.command_name}, exit {exit_code})")
