from pathlib import Path

from django.core.management.base import CommandError

from leastgrad.exports import write_field_dump, write_pgm, write_report_csv
from leastgrad.forms import ProblemSpecForm, SweepParametersForm, first_error
from leastgrad.selector_grid import epsilon_sweep, rasterize

from ._base import EXIT_INPUT, LeastGradCommand


class Command(LeastGradCommand):
    help = 'Minimises the regularised energy along a decreasing eps schedule and reports which solution is selected.'
    command_name = 'select'

    def add_command_arguments(self, parser):
        parser.add_argument('--input', required=True, help='Problem document (P.json)')
        parser.add_argument('--p', type=float, default=1.5, help='Norm exponent, 1 <= p < 2')
        parser.add_argument('--grid', type=int, default=128, help='Cells across the domain')
        parser.add_argument('--eps-start', type=float, default=0.1)
        parser.add_argument('--eps-factor', type=float, default=0.1)
        parser.add_argument('--steps', type=int, default=5)
        parser.add_argument('--report', required=True, help='CSV report path')
        parser.add_argument('--images', help='Directory for one PGM image per eps')
        parser.add_argument('--dump', help='Directory for raw field dumps')
        parser.add_argument('--max-iters', type=int, help='Solver iteration cap (defaults to settings)')

    def run(self, **options):
        problem = self.read_document(options['input'], ProblemSpecForm)['problem']
        params = SweepParametersForm(data={
            'p': options['p'],
            'grid': options['grid'],
            'eps_start': options['eps_start'],
            'eps_factor': options['eps_factor'],
            'steps': options['steps'],
        })
        if not params.is_valid():
            raise CommandError(first_error(params), returncode=EXIT_INPUT)
        schedule = params.schedule
        self.digest.update(repr(sorted(params.cleaned_data.items())).encode('utf-8'))

        solver = {'max_iters': options['max_iters']} if options.get('max_iters') else {}
        template = rasterize(problem.domain, problem.source, params.cleaned_data['grid'],
                             p=params.cleaned_data['p'], eps=schedule[0], **solver)
        probe = problem.probe
        if probe is None and problem.structure is not None:
            probe = tuple(problem.domain.point(t) for t in problem.structure.vertices)

        self.stdout.write(f"Sweeping {len(schedule)} eps values on a {template.template.nx}x{template.template.ny} grid")
        report = epsilon_sweep(template, schedule, probe=probe, domain=problem.domain)
        write_report_csv(options['report'], report)

        for k, step in enumerate(report.steps):
            if options['images']:
                write_pgm(Path(options['images']) / f'u_{k:02d}.pgm', step.field)
            if options['dump']:
                write_field_dump(options['dump'], f'u_{k:02d}', step.field)
            self.sweep_rows.append({
                'position': k, 'eps': step.eps, 'energy_f': step.F, 'energy_g': step.G,
                'pnorm': step.pnorm, 'lambda_hat': step.lambda_hat,
                'iterations': step.iterations, 'residual': step.residual,
            })

        self.summary = {
            'steps': len(report.steps),
            'f_nonincreasing': report.f_nonincreasing,
            'pointwise_monotone': report.pointwise_monotone,
            'last_lambda_hat': report.steps[-1].lambda_hat,
        }
        self.stdout.write(self.style.SUCCESS(f"Wrote {options['report']} ({len(report.steps)} rows)"))
        if not report.f_nonincreasing:
            self.stdout.write(self.style.WARNING('F is not nonincreasing along the schedule'))
        if report.pointwise_monotone is False:
            self.stdout.write(self.style.WARNING('Minimisers are not pointwise nondecreasing along the schedule'))
