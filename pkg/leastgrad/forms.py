from django import forms
from django.core.exceptions import ValidationError

from .documents import parse_problem, parse_solution, parse_structure
from .exceptions import LeastGradientError


def _parsed(parser, document, label):
    try:
        return parser(document)
    except LeastGradientError as e:
        raise ValidationError(f'{label}: {e}')
    except (KeyError, TypeError, ValueError) as e:
        raise ValidationError(f'{label}: malformed document ({e!r})')


class ProblemSpecForm(forms.Form):
    document = forms.JSONField(help_text="Problem document: a domain plus boundary pieces, a structure or a named boundary function")

    def clean_document(self):
        document = self.cleaned_data['document']
        if not isinstance(document, dict):
            raise ValidationError('Problem document must be a JSON object.')
        if 'domain' not in document:
            raise ValidationError("Problem document has no 'domain'.")
        return document

    def clean(self):
        cleaned_data = super().clean()
        document = cleaned_data.get('document')
        if document is not None:
            cleaned_data['problem'] = _parsed(parse_problem, document, 'problem')
        return cleaned_data


class StructureForm(forms.Form):
    document = forms.JSONField(help_text="Imported structure: free polygon vertices, side traces, external TV")

    def clean_document(self):
        document = self.cleaned_data['document']
        if not isinstance(document, dict):
            raise ValidationError('Structure document must be a JSON object.')
        for key in ('vertices', 'alphas'):
            if not isinstance(document.get(key), list):
                raise ValidationError(f"Structure document needs a '{key}' list.")
        return document

    def clean(self):
        cleaned_data = super().clean()
        document = cleaned_data.get('document')
        if document is not None:
            cleaned_data['structure'] = _parsed(parse_structure, document, 'structure')
        return cleaned_data


class SolutionDocumentForm(forms.Form):
    document = forms.JSONField(help_text="Solution document written by solve")

    def clean_document(self):
        document = self.cleaned_data['document']
        if not isinstance(document, dict):
            raise ValidationError('Solution document must be a JSON object.')
        return document

    def clean(self):
        cleaned_data = super().clean()
        document = cleaned_data.get('document')
        if document is not None:
            cleaned_data['solution'] = _parsed(parse_solution, document, 'solution')
        return cleaned_data


class SweepParametersForm(forms.Form):
    p = forms.FloatField(min_value=1.0, help_text="Exponent of the norm term, 1 <= p < 2")
    grid = forms.IntegerField(min_value=1)
    eps_start = forms.FloatField()
    eps_factor = forms.FloatField()
    steps = forms.IntegerField(min_value=3)

    def clean_p(self):
        p = self.cleaned_data['p']
        if p >= 2.0:
            raise ValidationError('p must be below 2.')
        return p

    def clean_eps_start(self):
        eps = self.cleaned_data['eps_start']
        if not 0.0 < eps <= 1.0:
            raise ValidationError('eps-start must lie in (0, 1].')
        return eps

    def clean_eps_factor(self):
        factor = self.cleaned_data['eps_factor']
        if not 0.0 < factor < 1.0:
            raise ValidationError('eps-factor must lie strictly between 0 and 1.')
        return factor

    @property
    def schedule(self):
        data = self.cleaned_data
        return [data['eps_start'] * data['eps_factor'] ** k for k in range(data['steps'])]


def first_error(form) -> str:
    """One-line summary of a form's errors."""
    messages = []
    for field, errors in form.errors.items():
        prefix = '' if field == '__all__' else f'{field}: '
        messages.extend(prefix + str(e) for e in errors)
    return '; '.join(messages)
