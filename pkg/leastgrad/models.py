# leastgrad/models.py

from django.db import models


class ProblemRun(models.Model):
    class Status(models.TextChoices):
        SUCCESS = 'SUCCESS', 'Success'
        FAILED = 'FAILED', 'Verification failed'
        INPUT_ERROR = 'INPUT_ERROR', 'Input error'

    command = models.CharField(max_length=20, help_text="solve, classify, select or verify")
    input_digest = models.CharField(max_length=64, help_text="SHA-256 of the input documents")
    status = models.CharField(max_length=12, choices=Status.choices, default=Status.SUCCESS)
    exit_code = models.IntegerField(default=0)
    summary = models.JSONField(default=dict, blank=True, help_text="Headline numbers of the run (TV, family count, ...)")
    created_at = models.DateTimeField(auto_now_add=True)

    class Meta:
        ordering = ['-created_at']
        verbose_name = "Problem Run"
        verbose_name_plural = "Problem Runs"

    def __str__(self):
        return f"{self.command} {self.input_digest[:12]} ({self.get_status_display()})"

    @classmethod
    def for_command(cls, command):
        return cls.objects.filter(command=command)


class SweepStep(models.Model):
    run = models.ForeignKey(ProblemRun, on_delete=models.CASCADE, related_name='sweep_steps')
    position = models.IntegerField(help_text="Index of this eps in the schedule")
    eps = models.FloatField()
    energy_f = models.FloatField()
    energy_g = models.FloatField()
    pnorm = models.FloatField()
    lambda_hat = models.FloatField(null=True, blank=True)
    iterations = models.IntegerField(default=0)
    residual = models.FloatField(null=True, blank=True)

    class Meta:
        ordering = ['run', 'position']
        unique_together = ('run', 'position')

    def __str__(self):
        return f"eps={self.eps:g} F={self.energy_f:.6g}"
