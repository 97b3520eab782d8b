from django.apps import AppConfig

class LeastGradConfig(AppConfig):
    default_auto_field = 'django.db.models.BigAutoField'
    name = 'leastgrad'
    verbose_name = 'Least gradient solver'
