from django.apps import AppConfig


class CorrectnessConfig(AppConfig):
    name = 'correctness'
    verbose_name = 'Sample-based correctness'
