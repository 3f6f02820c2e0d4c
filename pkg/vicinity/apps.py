from django.apps import AppConfig


class VicinityConfig(AppConfig):
    name = 'vicinity'
    verbose_name = 'Vicinity kernels'
