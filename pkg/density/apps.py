from django.apps import AppConfig


class DensityConfig(AppConfig):
    name = 'density'
    verbose_name = 'Labelled densities'
