from django.apps import AppConfig


class BayesConfig(AppConfig):
    name = 'bayes'
    verbose_name = 'Bayes rule and Bayes error'
