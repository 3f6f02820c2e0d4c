from django.apps import AppConfig


class ConvolutionConfig(AppConfig):
    name = 'convolution'
