from django.apps import AppConfig


class BiotemplatesConfig(AppConfig):
    name = 'biotemplates'
