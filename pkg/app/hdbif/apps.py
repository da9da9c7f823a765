from django.apps import AppConfig


class HdbifConfig(AppConfig):
    name = 'hdbif'
