from django.apps import AppConfig


class CryptsConfig(AppConfig):
    name = 'crypts'
