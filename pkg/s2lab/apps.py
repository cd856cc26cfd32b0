from django.apps import AppConfig


class S2labConfig(AppConfig):
    default_auto_field = 'django.db.models.BigAutoField'
    name = 's2lab'
    verbose_name = 'S2 graph active learning lab'
