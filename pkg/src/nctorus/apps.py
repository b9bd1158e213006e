"""nctorus application."""
from django.apps import AppConfig
from django.utils.translation import gettext_lazy as _


class NctorusConfig(AppConfig):
    """Configuration class for the nctorus app."""

    verbose_name = _("Noncommutative tori")
    name = "nctorus"
