"""Console entry point of the ``nct`` command."""
import os
import sys

import django
from django.conf import settings

STANDALONE_LOGGING = {
    "version": 1,
    "disable_existing_loggers": False,
    "formatters": {"simple": {"format": "%(levelname)s %(name)s %(message)s"}},
    "handlers": {
        "console": {"level": "DEBUG", "class": "logging.StreamHandler", "formatter": "simple"}
    },
    "loggers": {"nctorus": {"handlers": ["console"], "level": "WARNING", "propagate": False}},
}


def setup():
    """Configure Django for a command line run.

    A project that sets ``DJANGO_CONFIGURATION`` is loaded through
    django-configurations; otherwise a minimal in-memory configuration is used.
    """
    if os.environ.get("DJANGO_CONFIGURATION"):
        import configurations  # pylint: disable=import-outside-toplevel

        configurations.setup()
        return
    if not settings.configured:
        settings.configure(INSTALLED_APPS=["nctorus"], LOGGING=STANDALONE_LOGGING)
    django.setup()


def main(argv=None):
    """Run ``nct <command> --input <file> ...`` and exit with the report's code."""
    setup()
    # pylint: disable=import-outside-toplevel
    from nctorus.management.commands.nct import Command

    argv = sys.argv[1:] if argv is None else list(argv)
    Command().run_from_argv(["nct", "nct", *argv])


if __name__ == "__main__":
    main()
