"""
Django settings for the nctorus sandbox project.

The sandbox has no database, no templates and no URLs: it exists to run the
``nct`` management command and the test suite against a configured Django.
"""

import os

from configurations import Configuration, values

BASE_DIR = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))
PROBLEMS_DIR = os.path.join(BASE_DIR, "sandbox", "problems")

# Disable pylint error "W0232: Class has no __init__ method", because base Configuration
# class does not define an __init__ method.
# pylint: disable = W0232


class Base(Configuration):
    """
    This is the base configuration every configuration (aka environment) should inherit from.
    You may want to override the default numeric tolerances of nctorus by setting the
    following environment variable to a JSON object, e.g. '{"gap": 1e-6}':
    * NCTORUS_TOLERANCES
    """

    DEBUG = False

    SECRET_KEY = values.Value("sandbox-only-secret")

    # Django applications from the highest priority to the lowest
    INSTALLED_APPS = [
        # Noncommutative tori
        "nctorus",
    ]

    DATABASES = {}

    # Numeric tolerances, see nctorus.conf.Tolerances for the available keys
    NCTORUS_TOLERANCES = values.DictValue({}, environ_prefix=None)

    LOGGING = {
        "version": 1,
        "disable_existing_loggers": False,
        "formatters": {"simple": {"format": "%(levelname)s %(name)s %(message)s"}},
        "handlers": {
            "console": {
                "level": "DEBUG",
                "class": "logging.StreamHandler",
                "formatter": "simple",
            }
        },
        "loggers": {
            "nctorus": {"handlers": ["console"], "level": "WARNING", "propagate": False},
        },
    }


class Development(Base):
    """
    Development environment settings
    We set DEBUG to True and log every step of the computations.
    """

    DEBUG = True

    LOGGING = {
        "version": 1,
        "disable_existing_loggers": False,
        "formatters": {
            "verbose": {
                "format": "[%(levelname)s] [%(asctime)s] [%(module)s] "
                "%(process)d %(thread)d %(message)s"
            }
        },
        "handlers": {
            "console": {
                "level": "DEBUG",
                "class": "logging.StreamHandler",
                "formatter": "verbose",
            }
        },
        "loggers": {
            "nctorus": {
                "handlers": ["console"],
                "level": "DEBUG",
                "propagate": True,
            },
            "django": {"handlers": ["console"], "level": "INFO", "propagate": True},
        },
    }


class Test(Base):
    """Test environment settings"""

    # records go through the root logger so that assertLogs can capture them
    LOGGING = {
        "version": 1,
        "disable_existing_loggers": False,
        "loggers": {"nctorus": {"level": "DEBUG", "propagate": True}},
    }


class ContinuousIntegration(Test):
    """
    Continuous Integration environment settings
    nota bene: it should inherit from the Test environment.
    """
