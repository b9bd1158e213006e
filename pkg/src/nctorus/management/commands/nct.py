"""The ``nct`` management command: run a problem file and write its report."""
import json
import logging

from django.core.management.base import BaseCommand, CommandError

from nctorus.handlers import get_handler
from nctorus.problem import Command as ProblemCommand
from nctorus.serializers import dumps

logger = logging.getLogger("nctorus")

# exit code of unreadable or undecodable problem files
INPUT_ERROR = 2


class Command(BaseCommand):
    """Run one nctorus command on a JSON problem file."""

    help = "Run an nctorus command on a JSON problem file and print its report."

    def add_arguments(self, parser):
        parser.add_argument("command", choices=[command.value for command in ProblemCommand])
        parser.add_argument("--input", required=True, help="path of the JSON problem file")
        parser.add_argument("--op", help="operation, overriding the one in the problem file")
        parser.add_argument("--seed", type=int, help="random seed, default from the file or 0")
        parser.add_argument("--window", type=int, help="truncation cutoff M")
        parser.add_argument("--tol", type=float, help="override of the command's main tolerance")
        parser.add_argument("--output", help="write the report here instead of stdout")

    def handle(self, *args, **options):
        if options["verbosity"] >= 2:
            logger.setLevel(logging.DEBUG)

        for flag in ("seed", "window"):
            if options[flag] is not None and options[flag] < 0:
                raise CommandError(f"--{flag} must be non-negative", returncode=INPUT_ERROR)
        if options["tol"] is not None and not options["tol"] > 0:
            raise CommandError("--tol must be positive", returncode=INPUT_ERROR)

        try:
            with open(options["input"], encoding="utf-8") as problem_file:
                document = json.load(problem_file)
        except OSError as error:
            raise CommandError(f"cannot read {options['input']}: {error}", returncode=INPUT_ERROR)
        except ValueError as error:
            raise CommandError(
                f"{options['input']} is not valid JSON: {error}", returncode=INPUT_ERROR
            )

        handler = get_handler(
            options["command"],
            op=options["op"],
            seed=options["seed"],
            window=options["window"],
            tolerance=options["tol"],
        )
        result = handler.handle(document)
        text = dumps(result.report)
        if options["output"]:
            with open(options["output"], "w", encoding="utf-8") as report_file:
                report_file.write(text)
            logger.info("Report written to %s", options["output"])
        else:
            self.stdout.write(text, ending="")

        if result.exit_code:
            raise CommandError(result.report["error"]["message"], returncode=result.exit_code)
