"""
Utilities to represent and validate nctorus problem files

A problem file is a single JSON document. Its keys are checked against the set
allowed for the command being run, as are the keys each command requires.
"""
import dataclasses
import logging
from collections.abc import MutableMapping
from enum import Enum
from numbers import Number, Real
from typing import Any, List, Optional, Set

import numpy as np

from .conf import DEFAULT_TOLERANCES, Tolerances, get_tolerances
from .connection import Connection, constant_connection, gauge_word
from .core import ThetaMatrix, TorusElement
from .exceptions import (
    DimensionMismatchException,
    InvalidParamException,
    InvalidThetaException,
    MalformedParamException,
    MissingParamException,
    ProblemNotVerifiedException,
    UnknownReferenceException,
)
from .heisenberg import HeisenbergLattice
from .matrix import MatrixElement
from .moduli import ModuliPoint
from .spectral import DEFAULT_CUTOFF
from .utils import digest

logger = logging.getLogger(__name__)

PROBLEM_VERSION = 1


class Command(str, Enum):
    """Enum describing the commands of the ``nct`` front end."""

    ALGEBRA = "algebra"
    CONNECTION = "connection"
    MODULI = "moduli"
    EQUIV = "equiv"
    HEISENBERG = "heisenberg"


class ElementKind(str, Enum):
    """Enum describing the kinds of named elements a problem file may hold."""

    TORUS = "torus"
    MATRIX = "matrix"


ALGEBRA_OPS = ("mul", "adjoint", "trace", "derive", "inner", "act")
CONNECTION_OPS = ("curvature", "classify", "ym", "gauge")

PARAMS_COMMON = {"version", "description", "seed", "tolerance"}

PARAMS_ALLOWED = {
    Command.ALGEBRA: PARAMS_COMMON | {"theta", "elements", "op", "operands", "axis", "z"},
    Command.CONNECTION: PARAMS_COMMON | {"theta", "n", "elements", "op", "connection", "unitary"},
    Command.MODULI: PARAMS_COMMON | {"theta", "n", "elements", "connection", "window"},
    Command.EQUIV: PARAMS_COMMON | {"theta", "n", "elements", "connections", "points", "window"},
    Command.HEISENBERG: PARAMS_COMMON | {"lattice", "points"},
}

PARAMS_REQUIRED = {
    Command.ALGEBRA: {"version", "theta", "elements", "operands"},
    Command.CONNECTION: {"version", "theta", "connection"},
    Command.MODULI: {"version", "theta", "connection"},
    Command.EQUIV: {"version"},
    Command.HEISENBERG: {"version", "lattice"},
}

# how many operands each algebra operation consumes
OPERAND_COUNT = {"mul": 2, "adjoint": 1, "trace": 1, "derive": 1, "inner": 2, "act": 1}


class ProblemParams(MutableMapping):
    """
    Represents the top level keys of a problem file. Provides dict-like
    behavior through the use of the MutableMapping ABC mixin. Strictly
    enforces that keys are valid for the command.
    """

    def __init__(self, command: Command, *args, **kwargs):
        self.command = Command(command)
        self.params_allowed: Set[str] = PARAMS_ALLOWED[self.command]
        self.params_required: Set[str] = PARAMS_REQUIRED[self.command]

        self._params = {}
        self.update(*args, **kwargs)

        for param in self.params_required:
            if param not in self:
                raise MissingParamException(param)

    def valid_param(self, param: str) -> bool:
        """Checks if a top level key is valid for the command.

        Keys starting with ``x_`` are free-form annotations and always accepted.
        """
        return param.startswith("x_") or param in self.params_allowed

    def __len__(self):
        return len(self._params)

    def __getitem__(self, item):
        if not self.valid_param(item):
            raise KeyError(f"{item} is not a valid param for {self.command.value}")
        return self._params[item]

    def __setitem__(self, key, value):
        if not self.valid_param(key):
            raise InvalidParamException(key)
        self._params[key] = value

    def __delitem__(self, key):
        if key in self._params:
            del self._params[key]

    def __iter__(self):
        return iter(self._params)


def parse_complex(value, param: str) -> complex:
    """Read a complex number given as a real number or a ``[re, im]`` pair."""
    if isinstance(value, Real) and not isinstance(value, bool):
        return complex(value)
    if (
        isinstance(value, (list, tuple))
        and len(value) == 2
        and all(isinstance(part, Real) and not isinstance(part, bool) for part in value)
    ):
        return complex(value[0], value[1])
    raise MalformedParamException(param, f"expected a number or [re, im], got {value!r}")


def parse_scalar_matrix(value, param: str) -> np.ndarray:
    if not isinstance(value, list) or not value or not all(isinstance(row, list) for row in value):
        raise MalformedParamException(param, "expected a square matrix of complex entries")
    size = len(value)
    if any(len(row) != size for row in value):
        raise MalformedParamException(param, "matrix is not square")
    return np.array(
        [[parse_complex(entry, param) for entry in row] for row in value], dtype=complex
    )


def parse_int(value, param: str, minimum: Optional[int] = None) -> int:
    if not isinstance(value, int) or isinstance(value, bool):
        raise MalformedParamException(param, f"expected an integer, got {value!r}")
    if minimum is not None and value < minimum:
        raise MalformedParamException(param, f"must be at least {minimum}")
    return value


class Problem:
    """The Problem object abstracts a problem file.

    It checks the document against the command it is given to, and resolves
    references to named elements into algebra values.
    """

    def __init__(self, document: Any, command: Command, op: Optional[str] = None):
        """Initialize the problem.

        Args:
            document: The decoded JSON document
            command: The command the problem is given to
            op: An operation overriding the one named in the file
        """
        self.document = document
        self.command = Command(command)
        self._op_override = op
        self._params: Optional[ProblemParams] = None
        self._verified = False
        self._theta: Optional[ThetaMatrix] = None
        self._elements: dict = {}

    def verify(self) -> bool:
        """Verify the problem file.

        Returns:
            bool: True if the problem file is valid.

        Raises:
            ProblemFileException: Raised if the document does not follow the schema
            PreconditionException: Raised if a value breaks a mathematical precondition
        """
        if not isinstance(self.document, dict):
            raise MalformedParamException("document", "expected a JSON object")
        params = ProblemParams(self.command, self.document)
        if params["version"] != PROBLEM_VERSION:
            raise MalformedParamException("version", f"expected {PROBLEM_VERSION}")
        self._params = params

        if "theta" in params:
            self._theta = self._parse_theta(params["theta"])
        self._elements = self._parse_elements(params.get("elements", {}))
        self._check_command()
        self._verified = True
        logger.debug("Verified %s problem %s", self.command.value, self.inputs_digest[:12])
        return True

    def _parse_theta(self, value) -> ThetaMatrix:
        try:
            return ThetaMatrix(value)
        except (TypeError, ValueError) as error:
            raise MalformedParamException("theta", str(error)) from error
        except InvalidThetaException as error:
            raise MalformedParamException("theta", str(error)) from error

    def _parse_elements(self, elements) -> dict:
        if not isinstance(elements, dict):
            raise MalformedParamException("elements", "expected an object of named elements")
        parsed = {}
        for name, record in elements.items():
            parsed[name] = self._parse_element(name, record)
        return parsed

    def _parse_element(self, name: str, record):
        param = f"elements.{name}"
        if self._theta is None:
            raise MissingParamException("theta")
        if not isinstance(record, dict) or "kind" not in record:
            raise MalformedParamException(param, "expected an object with a kind")
        try:
            kind = ElementKind(record["kind"])
        except ValueError as error:
            raise MalformedParamException(param, f"unknown kind {record['kind']!r}") from error
        try:
            if kind == ElementKind.TORUS:
                return TorusElement.from_records(self._theta, record["terms"])
            element = MatrixElement.from_records(self._theta, record["entries"])
        except KeyError as error:
            raise MissingParamException(f"{param}.{error.args[0]}") from error
        except (TypeError, ValueError, IndexError, DimensionMismatchException) as error:
            raise MalformedParamException(param, str(error)) from error
        size = self._params.get("n")
        if size is not None and element.n != size:
            raise MalformedParamException(param, f"expected an {size}x{size} matrix")
        return element

    def _check_command(self):
        params = self._params
        if self.command == Command.ALGEBRA:
            op = self._check_op(ALGEBRA_OPS)
            operands = params["operands"]
            if not isinstance(operands, list) or len(operands) != OPERAND_COUNT[op]:
                raise MalformedParamException(
                    "operands", f"{op} takes {OPERAND_COUNT[op]} operand(s)"
                )
            if op == "derive" and "axis" not in params:
                raise MissingParamException("axis")
            if op == "act" and "z" not in params:
                raise MissingParamException("z")
        elif self.command == Command.CONNECTION:
            op = self._check_op(CONNECTION_OPS)
            if op == "gauge" and "unitary" not in params:
                raise MissingParamException("unitary")
        elif self.command == Command.EQUIV:
            has_connections = "connections" in params
            if has_connections == ("points" in params):
                raise MalformedParamException(
                    "connections", "give exactly one of connections or points"
                )
            if has_connections and "theta" not in params:
                raise MissingParamException("theta")
            pair = params["connections" if has_connections else "points"]
            if not isinstance(pair, list) or len(pair) != 2:
                raise MalformedParamException(
                    "connections" if has_connections else "points", "expected exactly two entries"
                )
        if "seed" in params:
            parse_int(params["seed"], "seed", minimum=0)
        if "window" in params:
            parse_int(params["window"], "window", minimum=0)
        if "tolerance" in params:
            self._parse_tolerance_overrides(params["tolerance"])

    def _check_op(self, choices) -> str:
        op = self._op_override or self._params.get("op")
        if op is None:
            raise MissingParamException("op")
        if op not in choices:
            raise MalformedParamException("op", f"expected one of {', '.join(choices)}")
        return op

    @staticmethod
    def _parse_tolerance_overrides(value) -> dict:
        if not isinstance(value, dict):
            raise MalformedParamException("tolerance", "expected an object of named tolerances")
        known = {field.name for field in dataclasses.fields(Tolerances)}
        for key, item in value.items():
            if key not in known:
                raise InvalidParamException(f"tolerance.{key}")
            if not isinstance(item, Number) or isinstance(item, bool) or item <= 0:
                raise MalformedParamException(f"tolerance.{key}", "expected a positive number")
            if isinstance(getattr(DEFAULT_TOLERANCES, key), int) and not isinstance(item, int):
                raise MalformedParamException(f"tolerance.{key}", "expected an integer")
        return value

    def _check_verified(self):
        if not self._verified:
            raise ProblemNotVerifiedException()

    @property
    def is_valid(self) -> bool:
        return self._verified

    def get_param(self, name: str, default: Any = None):
        """Retrieve a top level value given its key.

        Args:
            name: Name of the key
            default: Default value if the key is not found

        Returns:
            The raw value of the key if it exists, or the default value otherwise.
        """
        self._check_verified()
        return self._params.get(name, default)

    @property
    def inputs_digest(self) -> str:
        return digest(self.document)

    @property
    def op(self) -> Optional[str]:
        self._check_verified()
        return self._op_override or self._params.get("op")

    @property
    def theta(self) -> ThetaMatrix:
        self._check_verified()
        if self._theta is None:
            raise MissingParamException("theta")
        return self._theta

    def element(self, name: str):
        """Resolve a named element of the problem file."""
        self._check_verified()
        if not isinstance(name, str) or name not in self._elements:
            raise UnknownReferenceException(str(name))
        return self._elements[name]

    def matrix_element(self, name: str) -> MatrixElement:
        element = self.element(name)
        if isinstance(element, TorusElement):
            return MatrixElement(self._theta, [[element]])
        return element

    @property
    def operands(self) -> List:
        self._check_verified()
        return [self.element(name) for name in self._params["operands"]]

    @property
    def axis(self) -> int:
        self._check_verified()
        return parse_int(self._params.get("axis"), "axis")

    @property
    def z(self) -> List[complex]:
        self._check_verified()
        value = self._params.get("z")
        if not isinstance(value, list):
            raise MalformedParamException("z", "expected a list of complex numbers")
        return [parse_complex(item, "z") for item in value]

    def seed(self, override: Optional[int] = None) -> int:
        self._check_verified()
        if override is not None:
            return override
        return parse_int(self._params.get("seed", 0), "seed", minimum=0)

    def window(self, override: Optional[int] = None) -> int:
        self._check_verified()
        if override is not None:
            return parse_int(override, "window", minimum=0)
        return parse_int(self._params.get("window", DEFAULT_CUTOFF), "window", minimum=0)

    def tolerances(self) -> Tolerances:
        """The active tolerances with the file's ``tolerance`` overrides applied."""
        self._check_verified()
        overrides = self._params.get("tolerance", {})
        base = get_tolerances()
        return base.replace(
            **{
                key: type(getattr(base, key))(value)
                for key, value in overrides.items()
            }
        )

    def connection(self, record=None, param: str = "connection") -> Connection:
        """Build a connection from its record.

        Three forms are accepted: ``{"h": [matrix records]}``, a reference
        ``{"element_h": [names]}`` to named matrix elements, or a constant form
        ``{"lambdas": [matrices]}``. An optional ``gauge`` list of named
        unitaries is applied afterwards, in order.
        """
        self._check_verified()
        if record is None:
            record = self._params["connection"]
        if not isinstance(record, dict):
            raise MalformedParamException(param, "expected an object")
        forms = [key for key in ("h", "element_h", "lambdas") if key in record]
        if len(forms) != 1:
            raise MalformedParamException(param, "give exactly one of h, element_h, lambdas")
        theta = self.theta
        try:
            if "h" in record:
                connection = Connection(
                    theta, [MatrixElement.from_records(theta, item) for item in record["h"]]
                )
            elif "element_h" in record:
                connection = Connection(
                    theta, [self.matrix_element(name) for name in record["element_h"]]
                )
            else:
                connection = constant_connection(
                    theta,
                    [
                        parse_scalar_matrix(item, f"{param}.lambdas")
                        for item in record["lambdas"]
                    ],
                )
        except (TypeError, ValueError, IndexError, DimensionMismatchException) as error:
            raise MalformedParamException(param, str(error)) from error
        gauge = record.get("gauge", [])
        if not isinstance(gauge, list):
            raise MalformedParamException(f"{param}.gauge", "expected a list of element names")
        if gauge:
            connection = gauge_word([self.matrix_element(name) for name in gauge], connection)
        n = self._params.get("n")
        if n is not None and connection.n != n:
            raise MalformedParamException(param, f"expected rank {n}, got {connection.n}")
        return connection

    def connections(self) -> List[Connection]:
        self._check_verified()
        return [
            self.connection(record, f"connections[{index}]")
            for index, record in enumerate(self._params["connections"])
        ]

    def points(self, snap: Optional[float] = None) -> List[ModuliPoint]:
        self._check_verified()
        points = []
        for index, rows in enumerate(self._params["points"]):
            try:
                array = np.array(rows, dtype=float)
            except (TypeError, ValueError) as error:
                raise MalformedParamException(f"points[{index}]", str(error)) from error
            if array.ndim != 2:
                raise MalformedParamException(f"points[{index}]", "expected n rows of N numbers")
            points.append(ModuliPoint.from_rows(array, snap))
        return points

    def lattice(self) -> HeisenbergLattice:
        self._check_verified()
        record = self._params["lattice"]
        if not isinstance(record, dict) or "p" not in record or "G" not in record:
            raise MalformedParamException("lattice", "expected an object with p and G")
        p = parse_int(record["p"], "lattice.p", minimum=1)
        try:
            generators = np.array(record["G"], dtype=float)
        except (TypeError, ValueError) as error:
            raise MalformedParamException("lattice.G", str(error)) from error
        if generators.shape != (2 * p, 2 * p):
            raise MalformedParamException(
                "lattice.G", f"expected a {2 * p}x{2 * p} matrix, got shape {generators.shape}"
            )
        return HeisenbergLattice(p, generators)

    def sample_points(self) -> Optional[np.ndarray]:
        """Evaluation points for the Heisenberg phase check, if the file gives any."""
        self._check_verified()
        value = self._params.get("points")
        if value is None:
            return None
        try:
            array = np.array(value, dtype=float)
        except (TypeError, ValueError) as error:
            raise MalformedParamException("points", str(error)) from error
        if array.ndim != 2 or array.shape[0] == 0:
            raise MalformedParamException("points", "expected a non-empty list of points")
        return array
