"""Handlers turning a problem file into a report, one per ``nct`` command."""
import logging
import time
from abc import ABC, abstractmethod
from typing import NamedTuple, Optional, Tuple

import numpy as np

from .connection import (
    classify_curvature,
    curvature_table,
    gauge_transform,
    yang_mills,
)
from .core import TorusElement, adjoint, derive, inner, multiply, torus_act, trace
from .exceptions import ConvergenceException, MalformedParamException, NCTException
from .heisenberg import integrability_report
from .matrix import (
    MatrixElement,
    hs_inner,
    mat_adjoint,
    mat_derive,
    mat_multiply,
    mat_torus_act,
    mat_trace,
)
from .moduli import match_rows, moduli_of_with_result
from .problem import Command, Problem
from .serializers import (
    complex_array,
    curvature_record,
    gauge_fix_record,
    integrability_record,
)
from .spectral import TruncationWindow

logger = logging.getLogger(__name__)


class HandlerResult(NamedTuple):
    report: dict
    exit_code: int


def element_record(element) -> dict:
    if isinstance(element, TorusElement):
        return {"kind": "torus", "terms": element.to_records()}
    return {"kind": "matrix", "entries": element.to_records()}


class BaseHandler(ABC):
    """
    Abstract handler for a problem file.

    This class verifies the problem file against its command. Subclasses must
    implement the _do_on_success() method to compute the outputs of a
    verified problem.
    """

    command: Command
    # name of the tolerance the ``--tol`` flag replaces
    primary_tolerance: str

    def __init__(
        self,
        op: Optional[str] = None,
        seed: Optional[int] = None,
        window: Optional[int] = None,
        tolerance: Optional[float] = None,
    ):
        self.op = op
        self.seed = seed
        self.window = window
        self.tolerance = tolerance

    def handle(self, document) -> HandlerResult:
        """Verify and run a problem, returning its report and exit code."""
        problem = Problem(document, self.command, self.op)
        started = time.perf_counter()
        try:
            problem.verify()
            outputs, diagnostics = self._do_on_success(problem)
        except NCTException as error:
            return self._do_on_failure(problem, error)
        except np.linalg.LinAlgError as error:
            return self._do_on_failure(
                problem, ConvergenceException(f"eigensolver failure: {error}")
            )
        logger.info(
            "%s finished in %.3fs", self.command.value, time.perf_counter() - started
        )
        return HandlerResult(self._report(problem, outputs, diagnostics), 0)

    def tolerances(self, problem: Problem):
        tolerances = problem.tolerances()
        if self.tolerance is None:
            return tolerances
        return tolerances.replace(**{self.primary_tolerance: self.tolerance})

    def _report(self, problem: Problem, outputs, diagnostics) -> dict:
        return {
            "command": self.command.value,
            "op": problem.op if problem.is_valid else self.op,
            "inputs_digest": problem.inputs_digest,
            "seed": problem.seed(self.seed) if problem.is_valid else self.seed,
            "outputs": outputs,
            "diagnostics": diagnostics,
        }

    @abstractmethod
    def _do_on_success(self, problem: Problem) -> Tuple[dict, dict]:
        """Compute the outputs and diagnostics of a verified problem."""
        raise NotImplementedError()

    def _do_on_failure(self, problem: Problem, error: NCTException) -> HandlerResult:
        """
        Default handler for failed problems: an error report carrying the
        exception's diagnostics, and its exit code.
        """
        logger.error("%s failed: %s", self.command.value, error)
        report = self._report(problem, None, dict(error.diagnostics))
        report["error"] = {"type": type(error).__name__, "message": str(error)}
        return HandlerResult(report, error.exit_code)


def _same_kind(operands):
    kinds = {type(operand) for operand in operands}
    if len(kinds) != 1:
        raise MalformedParamException("operands", "operands mix torus and matrix elements")
    return kinds.pop() is TorusElement


class AlgebraHandler(BaseHandler):
    """Run one operation of the algebra on named elements."""

    command = Command.ALGEBRA
    primary_tolerance = "drop"

    def _do_on_success(self, problem):
        tolerances = self.tolerances(problem)
        operands = problem.operands
        torus = _same_kind(operands)
        op = problem.op
        if op == "mul":
            result = (multiply if torus else mat_multiply)(*operands)
        elif op == "adjoint":
            result = (adjoint if torus else mat_adjoint)(operands[0])
        elif op == "derive":
            result = (derive if torus else mat_derive)(problem.axis, operands[0])
        elif op == "act":
            result = (torus_act if torus else mat_torus_act)(problem.z, operands[0])
        elif op == "trace":
            result = (trace if torus else mat_trace)(operands[0])
        else:
            result = (inner if torus else hs_inner)(*operands)

        if isinstance(result, (TorusElement, MatrixElement)):
            result = result.chop(tolerances.drop)
            outputs = {"element": element_record(result)}
            diagnostics = {"terms": _term_count(result)}
        else:
            outputs = {"value": complex_array(result)}
            diagnostics = {}
        return outputs, diagnostics


def _term_count(element) -> int:
    if isinstance(element, TorusElement):
        return len(element)
    return sum(len(entry) for row in element.entries for entry in row)


class ConnectionHandler(BaseHandler):
    """Curvature, classification, Yang-Mills value or gauge action of a connection."""

    command = Command.CONNECTION
    primary_tolerance = "curvature"

    def _do_on_success(self, problem):
        tolerances = self.tolerances(problem)
        connection = problem.connection()
        diagnostics = {
            "skew_deviation": connection.skew_deviation,
            "support_degree": connection.support_degree,
        }
        op = problem.op
        if op == "curvature":
            outputs = {
                "curvature": [
                    {"axes": row["axes"], "entries": row["curvature"].to_records()}
                    for row in curvature_table(connection)
                ]
            }
        elif op == "classify":
            outputs = curvature_record(classify_curvature(connection, tolerances.curvature))
        elif op == "ym":
            outputs = {"yang_mills": yang_mills(connection)}
        else:
            unitary = problem.matrix_element(problem.get_param("unitary"))
            transformed = gauge_transform(unitary, connection, tolerances.unitary)
            before, after = yang_mills(connection), yang_mills(transformed)
            outputs = {"connection": transformed.to_records(), "yang_mills": after}
            diagnostics["yang_mills_before"] = before
            diagnostics["yang_mills_difference"] = abs(after - before)
        return outputs, diagnostics


class ModuliHandler(BaseHandler):
    """Gauge fix a flat connection and report its moduli point."""

    command = Command.MODULI
    primary_tolerance = "gauge_residual"

    def _do_on_success(self, problem):
        tolerances = self.tolerances(problem)
        connection = problem.connection()
        window = TruncationWindow.for_connection(
            connection, problem.window(self.window), columns=1
        )
        point, result = moduli_of_with_result(
            connection, window, tolerances, problem.seed(self.seed)
        )
        outputs = {"point": point.to_list(), "n": point.n, "N": point.dimension}
        return outputs, {"gauge_fix": gauge_fix_record(result)}


class EquivHandler(BaseHandler):
    """Decide whether two connections, or two points, give the same moduli point."""

    command = Command.EQUIV
    primary_tolerance = "equivalence"

    def _do_on_success(self, problem):
        tolerances = self.tolerances(problem)
        diagnostics = {}
        if problem.get_param("points") is not None:
            points = problem.points(tolerances.snap)
        else:
            seed = problem.seed(self.seed)
            points = []
            for index, connection in enumerate(problem.connections()):
                window = TruncationWindow.for_connection(
                    connection, problem.window(self.window), columns=1
                )
                point, result = moduli_of_with_result(connection, window, tolerances, seed)
                points.append(point)
                diagnostics[f"gauge_fix_{index}"] = gauge_fix_record(result)
        permutation = match_rows(points[0], points[1], tolerances.equivalence)
        outputs = {
            "equivalent": permutation is not None,
            "permutation": None if permutation is None else list(permutation),
            "points": [point.to_list() for point in points],
        }
        return outputs, diagnostics


class HeisenbergHandler(BaseHandler):
    """Run the integrability checks of a Heisenberg lattice."""

    command = Command.HEISENBERG
    primary_tolerance = "pairing"

    def _do_on_success(self, problem):
        tolerances = self.tolerances(problem)
        report = integrability_report(problem.lattice(), tolerances, problem.sample_points())
        record = integrability_record(report)
        flags = record.pop("flags")
        passed = record.pop("passed")
        return record, {"flags": flags, "passed": passed}


HANDLERS = {
    handler.command: handler
    for handler in (
        AlgebraHandler,
        ConnectionHandler,
        ModuliHandler,
        EquivHandler,
        HeisenbergHandler,
    )
}


def get_handler(command, **options) -> BaseHandler:
    return HANDLERS[Command(command)](**options)
