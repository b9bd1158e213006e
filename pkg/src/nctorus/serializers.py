"""JSON encoding of nctorus values and reports."""
import json
from enum import Enum

import numpy as np
from django.core.serializers.json import DjangoJSONEncoder

from .connection import Connection, CurvatureReport
from .core import ThetaMatrix, TorusElement
from .heisenberg import (
    COEFFICIENT_CONVENTION,
    CURVATURE_CONVENTION,
    HeisenbergLattice,
    IntegrabilityReport,
)
from .matrix import MatrixElement
from .moduli import ModuliPoint
from .spectral import GaugeFixResult


class NCTJSONEncoder(DjangoJSONEncoder):
    """JSONEncoder subclass that knows how to encode numpy and algebra values.

    Complex numbers become ``[re, im]`` pairs; floats keep Python's shortest
    round-trip representation.
    """

    def default(self, o):  # pylint: disable=too-many-return-statements
        if isinstance(o, complex):
            return [float(o.real), float(o.imag)]
        if isinstance(o, np.generic):
            return o.item()
        if isinstance(o, np.ndarray):
            return o.tolist()
        if isinstance(o, Enum):
            return o.value
        if isinstance(o, ThetaMatrix):
            return o.to_list()
        if isinstance(o, (TorusElement, MatrixElement, Connection)):
            return o.to_records()
        if isinstance(o, ModuliPoint):
            return o.to_list()
        if isinstance(o, HeisenbergLattice):
            return o.to_dict()
        return super().default(o)


def dumps(document) -> str:
    """Serialize a report: sorted keys, two-space indent, trailing newline."""
    return json.dumps(document, cls=NCTJSONEncoder, sort_keys=True, indent=2) + "\n"


def complex_array(values) -> list:
    """Nested lists of ``[re, im]`` pairs."""
    values = np.asarray(values, dtype=complex)
    return np.stack([values.real, values.imag], axis=-1).tolist()


def curvature_record(report: CurvatureReport) -> dict:
    return {
        "classification": report.classification.value,
        "scalars": None if report.scalars is None else complex_array(report.scalars),
        "residual": report.residual,
        "curvature_norm": report.curvature_norm,
    }


def gauge_fix_record(result: GaugeFixResult) -> dict:
    return {
        "lambdas": [complex_array(member) for member in result.lambdas],
        "residual": result.residual,
        "isometry_log": list(result.isometry_log),
        "joint_eigenvalues": complex_array(result.joint_eigenvalues),
        "eigenvalues": list(result.eigenvalues),
        "boundary_mass": result.boundary_mass,
        "window": result.window.cutoff,
        "unitary_deviation": result.unitary_deviation,
        "flagged": result.flagged,
    }


def integrability_record(report: IntegrabilityReport) -> dict:
    return {
        "lattice": report.lattice.to_dict(),
        "dual": report.dual.to_dict(),
        "condition_number": report.lattice.condition_number,
        "theta": report.theta.to_list(),
        "dual_theta": report.dual_theta.to_list(),
        "K": report.coefficients.K.tolist(),
        "dual_K": report.dual_coefficients.K.tolist(),
        "coefficient_convention": COEFFICIENT_CONVENTION,
        "curvature": report.curvature.tolist(),
        "dual_curvature": report.dual_curvature.tolist(),
        "curvature_convention": CURVATURE_CONVENTION,
        "epsilon": report.epsilon.tolist(),
        "epsilon_residual": report.epsilon_residual,
        "epsilon_determinant": report.epsilon_determinant,
        "pairing_defect": report.pairing_defect,
        "phase_deviation": report.phase_deviation,
        "dual_phase_deviation": report.dual_phase_deviation,
        "flags": dict(report.flags),
        "passed": report.passed,
    }
