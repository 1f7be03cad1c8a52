"""Entangled-OAM interferometry for supersensitive angular-displacement
measurement: exact creation-operator propagation through a beam-splitter /
Dove-prism interferometer, post-selected coincidence fringes, angular
sensitivity, and an independent permanent-based cross-check.
"""

from .estimators import AngularSensitivityEstimator, CoincidenceFringe
from .metrology import SensitivityReport, baselines, ideal_noon_fringe, uncertainty_curve
from .operator_algebra import (
    Arm,
    FockStateVector,
    ModeId,
    OperatorPolynomial,
    Sign,
    apply_to_vacuum,
    norm_squared,
    poly_add,
    poly_mul,
)
from .optical_elements import (
    DoveAngle,
    ModeTransform,
    beam_splitter,
    compose_interferometer,
    dove_prism,
    mirror_pair,
    operator_relations,
)
from .propagation import DetectionPattern, FringeSample, fringe_scan, postselect_probability, propagate
from .spdc_source import OamDistribution, four_photon_state, mixed_l_two_photon, two_photon_state

__version__ = "0.1.0"

__all__ = [
    "AngularSensitivityEstimator",
    "Arm",
    "CoincidenceFringe",
    "DetectionPattern",
    "DoveAngle",
    "FockStateVector",
    "FringeSample",
    "ModeId",
    "ModeTransform",
    "OamDistribution",
    "OperatorPolynomial",
    "SensitivityReport",
    "Sign",
    "apply_to_vacuum",
    "baselines",
    "beam_splitter",
    "compose_interferometer",
    "dove_prism",
    "four_photon_state",
    "fringe_scan",
    "ideal_noon_fringe",
    "mirror_pair",
    "mixed_l_two_photon",
    "norm_squared",
    "operator_relations",
    "poly_add",
    "poly_mul",
    "postselect_probability",
    "propagate",
    "two_photon_state",
    "uncertainty_curve",
]
