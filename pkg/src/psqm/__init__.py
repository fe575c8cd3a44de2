"""Phase-space expectation transforms for discretized quantum mechanics."""

from .coherent import coherent_state, expect_at, expect_direct
from .duality import pair, pairing_multiplier
from .grids import ComplexField, PhaseFunction, PhaseGrid, SampledLine, field_from_function
from .hilbert import OperatorMatrix, StateVector, hermite_basis, projector
from .io import FormatError, read_field, read_operator, read_state, write_field, write_operator, write_state
from .numerics import NumericalAlarm, WrapAroundWarning
from .report import VerifyReport, write_report
from .scenarios import ScenarioConfig, run_scenario
from .star import bracket, star_kernel_route, star_operator_route
from .transforms import (
    expect_kernel_route,
    expectation_inverse,
    husimi,
    weyl_quantize,
    weyl_symbol,
    wigner,
)

__version__ = "0.1.0"
