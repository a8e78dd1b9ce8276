"""Causal and smoothed estimates for a continuously monitored qubit."""

from .algebra import IDENTITY, SIGMA_X, SIGMA_Y, SIGMA_Z, InvalidState, Observable, QubitState, expectation, rabi_unitary
from .config import ConfigError, ScenarioConfig, load_config
from .dual import DualModel, DualRecord, dual_comparison, dual_forward_pass, ignorant_estimates, omniscient_estimates, sweep_ratio
from .ensemble import DualEnsembleResult, EnsembleResult, run_dual_ensemble, run_ensemble, trajectory_rng
from .measurement import (
    DegenerateUpdate,
    MeasurementModel,
    make_kraus,
    povm_element,
    predictive_moments,
    predictive_pdf,
    sample_readout,
    update_state,
)
from .metrics import ComparisonResult, compare, log_hypothesis_ratio, mse, relative_mse
from .smoother import (
    AnomalousOverlap,
    BidirectionalPoint,
    EstimateSeries,
    second_order_term,
    smooth_series,
    smoothed_estimate,
    smoothed_moments,
    smoothed_pdf,
    weak_value,
)
from .trajectory import EffectSeries, EffectUnderflow, TrajectoryRecord, backward_pass, forward_pass, refilter

__version__ = "0.1.0"
