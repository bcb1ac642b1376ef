"""Multiband Wi-Fi spectrum modeling, delay-separation CRLBs, and
gap-induced delay-domain sidelobe analysis."""

from .spectrum import (
    WIFI_TONE_SPACING_HZ,
    FrequencyGrid,
    MaskShaping,
    Scenario,
    SpectralMask,
    Subband,
    build_grid,
    build_mask,
    contiguous_reference,
    get_scenario,
    scenario_catalog,
    subband_centers,
    used_set,
)
from .channel import (
    DEFAULT_ALPHA1,
    DEFAULT_ALPHA2,
    CirEstimate,
    Observation,
    ParamVector,
    PathSet,
    TwoPathChannel,
    cfr,
    cir_idft,
    mean_model,
    measured_snr,
    observe,
    sigma_from_snr,
)
from .crlb import (
    CrlbResult,
    DerivativeSet,
    FimMatrix,
    NumericalError,
    crlb_delta_tau,
    derivative_vectors,
    effective_fim,
    fim_closed_form,
    fim_gram,
    sweep_delta_tau,
    sweep_snr,
)
from .delay_response import (
    DelayScan,
    LeakageCurve,
    PeakEstimate,
    PeakReport,
    SubbandResponse,
    default_tau_axis,
    leakage,
    peak_report,
    predicted_minima,
    restricted_peak,
    scan_observation,
    single_path_response,
    subband_decomposition,
    two_path_scan,
)

__version__ = "0.1.0"
