"""Blind source-count estimation from noisy linear mixtures.

The package estimates how many non-Gaussian sources are present in noisy
linear sensor mixtures by scoring, for every hypothesized count, the
dependence (squared distance correlation) between the sources separated
under that hypothesis and the extra source appearing under the next one.
Classic eigenvalue-based detectors (MDL, SORTE, a Tracy-Widom sequential
test) are included as baselines, together with a reproducible Monte-Carlo
benchmark harness and a CLI.
"""

__version__ = "0.1.0"

from . import dcor
from .estimators import (
    EigenSpectrum,
    OrderEstimate,
    SdcCurve,
    covariance_spectrum,
    mdl_estimate,
    rmt_estimate,
    sdc_curve,
    sdc_estimate,
    sorte_estimate,
)
from .ica import RankDeficiencyError, SeparationResult, separate
from .simkit import ScenarioConfig, SweepResult, run_sweep

__all__ = [
    "__version__",
    "dcor",
    "EigenSpectrum",
    "OrderEstimate",
    "SdcCurve",
    "covariance_spectrum",
    "mdl_estimate",
    "rmt_estimate",
    "sdc_curve",
    "sdc_estimate",
    "sorte_estimate",
    "RankDeficiencyError",
    "SeparationResult",
    "separate",
    "ScenarioConfig",
    "SweepResult",
    "run_sweep",
]
