"""Uplink SE simulation for massive MIMO with correlated hardware distortion.

The library quantifies how the distortion generated by nonlinear
receiver hardware at a multi-antenna base station, which is correlated
across antennas whenever the number of UEs is below the number of
antennas, affects uplink spectral efficiency, and when approximating it
as uncorrelated is harmless.
"""

from .channel import ChannelRealization, ScenarioConfig, diag_of, sample_channel
from .closedform import (
    ClosedFormReport,
    closed_form_report,
    distortion_corr_coeff,
    distortion_ratio,
    lemma2_correlated,
    lemma2_uncorrelated,
    lna_signal_to_distortion,
    ue_distortion_moment,
)
from .combining import (
    CombinerSet,
    da_mmse_combiner,
    da_mr_combiner,
    make_combiner,
    mr_combiner,
)
from .errors import (
    ConfigError,
    DegenerateCombinerError,
    MimodistError,
    NotPSDError,
    NumericalError,
    ShapeError,
)
from .hardware import (
    BussgangDecomposition,
    NonlinearityModel,
    amplifier_gain_coeff,
    analytic_bussgang_third_order,
    apply_nonlinearity,
    bussgang_gain_third_order,
    clip_probability,
    distortion_covariance_third_order,
    empirical_bussgang,
)
from .harness import (
    ExperimentSpec,
    ResultRow,
    default_spec,
    parse_config,
    run_experiment,
    run_fig1,
    run_fig2,
    run_fig3,
    run_sweep,
    sample_distortion_moments,
    write_rows,
)
from .numerics import (
    RngStream,
    correlated_gaussian_sample,
    hpd_solve,
    pseudo_inverse,
    sample_standard_complex_gaussian,
)
from .se import (
    ErgodicResult,
    SinrReport,
    ergodic_se,
    evaluate_realization,
    sinr_ideal_ue,
    sinr_impaired_ue,
    sinr_optimal,
)

__version__ = "0.1.0"
