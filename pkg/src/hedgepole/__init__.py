"""Hedge-algebra cart-pole control library and benchmark.

Provides a hedge-algebra controller built on recursive semantic values, a
single-input-rule-module fuzzy controller, and a discrete LQR, all driving
the same acceleration-commanded cart-pole plant, plus a harness that runs
the two benchmark experiments and reduces them to comparable metrics.
"""

from .controllers import (
    ControlOutput,
    FuzzyConfig,
    LqrConfig,
    RsHacChannel,
    RsHacConfig,
    adaptive_weights,
    fuzzy_control,
    lqr_control,
    lqr_gain,
    make_rshac_config,
    rshac_control,
    saturate,
    sirm_infer,
    solve_dare,
)
from .harness import (
    EpisodeSpec,
    ExperimentResult,
    Metrics,
    Trajectory,
    compare,
    control_effort,
    episode_metrics,
    make_controller,
    max_position_deviation,
    overshoot_percent,
    run_episode,
    run_experiment1,
    run_experiment2,
    stability_satisfied,
    transient_time,
)
from .hedge import (
    InferenceLine,
    LinguisticFrame,
    SemanticMap,
    build_inference_line,
    default_labels,
    desemantize,
    generate_sqsm,
    infer,
    msi,
    semantize,
    sie,
    sqm_size_reference,
)
from .plant import (
    CartPoleParams,
    LinearModel,
    PlantState,
    discretize,
    integrate_step,
    linearize,
    nonlinear_derivative,
)

__version__ = "0.1.0"
