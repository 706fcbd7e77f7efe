"""Simulation and analytics for the nonclassical total probability formula.

A statistical ensemble of two-valued (a, c) systems is measured first for a
(which replaces c by cbar or chat depending on the a-outcome) and then for c.
The measured conditional frequencies no longer decompose the c-marginal
classically; the leftover is the interference term gamma_j, which this
package computes in closed form and recovers from simulated frequencies.
"""

from .ensemble import Ensemble, SeedSpec, SystemRecord, gen_iid, gen_pairwise_xor, iter_iid, iter_pairwise_xor
from .errors import (
    ConfigError,
    CtxProbError,
    DegenerateA,
    EmptyInput,
    InvalidModel,
    MissingTilde,
    RangeError,
    UndefinedRate,
    ZeroDenominator,
)
from .estimators import (
    Accumulator,
    FrequencyCounts,
    accumulate,
    cond_freq,
    cond_rate,
    decomposition,
    gamma_hat,
    p_c_hat,
    trace,
)
from .interference import (
    InterferenceReport,
    classical_design,
    gamma_analytic,
    lambda_theta,
    perturbation_interval,
    regime_equivalences,
    tpf_eval,
    two_slit_prob,
)
from .measurement import (
    FaultSchedule,
    MeasuredEnsemble,
    apply_chain,
    apply_mc_only,
    no_fault_schedule,
    square_fault_schedule,
)
from .prob_core import ConditionalLaw, ModelSpec, TwoPointLaw, marginal_c, validate

__version__ = "0.1.0"
