"""Numerical equilibrium engine for the two-period bailout game with
adverse selection and bailout stigma."""

from .benchmark import (
    LaissezFaireOutcome,
    MarketPrimitives,
    RegimeOutcome,
    full_freeze_delayed,
    laissez_faire,
    one_period_bailout,
    secret_bailout,
)
from .delayed import (
    DelayedEquilibrium,
    EquilibriumClass,
    classify,
    ds_candidate,
    ds_exists_sufficient,
    ds_solve,
    gamma,
)
from .dist import TypeDistribution, from_table, from_table_file, lower_mean, trunc_mean, uniform, validate
from .errors import ConfigError, ConsistencyError, DomainError, NumericError
from .shortlived import (
    ShortLivedEquilibrium,
    sl_boundary,
    sl_candidate,
    sl_existence_bound,
    sl_nodev_check,
    sl_solve,
)
from .welfare import DirectMechanism, WelfareReport, match_volume_secret, mechanism_from, welfare_of

__all__ = [name for name in dir() if not name.startswith("_")]
__version__ = "0.1.0"
