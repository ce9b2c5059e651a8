"""Block-Markov wiretap coding simulator at desk scale."""
from .config import SimConfig, SimReport, canonical_json, config_hash, rates_below_bounds
from .estimate import estimate_error, estimate_leakage, otp_leakage, trial_errors

__all__ = ["SimConfig", "SimReport", "canonical_json", "config_hash", "rates_below_bounds",
           "estimate_error", "estimate_leakage", "otp_leakage", "trial_errors"]
