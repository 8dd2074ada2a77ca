"""Adiabatic fidelity bounds for driven quantum many-body systems.

The driven Rice-Mele chain is simulated exactly through its momentum-mode
factorization; small chains can also be evolved by brute force in the full
Hilbert space. On top of the simulations sit bounds on the distance between
the adiabatic fidelity and the orthogonality catastrophe, the fidelity bands
they imply, and the scaling of the adiabatic breakdown with system size.
"""

__version__ = "0.1.0"

from .bounds import (BoundKind, Trace, area_ratios, band, build_trace, g_of,
                     lemma_s2_check, verify_inequality_chain)
from .errors import (AdiaboundError, ConfigError, DomainError, GapClosure, NoConvergence,
                     NumericalError)
from .evolution import IntegratorConfig, evolve_dense, evolve_many_body
from .model import DenseModel, DriveProtocol, ModelParams, c_n, delta_v_closed, oc_exact
from .scaling import M_IMPROVED, max_driving_rate, mean_free_path

__all__ = [
    "AdiaboundError", "BoundKind", "ConfigError", "DenseModel", "DomainError",
    "DriveProtocol", "GapClosure", "IntegratorConfig", "M_IMPROVED", "ModelParams",
    "NoConvergence", "NumericalError", "Trace", "area_ratios", "band", "build_trace",
    "c_n", "delta_v_closed", "evolve_dense", "evolve_many_body", "g_of",
    "lemma_s2_check", "max_driving_rate", "mean_free_path", "oc_exact",
    "verify_inequality_chain",
]
