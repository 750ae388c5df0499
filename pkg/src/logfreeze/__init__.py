"""logfreeze: freezing transitions and extreme values of log-correlated landscapes."""

__version__ = "0.1.0"

from .ensembles import (  # noqa: F401
    FieldGrid,
    PhaseVector,
    RemSample,
    Seed,
    log_charpoly_grid,
    partition_function,
    sample_circular_rem,
    sample_cue_phases,
    sample_fourier_field,
)
from .theory import MomentSpec, TheoryCurve, freezing_curve, g_beta  # noqa: F401
from .zeta import CriticalPoint, WindowRecord, zeta_half_line  # noqa: F401
