"""accelflow: accelerated optimization dynamics in continuous and discrete time.

The package has four math layers and a harness:

- core: points, objective oracles, mirror maps, scaling triples
- flows: variational ODE systems, integration, energy certificates, dilation
- taylorstep: the regularized Taylor-step operator and its certificates
- accel: discrete methods (plain, naive, rate-matching, restarted)
- harness: experiment configs, CSV/JSON emission, CLI, acceptance suite
"""

from . import accel, core, flows, harness, taylorstep
from .errors import (
    CapabilityError,
    DivergenceError,
    InputError,
    NumericalError,
    SolverError,
)

__version__ = "0.1.0"

__all__ = [
    "CapabilityError",
    "DivergenceError",
    "InputError",
    "NumericalError",
    "SolverError",
    "accel",
    "core",
    "flows",
    "harness",
    "taylorstep",
    "__version__",
]
