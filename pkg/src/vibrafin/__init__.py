"""vibrafin: design and simulation toolkit for vibration-motor-driven
underwater propulsion.

Models the chain from an eccentric-rotating-mass vibration motor through
rigid-flexible fin resonance and acoustic-streaming thrust to planar
three-fin locomotion, calibrated against bench and tank measurements,
with geometry optimizers and an interactive steering server.
"""

__version__ = "0.1.0"

from . import (  # noqa: F401
    calibration,
    erm_motor,
    fin_optimizer,
    locomotion,
    structural_modal,
    thrust_model,
)
