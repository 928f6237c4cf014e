"""qchaos: a numerical laboratory for quantum-chaotic spin maps.

Subsystems: spin algebra and phase-space tools (spin), kicked-top maps
(kicked_top), kicked coupled-tops and dynamical entanglement (coupled_tops),
random states and matrix ensembles (ensembles), continuous-measurement
tomography (tomography), discord and protocol yields (discord), and a
config-driven CLI (cli).
"""

__version__ = "0.1.0"

from .exceptions import DomainError, NumericError

__all__ = ["DomainError", "NumericError", "__version__"]
