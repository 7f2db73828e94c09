"""Single-qutrit teleportation over two-qutrit entangled channels.

Simulates perfect (unitary) and imperfect (non-unitary) correction,
audits printed operators against first-principles projections, and
computes entropy, negativity and negativity-based fidelity.
"""

from .errors import (
    ConfigurationError,
    ContractViolation,
    DegenerateInputError,
    DomainError,
    NumericalError,
    ShapeError,
    StructureError,
    TeleportError,
)
from .linalg import Ket
from .metrics import entropy_of_entanglement, negativity, table1
from .protocol import CorrectionMode, run_monte_carlo, run_trial
from .states import ChannelKind, Provenance, channel, leslie_state, unknown_qutrit

__version__ = "0.1.0"

__all__ = [
    "ChannelKind",
    "ConfigurationError",
    "ContractViolation",
    "CorrectionMode",
    "DegenerateInputError",
    "DomainError",
    "Ket",
    "NumericalError",
    "Provenance",
    "ShapeError",
    "StructureError",
    "TeleportError",
    "channel",
    "entropy_of_entanglement",
    "leslie_state",
    "negativity",
    "run_monte_carlo",
    "run_trial",
    "table1",
    "unknown_qutrit",
]
