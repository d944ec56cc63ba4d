"""Controlled teleportation of arbitrary two-qubit states through a chain of controllers."""
from .bellcodec import BellOutcome, Enumerate, Forced, OutcomeLedger, Sample
from .channel import ChannelVariant, WireMap, assemble_composite, make_ghz
from .netsim import efficiency_report, simulate_session
from .protocol import (
    CorrectionRule,
    TeleportTrace,
    correction_lookup,
    derive_correction_table,
    run_teleport,
    verify_all_branches,
)
from .qss import qss_run, setup_channel
from .statevec import Gate, StateVector, TwoQubitInput

__all__ = [
    "BellOutcome", "ChannelVariant", "CorrectionRule", "Enumerate", "Forced", "Gate",
    "OutcomeLedger", "Sample", "StateVector", "TeleportTrace", "TwoQubitInput", "WireMap",
    "assemble_composite", "correction_lookup", "derive_correction_table", "efficiency_report",
    "make_ghz", "qss_run", "run_teleport", "setup_channel", "simulate_session", "verify_all_branches",
]
__version__ = "0.1.0"
