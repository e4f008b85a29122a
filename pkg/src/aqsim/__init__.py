"""Adversarial queueing simulator and worst-case bound toolkit."""

from .adversary import (
    InjectionEvent,
    burst_adversary,
    saturating_adversary,
    scripted_adversary,
    verify_admissible,
)
from .interval_strategy import PhaseRecord, run_interval
from .network import (
    Network,
    PacketPath,
    build_network,
    congestion_dilation,
    in_tree_network,
    line_network,
    path,
    validate_path,
)
from .sim_engine import Trace, run
from .static_routing import (
    bruteforce_optimal_makespan,
    greedy_schedule,
    lemma1_bound,
    make_instance,
    run_sweep,
)
from .strategies import DISCIPLINES, Packet, is_non_forward_looking, select

__version__ = "0.1.0"

__all__ = [
    "DISCIPLINES",
    "InjectionEvent",
    "Network",
    "Packet",
    "PacketPath",
    "PhaseRecord",
    "Trace",
    "build_network",
    "bruteforce_optimal_makespan",
    "burst_adversary",
    "congestion_dilation",
    "greedy_schedule",
    "in_tree_network",
    "is_non_forward_looking",
    "lemma1_bound",
    "line_network",
    "make_instance",
    "path",
    "run",
    "run_interval",
    "run_sweep",
    "saturating_adversary",
    "scripted_adversary",
    "select",
    "validate_path",
    "verify_admissible",
]
