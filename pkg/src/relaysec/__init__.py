"""Secrecy rates, jammer pricing game and experiments for a two-way untrusted relay."""

__version__ = "0.1.0"

from .channel import (ChannelGains, DomainError, NodePosition, SystemConfig, Topology,
                      derive_seed, path_loss_gain, sample_gains)
from .rates import PowerAllocation, RateReport, secrecy_rates
from .nojam import InfeasibleChannel, NoJamOptimum, optimize_no_jammer
from .game import GameTrace, Market, run_stackelberg, source_best_response
from .central import CentralOptimum, centralized_optimize

__all__ = [
    "ChannelGains", "DomainError", "NodePosition", "SystemConfig", "Topology", "derive_seed",
    "path_loss_gain", "sample_gains", "PowerAllocation", "RateReport", "secrecy_rates",
    "InfeasibleChannel", "NoJamOptimum", "optimize_no_jammer", "GameTrace", "Market",
    "run_stackelberg", "source_best_response", "CentralOptimum", "centralized_optimize",
]
