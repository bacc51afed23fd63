"""Discrete-event simulator of multi-tenant network slicing with a hierarchical
learned resource manager (global admission control + per-slice adaptation)."""

from .config import ExperimentConfig
from .engine import Engine, EventKind, RngStreams, sample_exponential
from .topology import Topology, generate_ba_topology, place_vnfs
from .traffic import SliceType, Tenant, default_tenants, generate_flow_trace, generate_request_trace

__all__ = [
    "Engine", "EventKind", "RngStreams", "sample_exponential",
    "Topology", "generate_ba_topology", "place_vnfs",
    "SliceType", "Tenant", "default_tenants", "generate_flow_trace",
    "generate_request_trace", "ExperimentConfig",
]

__version__ = "0.1.0"
