"""Simulation and closed-form analysis of a reconfigurable reflector shared by two operators.

One operator controls the reflector and serves its UEs through it; a second
operator on another carrier has no say in the configuration but its channels
pass through the same surface. The package provides the channel samplers,
reflector configuration rules, slot-level simulation engine, matching
closed-form rate/outage/distribution expressions, and figure-style experiment
presets with a small CLI (`irsoob`).

Subpackage map:
    kernels      array-response and special-function primitives
    channels     geometry, path loss, Rayleigh and sparse channel samplers
    irs          reflector phase-configuration rules and response probes
    analytics    closed-form SE, outage, and distribution expressions
    engine       Monte Carlo trials, schedulers, empirical distributions
    experiments  presets, CSV emission, run manifests
    cli          argparse entry point
"""

__version__ = "0.1.0"

from .analytics import AnalyticParams
from .channels import LinkBudget, NodeGeometry, PathLossParams
from .config import ExperimentSpec, load_spec

__all__ = [
    "AnalyticParams",
    "ExperimentSpec",
    "LinkBudget",
    "NodeGeometry",
    "PathLossParams",
    "load_spec",
    "__version__",
]
