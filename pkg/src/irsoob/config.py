"""Experiment configuration: JSON schema, defaults, and validation.

A config file is a single JSON object; an empty file means "all defaults",
which reproduce the reference deployment (base stations at (0,50) and (50,0),
reflector at (1025,1025), UEs uniform in the square (950,950)-(1100,1100),
10 UEs per operator, 5000 slots). All powers in config are dB; everything
downstream of validation is linear.
"""

from __future__ import annotations

import dataclasses
import hashlib
import json
from dataclasses import dataclass, field, fields

from .channels import NodeGeometry, PathLossParams

REGIMES = ("sub6", "mmwave_los", "mmwave_nlos")
SCHEDULERS = ("rr", "pf", "mr")
OUTPUT_KINDS = ("sumse", "outage", "ccdf", "dominance", "correlation_response", "pf_gap")

GAMMA_DB_RANGE = (0.0, 200.0)  # sanity bound on transmit SNR in dB


@dataclass(frozen=True)
class ExperimentSpec:
    """Fully validated description of one simulation-plus-analytics run."""

    regime: str = "sub6"
    scheduler: str = "rr"
    geometry: NodeGeometry = field(default_factory=NodeGeometry)
    path_loss: PathLossParams = field(default_factory=PathLossParams)
    n_sweep: tuple[int, ...] = (64,)
    gamma_db_sweep: tuple[float, ...] = (130.0,)
    l1: int = 1
    l2: int = 1
    k_ues: int = 10
    q_ues: int = 10
    slots: int = 5000
    trials: int = 4
    seed: int = 0
    pf_tau: float = 1000.0
    iid_ues: bool = False
    outputs: tuple[str, ...] = ("sumse",)
    slot_budget: int = 50_000_000
    max_elements: int = 1024

    def __post_init__(self):
        object.__setattr__(self, "n_sweep", tuple(int(n) for n in self.n_sweep))
        object.__setattr__(self, "gamma_db_sweep", tuple(float(g) for g in self.gamma_db_sweep))
        object.__setattr__(self, "outputs", tuple(self.outputs))
        if self.regime not in REGIMES:
            raise ValueError(f"regime: expected one of {REGIMES}, got {self.regime!r}")
        if self.scheduler not in SCHEDULERS:
            raise ValueError(f"scheduler: expected one of {SCHEDULERS}, got {self.scheduler!r}")
        for out in self.outputs:
            if out not in OUTPUT_KINDS:
                raise ValueError(f"outputs: unknown output kind {out!r}")
        if not self.n_sweep or not self.gamma_db_sweep:
            raise ValueError("n_sweep and gamma_db_sweep must be non-empty")
        if any(n < 0 for n in self.n_sweep):
            raise ValueError(f"n_sweep: element counts must be >= 0, got {self.n_sweep}")
        if self.max_elements < 1:
            raise ValueError(f"max_elements must be >= 1, got {self.max_elements}")
        if any(n > self.max_elements for n in self.n_sweep):
            raise ValueError(
                f"n_sweep: {max(self.n_sweep)} elements exceeds max_elements "
                f"{self.max_elements}; raise max_elements to run this deliberately")
        lo, hi = GAMMA_DB_RANGE
        for g in self.gamma_db_sweep:
            if not (lo <= g <= hi):
                raise ValueError(f"gamma_db_sweep: {g} dB outside the sane range [{lo}, {hi}]")
        if self.l1 < 1 or self.l2 < 1:
            raise ValueError(f"l1 and l2 must be >= 1, got {self.l1}, {self.l2}")
        if self.k_ues < 1 or self.q_ues < 1:
            raise ValueError(f"k_ues and q_ues must be >= 1, got {self.k_ues}, {self.q_ues}")
        if self.slots < 1 or self.trials < 1:
            raise ValueError(f"slots and trials must be >= 1, got {self.slots}, {self.trials}")
        if self.slots * self.trials > self.slot_budget:
            raise ValueError(
                f"slots*trials = {self.slots * self.trials} exceeds slot_budget {self.slot_budget}")
        if self.pf_tau < 1.0:
            raise ValueError(f"pf_tau must be >= 1, got {self.pf_tau}")


def _build(cls, data: dict, path: str):
    """Construct a dataclass from a dict, rejecting unknown keys with a dotted field path."""
    known = {f.name: f for f in fields(cls)}
    kwargs = {}
    for key, value in data.items():
        where = f"{path}.{key}" if path else key
        if key not in known:
            raise ValueError(f"unknown field {where!r} in config")
        if key == "geometry":
            if not isinstance(value, dict):
                raise ValueError(f"{where}: expected an object")
            value = _build(NodeGeometry, _listify(value), where)
        elif key == "path_loss":
            if not isinstance(value, dict):
                raise ValueError(f"{where}: expected an object")
            value = _build(PathLossParams, value, where)
        kwargs[key] = value
    try:
        return cls(**kwargs)
    except (TypeError, ValueError) as err:
        prefix = f"{path}: " if path else ""
        raise ValueError(f"{prefix}{err}") from err


def _listify(geo: dict) -> dict:
    # JSON has no tuples; coordinates arrive as lists
    out = {}
    for key, value in geo.items():
        if key == "ue_region" and isinstance(value, list):
            out[key] = tuple(tuple(corner) for corner in value)
        elif isinstance(value, list):
            out[key] = tuple(value)
        else:
            out[key] = value
    return out


def load_spec(path: str) -> ExperimentSpec:
    """Read and validate a JSON config file; empty files yield the default spec."""
    with open(path, "r", encoding="utf-8") as fh:
        text = fh.read().strip()
    if not text:
        data = {}
    else:
        try:
            data = json.loads(text)
        except json.JSONDecodeError as err:
            raise ValueError(f"{path}: not valid JSON ({err})") from err
    if not isinstance(data, dict):
        raise ValueError(f"{path}: top level must be a JSON object")
    return _build(ExperimentSpec, data, "")


def spec_to_dict(spec: ExperimentSpec) -> dict:
    return dataclasses.asdict(spec)


def spec_hash(spec: ExperimentSpec) -> str:
    """Stable content hash of a spec, recorded in the run manifest."""
    canon = json.dumps(spec_to_dict(spec), sort_keys=True, default=list)
    return hashlib.sha256(canon.encode("utf-8")).hexdigest()
