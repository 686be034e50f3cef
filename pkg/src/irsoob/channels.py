"""Deployment geometry, path loss, and random channel generation.

Two operators share the band's propagation environment: the in-band operator
controls the reflector, the out-of-band (OOB) operator does not. Each has its
own base station; user terminals are dropped uniformly in a rectangle. All
small-scale fading is redrawn per time slot while positions (and therefore
path losses) stay fixed for a trial batch.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .kernels import db_to_linear, principal_sine_wrap, resolvable_angles, steering_vector

LINK_CLASSES = ("bs_irs", "irs_ue", "direct")


@dataclass(frozen=True)
class NodeGeometry:
    """Planar coordinates (meters) of the two base stations, the reflector, and the UE drop region."""

    bs_inband: tuple[float, float] = (0.0, 50.0)
    bs_oob: tuple[float, float] = (50.0, 0.0)
    irs: tuple[float, float] = (1025.0, 1025.0)
    ue_region: tuple[tuple[float, float], tuple[float, float]] = ((950.0, 950.0), (1100.0, 1100.0))

    def __post_init__(self):
        (x0, y0), (x1, y1) = self.ue_region
        if not (x1 > x0 and y1 > y0):
            raise ValueError(f"ue_region corners must be ordered, got {self.ue_region}")


@dataclass(frozen=True)
class PathLossParams:
    """Distance-power law beta = 10^(c0_db/10) * (d0/d)^alpha, one exponent per link class."""

    c0_db: float = -30.0
    d0: float = 1.0
    alpha_bs_irs: float = 2.0
    alpha_irs_ue: float = 2.0
    alpha_direct: float = 4.5

    def __post_init__(self):
        if self.c0_db >= 0:
            raise ValueError(f"c0_db must be negative, got {self.c0_db}")
        if self.d0 <= 0:
            raise ValueError(f"d0 must be positive, got {self.d0}")
        for name in ("alpha_bs_irs", "alpha_irs_ue", "alpha_direct"):
            if getattr(self, name) < 2.0:
                raise ValueError(f"{name} must be >= 2, got {getattr(self, name)}")

    def exponent(self, link_class: str) -> float:
        if link_class not in LINK_CLASSES:
            raise ValueError(f"unknown link class {link_class!r}, expected one of {LINK_CLASSES}")
        return {"bs_irs": self.alpha_bs_irs,
                "irs_ue": self.alpha_irs_ue,
                "direct": self.alpha_direct}[link_class]


def path_loss(params: PathLossParams, distance: float, link_class: str) -> float:
    """Linear power gain of one link; rejects distances inside the reference distance d0."""
    if distance < params.d0:
        raise ValueError(f"distance {distance} is below the reference distance {params.d0}")
    alpha = params.exponent(link_class)
    return float(db_to_linear(params.c0_db) * (params.d0 / distance) ** alpha)


def _dist(a, b) -> float:
    return float(np.hypot(a[0] - b[0], a[1] - b[1]))


def draw_ue_positions(rng: np.random.Generator, geometry: NodeGeometry, count: int,
                      d0: float = 1.0) -> np.ndarray:
    """Uniform UE drop over the rectangle, resampling any UE that lands within d0 of a node.

    The reflector sits inside the drop region, so a UE can in principle land
    closer than the path-loss reference distance; those draws are rejected to
    keep every link distance valid.
    """
    (x0, y0), (x1, y1) = geometry.ue_region
    nodes = np.array([geometry.bs_inband, geometry.bs_oob, geometry.irs])
    pos = np.empty((count, 2))
    filled = 0
    while filled < count:
        cand = rng.uniform([x0, y0], [x1, y1], size=(count - filled, 2))
        ok = np.all(np.hypot(cand[:, None, 0] - nodes[None, :, 0],
                             cand[:, None, 1] - nodes[None, :, 1]) > d0, axis=1)
        kept = cand[ok]
        pos[filled:filled + len(kept)] = kept
        filled += len(kept)
    return pos


@dataclass(frozen=True)
class LinkBudget:
    """Per-UE linear path losses for one operator: reflector feeder, reflector-UE, and direct links."""

    beta_f: float
    beta_g: np.ndarray
    beta_d: np.ndarray

    @property
    def beta_r(self) -> np.ndarray:
        """Cascade loss product beta_f * beta_g, one value per UE."""
        return self.beta_f * self.beta_g

    @property
    def n_ues(self) -> int:
        return len(self.beta_g)


def link_budget(geometry: NodeGeometry, params: PathLossParams, bs: tuple[float, float],
                ue_positions: np.ndarray) -> LinkBudget:
    """Path losses from one base station to each UE, directly and through the reflector."""
    beta_f = path_loss(params, _dist(bs, geometry.irs), "bs_irs")
    beta_g = np.array([path_loss(params, _dist(geometry.irs, ue), "irs_ue")
                       for ue in ue_positions])
    beta_d = np.array([path_loss(params, _dist(bs, ue), "direct") for ue in ue_positions])
    return LinkBudget(beta_f=beta_f, beta_g=beta_g, beta_d=beta_d)


def complex_normal(rng: np.random.Generator, variance, size) -> np.ndarray:
    """Zero-mean circularly-symmetric complex Gaussian draws with the given variance."""
    scale = np.sqrt(np.asarray(variance, dtype=float) / 2.0)
    return scale * (rng.standard_normal(size) + 1j * rng.standard_normal(size))


@dataclass
class Sub6Channels:
    """One Rayleigh-fading realization for one operator and its UEs.

    Shapes without a slot axis: h_d (n_ues,), f (n,), g (n_ues, n). With
    slots=S, a leading S axis is prepended to every array.
    """

    h_d: np.ndarray
    f: np.ndarray
    g: np.ndarray


def sample_sub6(rng: np.random.Generator, n_elements: int, budget: LinkBudget,
                slots: int | None = None) -> Sub6Channels:
    """I.i.d. Rayleigh draws: each entry CN(0, beta) with beta from the link budget.

    E|f_n|^2 = beta_f and E|f_n| = sqrt(pi*beta_f/4), the moments the sum-SE
    formulas are built on.
    """
    if n_elements < 0:
        raise ValueError(f"n_elements must be >= 0, got {n_elements}")
    q = budget.n_ues
    lead = () if slots is None else (slots,)
    h_d = complex_normal(rng, budget.beta_d, lead + (q,))
    f = complex_normal(rng, budget.beta_f, lead + (n_elements,))
    g = complex_normal(rng, budget.beta_g[:, None], lead + (q, n_elements))
    return Sub6Channels(h_d=h_d, f=f, g=g)


@dataclass
class MmwaveChannels:
    """Sparse multipath realization for one operator and its UEs.

    Angles sit on the resolvable grid and stay fixed across slots; complex
    gains are redrawn per slot. The cascade combines every (feeder path i,
    UE path j) pair: angle wrap(phi_i + psi_j), gain gamma1_i * gamma2_j,
    giving L = l1 * l2 entries ordered with j fastest.

    Gain shapes without a slot axis: bs_gains (l1,), ue_gains (n_ues, l2),
    cascade_gains (n_ues, L), h_d (n_ues,). With slots=S a leading S axis is
    prepended to the gain arrays; the angle arrays never carry a slot axis.
    """

    l1: int
    l2: int
    bs_angles: np.ndarray
    ue_angles: np.ndarray
    bs_gains: np.ndarray
    ue_gains: np.ndarray
    cascade_angles: np.ndarray
    cascade_gains: np.ndarray
    h_d: np.ndarray

    @property
    def l_paths(self) -> int:
        return self.l1 * self.l2


def _draw_grid_angles(rng: np.random.Generator, n_elements: int, count: int) -> np.ndarray:
    # Distinct directions whenever the grid is large enough; otherwise collisions
    # are unavoidable and duplicate paths are merged downstream.
    grid = resolvable_angles(n_elements)
    replace = count > n_elements
    return grid[rng.choice(n_elements, size=count, replace=replace)]


def sample_mmwave(rng: np.random.Generator, n_elements: int, l1: int, l2: int,
                  budget: LinkBudget, slots: int | None = None) -> MmwaveChannels:
    """Sparse-multipath draw with on-grid angles fixed per UE and per-slot gains.

    Requires even n_elements: sums of two grid angles wrap back onto the grid
    only when N is even, and the cascade representation relies on that closure.
    """
    if n_elements < 2 or n_elements % 2:
        raise ValueError(f"n_elements must be even and >= 2, got {n_elements}")
    if l1 < 1 or l2 < 1:
        raise ValueError(f"path counts must be >= 1, got l1={l1}, l2={l2}")
    q = budget.n_ues
    lead = () if slots is None else (slots,)

    bs_angles = _draw_grid_angles(rng, n_elements, l1)
    ue_angles = np.stack([_draw_grid_angles(rng, n_elements, l2) for _ in range(q)])

    # per-path variances: feeder paths carry beta_f, UE-side paths beta_g
    bs_gains = complex_normal(rng, budget.beta_f, lead + (l1,))
    ue_gains = complex_normal(rng, budget.beta_g[:, None], lead + (q, l2))
    h_d = complex_normal(rng, budget.beta_d, lead + (q,))

    cascade_angles = principal_sine_wrap(
        bs_angles[:, None] + ue_angles[:, None, :]).reshape(q, l1 * l2)
    if slots is None:
        cascade_gains = (bs_gains[:, None] * ue_gains[:, None, :]).reshape(q, l1 * l2)
    else:
        cascade_gains = (bs_gains[:, None, :, None]
                         * ue_gains[:, :, None, :]).reshape(slots, q, l1 * l2)
    return MmwaveChannels(l1=l1, l2=l2, bs_angles=bs_angles, ue_angles=ue_angles,
                          bs_gains=bs_gains, ue_gains=ue_gains,
                          cascade_angles=cascade_angles, cascade_gains=cascade_gains,
                          h_d=h_d)


def mmwave_vector(n_elements: int, angles: np.ndarray, gains: np.ndarray) -> np.ndarray:
    """Reassemble the length-N channel vector sqrt(N/L) * sum_i gains_i * conj(steering(angles_i)).

    Used to check the sparse representation against its dense form; the
    simulation itself works in the sparse (angle, gain) domain.
    """
    l_paths = len(angles)
    vec = np.zeros(n_elements, dtype=complex)
    for ang, gain in zip(angles, gains):
        vec += gain * np.conj(steering_vector(n_elements, ang))
    return np.sqrt(n_elements / l_paths) * vec
