"""Closed-form performance expressions for both operators.

Everything here is a pure function of an AnalyticParams bundle describing one
operator's UE population: ergodic sum spectral efficiencies, outage
probabilities, gain-offset distributions, beam-alignment combinatorics, and
the exponential-decay bounds for the in-band side. Spectral efficiency is
bits/s/Hz (log base 2) throughout.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import integrate
from scipy.special import gammaln

from .kernels import gauss_q

_PI = math.pi


@dataclass(frozen=True)
class AnalyticParams:
    """Inputs the closed forms need for one operator.

    beta_r is the per-UE cascade loss product (feeder loss times reflector-UE
    loss) and beta_d the per-UE direct loss; tx_snr is the linear transmit
    SNR P/sigma^2. l1/l2 are the per-link path counts in the sparse-channel
    regimes (l1*l2 cascaded paths; irrelevant for the Rayleigh regime).
    """

    n_elements: int
    tx_snr: float
    beta_r: np.ndarray
    beta_d: np.ndarray
    l1: int = 1
    l2: int = 1

    def __post_init__(self):
        object.__setattr__(self, "beta_r", np.atleast_1d(np.asarray(self.beta_r, dtype=float)))
        object.__setattr__(self, "beta_d", np.atleast_1d(np.asarray(self.beta_d, dtype=float)))
        if self.beta_r.shape != self.beta_d.shape:
            raise ValueError("beta_r and beta_d must have one entry per UE")
        if np.any(self.beta_r <= 0) or np.any(self.beta_d <= 0) or self.tx_snr <= 0:
            raise ValueError("path losses and tx_snr must be positive")
        if self.n_elements < 0:
            raise ValueError(f"n_elements must be >= 0, got {self.n_elements}")

    @property
    def n_ues(self) -> int:
        return len(self.beta_r)

    @property
    def l_paths(self) -> int:
        return self.l1 * self.l2

    @property
    def l_bar(self) -> int:
        return min(self.l_paths, self.n_elements)

    @property
    def beta_tilde(self) -> np.ndarray:
        return self.beta_r / self.beta_d


def _mean_se(snr_terms) -> float:
    return float(np.mean(np.log2(1.0 + snr_terms)))


def sumse_inband_sub6(p: AnalyticParams) -> float:
    """Ergodic sum-SE upper bound for the operator that phase-aligns the reflector, Rayleigh fading.

    The coherent sum of N reflected paths gives the N^2 * (pi^2/16) * beta_r
    leading term; the linear-in-N terms collect the per-path variance and the
    direct/reflected cross term.
    """
    n, g = p.n_elements, p.tx_snr
    quad = n * n * (_PI ** 2 / 16.0) * p.beta_r
    lin = n * (p.beta_r * (1.0 - _PI ** 2 / 16.0)
               + (_PI ** 1.5 / 4.0) * np.sqrt(p.beta_d * p.beta_r))
    return _mean_se((quad + lin + p.beta_d) * g)


def sumse_oob_sub6(p: AnalyticParams) -> float:
    """Ergodic sum-SE upper bound for the oblivious operator: incoherent power pile-up, slope 1 in log2(N)."""
    return _mean_se((p.n_elements * p.beta_r + p.beta_d) * p.tx_snr)


def _mu1(p: AnalyticParams, ue: int) -> float:
    return float(p.n_elements * p.beta_r[ue] + p.beta_d[ue])


def outage_oob_sub6(rho, p: AnalyticParams, ue: int = 0):
    """P(effective OOB channel gain < rho) = 1 - exp(-rho/(N*beta_r + beta_d)); ~ rho/(N*beta_r) for small rho."""
    rho = np.asarray(rho, dtype=float)
    if np.any(rho < 0):
        raise ValueError("rho must be nonnegative")
    out = 1.0 - np.exp(-rho / _mu1(p, ue))
    return float(out) if out.ndim == 0 else out


def ccdf_offset_sub6(z, p: AnalyticParams, ue: int = 0):
    """Large-N tail probability P(gain offset > z) for an OOB UE.

    The offset is the UE's channel gain with the (randomly-configured, from
    its point of view) reflector minus the gain without it. Piecewise in z
    with beta_tilde = beta_r/beta_d:
      z < 0:  1 - exp(z/beta_d) / (N*beta_tilde + 2)
      z >= 0: (N*beta_tilde + 1)/(N*beta_tilde + 2) * exp(-z/(beta_d*(1 + N*beta_tilde)))
    """
    scalar = np.ndim(z) == 0
    z = np.atleast_1d(np.asarray(z, dtype=float))
    bt = float(p.beta_tilde[ue])
    bd = float(p.beta_d[ue])
    nbt = p.n_elements * bt
    neg = z < 0
    out = np.empty_like(z)
    out[neg] = 1.0 - np.exp(z[neg] / bd) / (nbt + 2.0)
    out[~neg] = (nbt + 1.0) / (nbt + 2.0) * np.exp(-z[~neg] / (bd * (1.0 + nbt)))
    return float(out[0]) if scalar else out


@dataclass(frozen=True)
class OffsetDistributionParams:
    """Moment and shape parameters of the OOB gain-offset law (difference of correlated exponentials)."""

    mu1: float
    mu2: float
    sigma1: float
    sigma2: float
    rho12: float
    gamma_s: float
    alpha_plus: float
    alpha_minus: float

    @classmethod
    def from_params(cls, p: AnalyticParams, ue: int = 0) -> "OffsetDistributionParams":
        mu1 = _mu1(p, ue)
        mu2 = float(p.beta_d[ue])
        rho12 = 1.0 / (1.0 + p.n_elements * float(p.beta_tilde[ue]))
        # rho12 is the power correlation; the MGF of the gain difference has
        # poles at the roots of mu1*mu2*(1-rho12)s^2 - (mu2-mu1)s - 1
        denom = mu1 * mu2 * (1.0 - rho12)
        if denom <= 0:
            raise ValueError("degenerate offset distribution: requires N >= 1 so rho12 < 1")
        gamma_s = 2.0 * math.sqrt((mu2 - mu1) ** 2 + 4.0 * mu1 * mu2 * (1.0 - rho12)) / denom
        shift = 2.0 * (mu2 - mu1) / denom
        return cls(mu1=mu1, mu2=mu2, sigma1=mu1, sigma2=mu2, rho12=rho12,
                   gamma_s=gamma_s, alpha_plus=gamma_s + shift, alpha_minus=gamma_s - shift)


def ccdf_offset_sub6_exact(z, p: AnalyticParams, ue: int = 0):
    """Finite-N tail of the gain offset, from the exact law of a difference of correlated exponentials.

    Kept separate from ccdf_offset_sub6 (the large-N limit) so the two can be
    cross-validated at small N.
    """
    d = OffsetDistributionParams.from_params(p, ue)
    scalar = np.ndim(z) == 0
    z = np.atleast_1d(np.asarray(z, dtype=float))
    denom = d.mu1 * d.mu2 * (1.0 - d.rho12) * d.gamma_s
    neg = z < 0
    out = np.empty_like(z)
    out[neg] = 1.0 - (8.0 / (denom * d.alpha_minus)) * np.exp(d.alpha_minus * z[neg] / 4.0)
    out[~neg] = (8.0 / (denom * d.alpha_plus)) * np.exp(-d.alpha_plus * z[~neg] / 4.0)
    return float(out[0]) if scalar else out


def offset_correlation(p: AnalyticParams, ue: int = 0) -> float:
    """Correlation between the with- and without-reflector gains at one UE: 1/(1 + N*beta_r/beta_d)."""
    return 1.0 / (1.0 + p.n_elements * float(p.beta_tilde[ue]))


def sumse_inband_mmwave_los(p: AnalyticParams) -> float:
    """In-band ergodic sum-SE with the aperture steered at a single cascaded path: N^2 scaling."""
    n, g = p.n_elements, p.tx_snr
    snr = (n * n * p.beta_r + n * (_PI ** 1.5 / 4.0) * np.sqrt(p.beta_d * p.beta_r)
           + p.beta_d) * g
    return _mean_se(snr)


def sumse_oob_mmwave_los(p: AnalyticParams) -> float:
    """OOB ergodic sum-SE under single-beam steering: alignment with probability l_bar/N.

    With L cascaded paths at the UE and one active beam, the beam hits a UE
    path a fraction l_bar/N of the time, contributing an (N^2/l_bar)*beta_r
    SNR term; otherwise only the direct path is left.
    """
    n, g = p.n_elements, p.tx_snr
    lb = p.l_bar
    if lb < 1:
        raise ValueError("sparse-channel SE needs n_elements >= 1 and l1*l2 >= 1")
    hit = np.log2(1.0 + ((n * n / lb) * p.beta_r + p.beta_d) * g)
    miss = np.log2(1.0 + p.beta_d * g)
    return float(np.mean((lb / n) * hit + (1.0 - lb / n) * miss))


def _exp_scaled_gamma1(a: float, b: float) -> float:
    """exp(a) * int_a^inf exp(-t - b/t) dt, computed without forming exp(a).

    Substituting t = a + s gives int_0^inf exp(-s - b/(a+s)) ds, stable for
    any a >= 0.
    """
    out = integrate.quad(lambda s: np.exp(-s - b / (a + s)), 0.0, np.inf,
                         epsabs=0.0, epsrel=1e-10, limit=200, full_output=1)
    if len(out) > 3:
        raise ArithmeticError(f"quadrature did not converge: {out[3]}")
    return out[0]


_CDF_CLAMP_TOL = 1e-9


def cdf_oob_mmwave_los(rho, p: AnalyticParams, ue: int = 0):
    """P(OOB channel gain < rho) under single-beam steering with L UE-side paths.

    Mixture of the aligned event (probability l_bar/N, double-Rayleigh
    reflected term) and the misaligned one (direct path only). Evaluated in
    an exp-scaled form so the exp(l_bar*beta_d/(N^2*beta_r)) factor never
    overflows; the result is clamped to [0, 1] after checking the residual.
    """
    br = float(p.beta_r[ue])
    bd = float(p.beta_d[ue])
    n, lb = p.n_elements, p.l_bar
    if lb < 1:
        raise ValueError("needs n_elements >= 1 and at least one cascaded path")
    a = lb * bd / (n * n * br)
    rho_arr = np.atleast_1d(np.asarray(rho, dtype=float))
    if np.any(rho_arr < 0):
        raise ValueError("rho must be nonnegative")
    direct = 1.0 - np.exp(-rho_arr / bd)
    aligned = np.array([_exp_scaled_gamma1(a, lb * r / (n * n * br)) for r in rho_arr])
    out = direct - (lb / n) * (aligned - np.exp(-rho_arr / bd))
    if np.any(out < -_CDF_CLAMP_TOL) or np.any(out > 1.0 + _CDF_CLAMP_TOL):
        raise ArithmeticError("mmWave outage CDF left [0,1] beyond the numerical tolerance")
    out = np.clip(out, 0.0, 1.0)
    return float(out[0]) if np.isscalar(rho) or np.ndim(rho) == 0 else out


def matching_paths_pmf(l_paths: int, n_elements: int, i: int) -> float:
    """P(exactly i of the L reflector beams land on the L UE path angles), angles distinct on an N-grid.

    Hypergeometric: C(L, i) * C(N - L, L - i) / C(N, L), supported on
    max(0, 2L - N) <= i <= L. Computed in log-gamma space so large N is safe.
    """
    if not (0 < l_paths < n_elements):
        raise ValueError(f"requires 0 < L < N, got L={l_paths}, N={n_elements}")
    if i != int(i):
        raise ValueError(f"i must be an integer, got {i}")
    i = int(i)
    if i < max(0, 2 * l_paths - n_elements) or i > l_paths:
        return 0.0

    def log_binom(n, k):
        return gammaln(n + 1) - gammaln(k + 1) - gammaln(n - k + 1)

    log_p = (log_binom(l_paths, i) + log_binom(n_elements - l_paths, l_paths - i)
             - log_binom(n_elements, l_paths))
    return float(np.exp(log_p))


def sumse_inband_mmwave_nlos(p: AnalyticParams) -> float:
    """In-band ergodic sum-SE with the reflector matched to all L cascaded paths."""
    n, g = p.n_elements, p.tx_snr
    snr = (n * n * p.beta_r + n * np.sqrt(_PI * p.beta_d * p.beta_r) + p.beta_d) * g
    return _mean_se(snr)


def sumse_oob_mmwave_nlos(p: AnalyticParams) -> float:
    """OOB ergodic sum-SE with an L-beam reflector: alignment count is hypergeometric.

    For L < N, i matched beams contribute i*(N^2/L^2)*beta_r of SNR; for
    L >= N every resolvable direction is lit and the incoherent N*beta_r
    form applies.
    """
    n, g = p.n_elements, p.tx_snr
    l = p.l_paths
    if n < 1:
        raise ValueError("needs n_elements >= 1")
    if l >= n:
        return _mean_se((p.beta_d + n * p.beta_r) * g)
    i = np.arange(max(0, 2 * l - n), l + 1)
    pmf = np.array([matching_paths_pmf(l, n, int(ii)) for ii in i])
    # (n_i, n_ues) grid of log terms, pmf-weighted per UE
    se = np.log2(1.0 + (p.beta_d[None, :] + i[:, None] * (n * n / l ** 2) * p.beta_r[None, :]) * g)
    return float(np.mean(pmf @ se))


def mr_asymptotic_se(q_ues: int, p: AnalyticParams, ue: int = 0) -> float:
    """Large-Q limit of the max-rate scheduler's OOB SE: log2(1 + ln(Q) * (N*beta_r + beta_d) * snr)."""
    if q_ues < 1:
        raise ValueError(f"q_ues must be >= 1, got {q_ues}")
    return float(np.log2(1.0 + math.log(q_ues) * _mu1(p, ue) * p.tx_snr))


@dataclass(frozen=True)
class DecayBoundParams:
    """Constants of the Gaussian surrogate for the in-band coherent gain sum."""

    c1: float
    c2: float
    alpha: float
    eta: float

    @classmethod
    def from_params(cls, p: AnalyticParams, ue: int = 0) -> "DecayBoundParams":
        br = float(p.beta_r[ue])
        n = p.n_elements
        return cls(c1=math.sqrt((1.0 - _PI ** 2 / 16.0) * br),
                   c2=_PI / math.sqrt(16.0 - _PI ** 2),
                   alpha=2.0 * n * (1.0 - _PI ** 2 / 16.0) * br,
                   eta=n * _PI * math.sqrt(br) / 4.0)


def inband_outage_bound(rho, p: AnalyticParams, ue: int = 0) -> float:
    """Upper bound 2*Q(c2*sqrt(N)) on the in-band outage probability; decays as O(e^-N).

    The threshold rho drops out of the large-N form (kept in the signature
    because the bound is a statement about P(gain < rho) for fixed rho).
    """
    del rho
    d = DecayBoundParams.from_params(p, ue)
    return float(2.0 * gauss_q(d.c2 * math.sqrt(p.n_elements)))


def inband_offset_ccdf_bound(rho, p: AnalyticParams, ue: int = 0):
    """Lower bound on P(in-band gain offset > rho): 1 - sqrt(bd/(bd+alpha)) * exp(rho/bd - eta^2/(bd+alpha)).

    Approaches 1 as O(e^-N); clamped at 0 where the closed form goes
    negative (far tail, where any nonnegative number is a valid lower bound).
    """
    d = DecayBoundParams.from_params(p, ue)
    bd = float(p.beta_d[ue])
    rho = np.asarray(rho, dtype=float)
    expo = np.clip(rho / bd - d.eta ** 2 / (bd + d.alpha), None, 700.0)
    out = np.clip(1.0 - math.sqrt(bd / (bd + d.alpha)) * np.exp(expo), 0.0, 1.0)
    return float(out) if out.ndim == 0 else out
