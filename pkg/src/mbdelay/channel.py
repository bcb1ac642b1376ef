"""Multipath CFR synthesis, masked observations, and noise calibration.

The channel is a sum of delayed impulses with complex gains; its frequency
response is sampled on the global grid, weighted by the spectral mask, and
observed in circularly symmetric complex Gaussian noise that is independent
across tones.
"""
from __future__ import annotations

import cmath
from dataclasses import dataclass

import numpy as np

from .spectrum import FrequencyGrid, SpectralMask, used_set

# Dominant path at unit gain; second path 0.7*exp(j*pi/3) ~ 0.35+0.6062j,
# i.e. -3 dB relative power at +60 degrees.
DEFAULT_ALPHA1 = complex(1.0, 0.0)
DEFAULT_ALPHA2 = 0.7 * cmath.exp(1j * cmath.pi / 3)


@dataclass(frozen=True, eq=False)
class PathSet:
    """L >= 1 propagation paths: complex gains and nonnegative delays (s)."""

    gains: np.ndarray
    delays_s: np.ndarray

    def __post_init__(self):
        g = np.atleast_1d(np.asarray(self.gains, dtype=complex))
        d = np.atleast_1d(np.asarray(self.delays_s, dtype=float))
        if g.shape != d.shape or g.ndim != 1 or g.size < 1:
            raise ValueError("gains and delays must be 1-D and equally sized")
        if np.any(d < 0):
            raise ValueError("path delays must be nonnegative")
        if not (np.all(np.isfinite(d)) and np.all(np.isfinite(g))):
            raise ValueError("path parameters must be finite")
        g.setflags(write=False)
        d.setflags(write=False)
        object.__setattr__(self, "gains", g)
        object.__setattr__(self, "delays_s", d)

    def __len__(self):
        return self.gains.size


@dataclass(frozen=True)
class TwoPathChannel:
    """Two-path channel; the second path arrives no earlier than the first."""

    tau1_s: float
    tau2_s: float
    alpha1: complex = DEFAULT_ALPHA1
    alpha2: complex = DEFAULT_ALPHA2

    def __post_init__(self):
        if self.tau2_s < self.tau1_s:
            raise ValueError("tau2 must be >= tau1")

    @property
    def delta_tau_s(self) -> float:
        return self.tau2_s - self.tau1_s

    def to_pathset(self) -> PathSet:
        return PathSet(gains=np.array([self.alpha1, self.alpha2]),
                       delays_s=np.array([self.tau1_s, self.tau2_s]))

    def to_params(self) -> "ParamVector":
        return ParamVector(
            tau1_s=self.tau1_s, tau2_s=self.tau2_s,
            a1_re=self.alpha1.real, a1_im=self.alpha1.imag,
            a2_re=self.alpha2.real, a2_im=self.alpha2.imag,
        )


@dataclass(frozen=True)
class ParamVector:
    """Two-path parameters in the fixed ordering (tau1, tau2, a1Re, a1Im, a2Re, a2Im)."""

    tau1_s: float
    tau2_s: float
    a1_re: float
    a1_im: float
    a2_re: float
    a2_im: float

    @property
    def alpha1(self) -> complex:
        return complex(self.a1_re, self.a1_im)

    @property
    def alpha2(self) -> complex:
        return complex(self.a2_re, self.a2_im)

    @property
    def delta_tau_s(self) -> float:
        return self.tau2_s - self.tau1_s

    def as_array(self) -> np.ndarray:
        return np.array([self.tau1_s, self.tau2_s,
                         self.a1_re, self.a1_im, self.a2_re, self.a2_im])

    def to_pathset(self) -> PathSet:
        return PathSet(gains=np.array([self.alpha1, self.alpha2]),
                       delays_s=np.array([self.tau1_s, self.tau2_s]))


@dataclass(frozen=True, eq=False)
class Observation:
    """Masked CFR snapshot: full-grid vector plus its occupied-tone stacking."""

    mask: SpectralMask
    y_full: np.ndarray
    y_stacked: np.ndarray
    sigma2: float
    seed: int | None

    def __post_init__(self):
        for name in ("y_full", "y_stacked"):
            v = np.asarray(getattr(self, name), dtype=complex)
            v.setflags(write=False)
            object.__setattr__(self, name, v)


@dataclass(frozen=True, eq=False)
class CirEstimate:
    """Inverse-DFT delay-domain taps with their sampling axis."""

    taps: np.ndarray
    grid: FrequencyGrid

    @property
    def t_axis_s(self) -> np.ndarray:
        n = self.grid.n_tones
        return np.arange(n) / (n * self.grid.delta_f_hz)

    @property
    def unambiguous_window_s(self) -> float:
        return 1.0 / self.grid.delta_f_hz


def _as_pathset(theta) -> PathSet:
    if isinstance(theta, PathSet):
        return theta
    if isinstance(theta, (ParamVector, TwoPathChannel)):
        return theta.to_pathset()
    raise TypeError(f"expected PathSet, ParamVector, or TwoPathChannel, got {type(theta)}")


def cfr(paths, grid: FrequencyGrid) -> np.ndarray:
    """H[n] = sum_l alpha_l * exp(-j*2*pi*f[n]*tau_l) on the full grid."""
    ps = _as_pathset(paths)
    f_ghz = grid.frequencies_ghz()
    tau_ns = ps.delays_s * 1e9
    # (n_tones, L) phase matrix; f*tau is unit-invariant in GHz*ns.
    phases = np.exp(-2j * np.pi * np.outer(f_ghz, tau_ns))
    return phases @ ps.gains


def mean_model(theta, mask: SpectralMask, f_ref_hz: float = 0.0) -> np.ndarray:
    """Noiseless masked CFR stacked over occupied tones in ascending order.

    ``f_ref_hz`` shifts the tone frequencies (gains then read as phases
    relative to that reference); the default is the raw grid.
    """
    ps = _as_pathset(theta)
    k = used_set(mask)
    f_ghz = (mask.grid.frequencies_hz()[k] - f_ref_hz) * 1e-9
    tau_ns = ps.delays_s * 1e9
    phases = np.exp(-2j * np.pi * np.outer(f_ghz, tau_ns))
    return mask.weights[k] * (phases @ ps.gains)


def sigma_from_snr(theta0, mask: SpectralMask, snr_db: float,
                   f_ref_hz: float = 0.0) -> float:
    """Per-tone noise variance hitting a target mean per-occupied-tone SNR.

    sigma2 = (||mu(theta0)||^2 / N_s) / 10^(snr_db/10), with the SNR defined
    as average noiseless tone power over noise variance. For multipath
    parameter points the mean power depends on the frequency reference of the
    gains; pass the grid phase center to calibrate at a baseband-referenced
    channel point.
    """
    mu = mean_model(theta0, mask, f_ref_hz)
    mean_power = float(np.mean(np.abs(mu) ** 2))
    if mean_power <= 0.0:
        raise ValueError("mean model has zero power; SNR calibration undefined")
    return mean_power / 10.0 ** (snr_db / 10.0)


def observe(theta, mask: SpectralMask, sigma2: float, seed: int | None = None) -> Observation:
    """Draw one masked observation with i.i.d. complex Gaussian tone noise.

    Noise variance is sigma2 per occupied tone (sigma2/2 on each quadrature);
    the draw is deterministic for a given seed, and sigma2 = 0 reproduces the
    noiseless mean exactly.
    """
    if sigma2 < 0:
        raise ValueError("sigma2 must be nonnegative")
    k = used_set(mask)
    mu = mean_model(theta, mask)
    if sigma2 > 0:
        rng = np.random.default_rng(seed)
        scale = np.sqrt(sigma2 / 2.0)
        noise = scale * (rng.standard_normal(k.size) + 1j * rng.standard_normal(k.size))
        y_stacked = mu + noise
    else:
        y_stacked = mu.copy()
    y_full = np.zeros(mask.grid.n_tones, dtype=complex)
    y_full[k] = y_stacked
    return Observation(mask=mask, y_full=y_full, y_stacked=y_stacked,
                       sigma2=float(sigma2), seed=seed)


def measured_snr(noiseless: np.ndarray, noisy: np.ndarray) -> float:
    """Empirical mean-power to noise-variance ratio of a paired draw."""
    signal_power = float(np.mean(np.abs(noiseless) ** 2))
    noise_power = float(np.mean(np.abs(noisy - noiseless) ** 2))
    return signal_power / noise_power


def observation_rows(obs: Observation):
    """Rows (n, f_hz, re, im) over the full grid for CSV export."""
    f = obs.mask.grid.frequencies_hz()
    for n in range(obs.mask.grid.n_tones):
        yield n, f[n], obs.y_full[n].real, obs.y_full[n].imag


def cir_idft(y_full: np.ndarray, grid: FrequencyGrid) -> CirEstimate:
    """N_f-point inverse DFT of a full-grid vector onto t[p] = p/(N_f*delta_f)."""
    y = np.asarray(y_full, dtype=complex)
    if y.shape != (grid.n_tones,):
        raise ValueError("vector length must equal the grid size")
    return CirEstimate(taps=np.fft.ifft(y), grid=grid)
