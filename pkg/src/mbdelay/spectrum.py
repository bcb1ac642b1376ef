"""Frequency grids, Wi-Fi channelization scenarios, and spectral masks.

A scenario activates one or two Wi-Fi channel blocks inside a global uniform
subcarrier grid that spans the full measurement aperture. Per-tone nonnegative
weights encode occupancy, guard/null tones, and band-edge roll-off; spectral
gaps are grid tones with weight zero.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

# 802.11ax/be subcarrier spacing.
WIFI_TONE_SPACING_HZ = 78125.0

# Raised-cosine roll-off width used by the "flat-taper" preset, per band edge.
DEFAULT_TAPER_WIDTH_HZ = 2e6

_PRESETS = ("flat", "flat-taper", "toneplan-11ax")

_TONEPLAN_BLOCK_HZ = 80e6          # one tone plan covers an 80 MHz block
_TONEPLAN_LEFT_GUARDS = 12
_TONEPLAN_RIGHT_GUARDS = 11
_TONEPLAN_CENTER_NULLS = 5


class GridAlignmentError(ValueError):
    """Span or band edges do not land on the subcarrier grid."""


@dataclass(frozen=True)
class FrequencyGrid:
    """Uniform global subcarrier grid f[n] = f_start + n*delta_f."""

    f_start_hz: float
    delta_f_hz: float
    n_tones: int

    def __post_init__(self):
        if self.delta_f_hz <= 0:
            raise ValueError(f"delta_f must be positive, got {self.delta_f_hz}")
        if self.n_tones < 1:
            raise ValueError(f"n_tones must be >= 1, got {self.n_tones}")

    @property
    def f_stop_hz(self) -> float:
        return self.f_start_hz + (self.n_tones - 1) * self.delta_f_hz

    @property
    def aperture_hz(self) -> float:
        return (self.n_tones - 1) * self.delta_f_hz

    def frequencies_hz(self) -> np.ndarray:
        return self.f_start_hz + self.delta_f_hz * np.arange(self.n_tones)

    def frequencies_ghz(self) -> np.ndarray:
        # Delay math runs in GHz/ns so that f*tau products keep their value
        # while quadratic frequency sums stay O(10^2) per tone.
        return self.frequencies_hz() * 1e-9

    def index_of(self, f_hz: float) -> int:
        """Grid index of an on-grid frequency; raises if off-grid."""
        pos = (f_hz - self.f_start_hz) / self.delta_f_hz
        idx = int(round(pos))
        if abs(pos - idx) > 1e-6 * max(1.0, abs(pos)):
            raise GridAlignmentError(
                f"{f_hz} Hz is off-grid (fractional index residual {pos - idx:.3e})"
            )
        if not 0 <= idx < self.n_tones:
            raise ValueError(f"{f_hz} Hz lies outside the grid span")
        return idx


def build_grid(f_start_hz: float, f_stop_hz: float, delta_f_hz: float) -> FrequencyGrid:
    """Construct the global grid spanning [f_start, f_stop] inclusive.

    The span must be an integer multiple of delta_f (1e-6 relative
    tolerance); the number of tones is span/delta_f + 1.
    """
    if delta_f_hz <= 0:
        raise ValueError(f"delta_f must be positive, got {delta_f_hz}")
    if f_stop_hz <= f_start_hz:
        raise ValueError("f_stop must exceed f_start")
    ratio = (f_stop_hz - f_start_hz) / delta_f_hz
    steps = round(ratio)
    residual = ratio - steps
    if steps < 1 or abs(residual) > 1e-6 * ratio:
        raise GridAlignmentError(
            f"span {f_stop_hz - f_start_hz} Hz is not a multiple of "
            f"delta_f={delta_f_hz} Hz (residual {residual:+.3e} steps)"
        )
    return FrequencyGrid(f_start_hz=f_start_hz, delta_f_hz=delta_f_hz, n_tones=steps + 1)


@dataclass(frozen=True)
class Subband:
    """One occupied channel block mapped onto the global grid.

    ``tone_lo..tone_hi`` (inclusive) are the grid indices whose delta_f-wide
    subcarrier cells tile [f_lo, f_hi): the tone at f_hi itself belongs to the
    channelization boundary and carries no occupancy. Two adjacent blocks
    therefore tile their union with no shared tone.
    """

    f_lo_hz: float
    f_hi_hz: float
    tone_lo: int
    tone_hi: int

    def __post_init__(self):
        if self.f_lo_hz >= self.f_hi_hz:
            raise ValueError("subband requires f_lo < f_hi")
        if self.tone_lo > self.tone_hi:
            raise ValueError("empty subband tone range")

    @property
    def f_center_hz(self) -> float:
        return 0.5 * (self.f_lo_hz + self.f_hi_hz)

    @property
    def width_hz(self) -> float:
        return self.f_hi_hz - self.f_lo_hz

    def tone_indices(self) -> np.ndarray:
        return np.arange(self.tone_lo, self.tone_hi + 1)


@dataclass(frozen=True)
class Scenario:
    """A spectrum allocation: one or two occupied bands plus bookkeeping."""

    id: str
    bands_hz: tuple
    is_contiguous_reference: bool = False
    reference_of: str | None = None

    def __post_init__(self):
        bands = tuple((float(lo), float(hi)) for lo, hi in self.bands_hz)
        for lo, hi in bands:
            if lo >= hi:
                raise ValueError(f"band [{lo}, {hi}] is empty")
        for (_, hi_a), (lo_b, _) in zip(bands, bands[1:]):
            if lo_b < hi_a:
                raise ValueError(f"bands of {self.id} overlap or are unsorted")
        object.__setattr__(self, "bands_hz", bands)

    @property
    def f_lo_hz(self) -> float:
        return self.bands_hz[0][0]

    @property
    def f_hi_hz(self) -> float:
        return self.bands_hz[-1][1]

    @property
    def aperture_hz(self) -> float:
        return self.f_hi_hz - self.f_lo_hz

    @property
    def gap_hz(self) -> float:
        """Total unoccupied width between bands (0 for one band or adjacent bands)."""
        return sum(lo_b - hi_a for (_, hi_a), (lo_b, _) in zip(self.bands_hz, self.bands_hz[1:]))

    @property
    def occupied_hz(self) -> float:
        return sum(hi - lo for lo, hi in self.bands_hz)

    def to_dict(self) -> dict:
        return {
            "id": self.id,
            "bands_hz": [[lo, hi] for lo, hi in self.bands_hz],
            "aperture_hz": self.aperture_hz,
            "gap_hz": self.gap_hz,
            "reference_of": self.reference_of,
        }


@dataclass(frozen=True)
class MaskShaping:
    """Shaping preset descriptor: preset name plus its parameters."""

    preset: str = "flat-taper"
    edge_width_hz: float = DEFAULT_TAPER_WIDTH_HZ

    def __post_init__(self):
        if self.preset not in _PRESETS:
            raise ValueError(f"unknown shaping preset {self.preset!r}; known: {_PRESETS}")
        if self.preset == "flat-taper" and self.edge_width_hz <= 0:
            raise ValueError("flat-taper edge width must be positive")

    def label(self) -> str:
        if self.preset == "flat-taper":
            return f"flat-taper({self.edge_width_hz / 1e6:g}MHz)"
        return self.preset


@dataclass(frozen=True, eq=False)
class SpectralMask:
    """Per-tone nonnegative weights on a global grid, with subband structure."""

    grid: FrequencyGrid
    weights: np.ndarray
    subbands: tuple
    shaping: MaskShaping
    scenario_id: str = ""

    def __post_init__(self):
        w = np.asarray(self.weights, dtype=float)
        if w.shape != (self.grid.n_tones,):
            raise ValueError("weight vector length must equal the grid size")
        if np.any(w < 0):
            raise ValueError("mask weights must be nonnegative")
        w = w.copy()
        w.setflags(write=False)
        object.__setattr__(self, "weights", w)
        object.__setattr__(self, "subbands", tuple(self.subbands))

    @property
    def n_used(self) -> int:
        return int(np.count_nonzero(self.weights))


def _taper_ramp(distance_hz: np.ndarray, width_hz: float) -> np.ndarray:
    """Raised-cosine ramp: 0 at the band edge, 1 from ``width`` inward."""
    x = np.clip(distance_hz / width_hz, 0.0, 1.0)
    return 0.5 * (1.0 - np.cos(np.pi * x))


def _toneplan_block_weights() -> np.ndarray:
    """Active-tone pattern for one 80 MHz block of 1024 tones."""
    n = int(round(_TONEPLAN_BLOCK_HZ / WIFI_TONE_SPACING_HZ))
    w = np.ones(n)
    w[:_TONEPLAN_LEFT_GUARDS] = 0.0
    w[n - _TONEPLAN_RIGHT_GUARDS:] = 0.0
    center = n // 2
    half = _TONEPLAN_CENTER_NULLS // 2
    w[center - half:center + half + 1] = 0.0
    return w


def build_mask(
    scenario: Scenario,
    shaping: MaskShaping | str = "flat-taper",
    delta_f_hz: float = WIFI_TONE_SPACING_HZ,
) -> SpectralMask:
    """Build a scenario's spectral mask on its global grid.

    The grid spans [lowest band edge, highest band edge]; gap tones exist with
    weight zero. Each band occupies the tones tiling [f_lo, f_hi), so a band
    of width B carries B/delta_f occupied cells and adjacent bands never share
    a tone.

    Presets:
      flat          in-band weight 1
      flat-taper    flat top with a raised-cosine roll-off over
                    ``edge_width_hz`` at each band edge
      toneplan-11ax per 80 MHz block: 12/11 edge guards, 5 center nulls,
                    996 active tones at weight 1
    """
    if isinstance(shaping, str):
        shaping = MaskShaping(preset=shaping)
    grid = build_grid(scenario.f_lo_hz, scenario.f_hi_hz, delta_f_hz)
    weights = np.zeros(grid.n_tones)
    subbands = []
    for f_lo, f_hi in scenario.bands_hz:
        lo_idx = grid.index_of(f_lo)
        hi_idx = grid.index_of(f_hi)
        band_tones = hi_idx - lo_idx  # cells tiling [f_lo, f_hi)
        if band_tones < 1:
            raise ValueError(f"band [{f_lo}, {f_hi}] narrower than one tone")
        sb = Subband(f_lo_hz=f_lo, f_hi_hz=f_hi, tone_lo=lo_idx, tone_hi=hi_idx - 1)
        subbands.append(sb)
        f_band = grid.frequencies_hz()[lo_idx:hi_idx]
        if shaping.preset == "flat":
            weights[lo_idx:hi_idx] = 1.0
        elif shaping.preset == "flat-taper":
            d_edge = np.minimum(f_band - f_lo, f_hi - f_band)
            weights[lo_idx:hi_idx] = _taper_ramp(d_edge, shaping.edge_width_hz)
        elif shaping.preset == "toneplan-11ax":
            block = _toneplan_block_weights()
            n_blocks = (f_hi - f_lo) / _TONEPLAN_BLOCK_HZ
            if abs(n_blocks - round(n_blocks)) > 1e-9 or round(n_blocks) < 1:
                raise ValueError(
                    f"toneplan-11ax needs bands that are whole 80 MHz blocks; "
                    f"band [{f_lo}, {f_hi}] spans {n_blocks:.3f} blocks"
                )
            tiled = np.tile(block, int(round(n_blocks)))
            if tiled.size != band_tones:
                raise GridAlignmentError("tone plan does not tile the band on this grid")
            weights[lo_idx:hi_idx] = tiled
    mask = SpectralMask(
        grid=grid,
        weights=weights,
        subbands=tuple(subbands),
        shaping=shaping,
        scenario_id=scenario.id,
    )
    if mask.n_used == 0:
        raise ValueError(f"mask for {scenario.id} has no occupied tones")
    return mask


def used_set(mask: SpectralMask) -> np.ndarray:
    """Ascending grid indices of the occupied tones. Errors when empty."""
    idx = np.flatnonzero(mask.weights)
    if idx.size == 0:
        raise ValueError("degenerate mask: no occupied tones")
    return idx


def subband_centers(mask: SpectralMask):
    """Geometric band centers; center spacing only when exactly two subbands."""
    centers = [sb.f_center_hz for sb in mask.subbands]
    delta_fc = centers[1] - centers[0] if len(centers) == 2 else None
    return centers, delta_fc


def contiguous_reference(scenario: Scenario) -> Scenario:
    """Gap-free allocation spanning the same aperture.

    For an already-contiguous scenario this returns an equivalent single-band
    scenario flagged as its own reference (same bands, gap 0).
    """
    ref = Scenario(
        id=scenario.id.rstrip("*") + "*",
        bands_hz=((scenario.f_lo_hz, scenario.f_hi_hz),),
        is_contiguous_reference=True,
        reference_of=scenario.id,
    )
    return ref


def _table_scenarios() -> list:
    ghz = 1e9
    gapped = [
        ("A1", [(5.17, 5.33)]),
        ("A2", [(5.25, 5.33), (5.49, 5.57)]),
        ("A3", [(5.49, 5.57), (5.97, 6.05)]),
        ("B1", [(5.97, 6.13), (6.13, 6.29)]),
        ("B2", [(5.17, 5.33), (5.49, 5.65)]),
        ("B3", [(5.49, 5.65), (5.97, 6.13)]),
    ]
    starred = ("A2", "A3", "B2", "B3")
    out = []
    for sid, bands in gapped:
        out.append(Scenario(id=sid, bands_hz=tuple((lo * ghz, hi * ghz) for lo, hi in bands)))
    for sid in starred:
        base = next(s for s in out if s.id == sid)
        out.append(contiguous_reference(base))
    return out


def scenario_catalog() -> list:
    """The six two-group study scenarios plus the four starred contiguous references."""
    return _table_scenarios()


def get_scenario(scenario_id: str) -> Scenario:
    for s in scenario_catalog():
        if s.id == scenario_id:
            return s
    known = ", ".join(s.id for s in scenario_catalog())
    raise KeyError(f"unknown scenario id {scenario_id!r}; known: {known}")


def catalog_json(indent: int | None = 2) -> str:
    return json.dumps([s.to_dict() for s in scenario_catalog()], indent=indent)


def mask_rows(mask: SpectralMask):
    """Rows (n, f_hz, weight) for CSV export."""
    f = mask.grid.frequencies_hz()
    for n in range(mask.grid.n_tones):
        yield n, f[n], mask.weights[n]
