#!/usr/bin/env python3
"""Walk through the scenario catalog and the spectral-mask presets.

Each scenario activates one or two Wi-Fi channel blocks on a common 78.125 kHz
subcarrier grid spanning the full aperture; gap tones exist with weight zero.
"""
import numpy as np

from mbdelay import build_mask, get_scenario, scenario_catalog, subband_centers, used_set

print("catalog")
print("-------")
for s in scenario_catalog():
    bands = ", ".join(f"[{lo / 1e9:.2f},{hi / 1e9:.2f}] GHz" for lo, hi in s.bands_hz)
    tag = f" (reference of {s.reference_of})" if s.is_contiguous_reference else ""
    print(f"{s.id:4s} {bands:34s} aperture {s.aperture_hz / 1e6:4.0f} MHz, "
          f"gap {s.gap_hz / 1e6:4.0f} MHz{tag}")

# A2 is the canonical gapped case: two 80 MHz channels, 160 MHz apart.
a2 = get_scenario("A2")
for preset in ("flat", "flat-taper", "toneplan-11ax"):
    mask = build_mask(a2, preset)
    k = used_set(mask)
    centers, dfc = subband_centers(mask)
    print(f"\nA2 with {preset}: {mask.grid.n_tones} grid tones, {k.size} occupied")
    print(f"  subband centers {[f'{c / 1e9:.2f} GHz' for c in centers]}, "
          f"center spacing {dfc / 1e6:.0f} MHz")
    w = mask.weights
    print(f"  weight stats: max {w.max():.3f}, occupied mean {w[k].mean():.3f}")

# The per-tone weights are what every later quantity consumes; a quick look
# at the taper edge shows the raised-cosine roll-off.
mask = build_mask(a2, "flat-taper")
sb = mask.subbands[0]
edge = mask.weights[sb.tone_lo:sb.tone_lo + 30]
print("\nfirst 30 weights of the lower band (flat-taper):")
print(np.array2string(edge, precision=3, max_line_width=78))
