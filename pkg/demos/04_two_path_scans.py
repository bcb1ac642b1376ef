#!/usr/bin/env python3
"""Matched-filter delay scans of a two-path channel and restricted peaks.

The scan superposes two shifted copies of the single-path kernel, so gap
sidelobes from one path compete with the mainlobe of the other; restricted
peak extraction quantifies the resulting pull on each apparent delay.
"""
import numpy as np

from mbdelay import (
    TwoPathChannel,
    build_mask,
    get_scenario,
    peak_report,
    scan_observation,
    sigma_from_snr,
    two_path_scan,
)
from mbdelay.delay_response import phase_center_hz

axis = np.arange(0, 25001) * 1e-12
DELAYS = {"A": (5e-9, 15e-9), "B": (5e-9, 10e-9)}

print("noise-free restricted-peak offsets (flat-taper, +/-1 ns windows)")
print("----------------------------------------------------------------")
for sid in ("A1", "A2", "A3", "B1", "B2", "B3"):
    t1, t2 = DELAYS[sid[0]]
    mask = build_mask(get_scenario(sid), "flat-taper")
    ch = TwoPathChannel(t1, t2)
    scan = two_path_scan(mask, ch, axis)
    rep = peak_report(scan, (t1, t2))
    o1, o2 = (p.offset_s * 1e9 for p in rep.peaks)
    print(f"{sid}: tau_hat = ({rep.peaks[0].tau_hat_s * 1e9:6.3f}, "
          f"{rep.peaks[1].tau_hat_s * 1e9:6.3f}) ns, offsets ({o1:+.3f}, {o2:+.3f}) ns")

# A wider aperture sharpens the mainlobe (A3 offsets are tiny) but gap
# sidelobes can still pull peaks harder than the narrow baseline (A2 vs A1).

# The seeded noisy mode correlates an observed snapshot instead; at 20 dB the
# scan barely moves.
mask = build_mask(get_scenario("A2"), "flat-taper")
ch = TwoPathChannel(*DELAYS["A"])
sigma2 = sigma_from_snr(ch.to_params(), mask, 20.0, f_ref_hz=phase_center_hz(mask))
obs = scan_observation(mask, ch, sigma2, seed=2024)
noisy = two_path_scan(mask, ch, axis, observation=obs)
clean = two_path_scan(mask, ch, axis)
drift = np.abs(noisy.values - clean.values).max() / clean.values.max()
rep = peak_report(noisy, DELAYS["A"])
print(f"\nA2 seeded 20 dB scan: max deviation from noise-free {drift * 100:.2f}% "
      f"of peak, offsets ({rep.peaks[0].offset_s * 1e9:+.3f}, "
      f"{rep.peaks[1].offset_s * 1e9:+.3f}) ns")
