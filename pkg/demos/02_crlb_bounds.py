#!/usr/bin/env python3
"""Delay-separation CRLBs: aperture gain, gap penalty, and the SNR law.

The bound comes from the 6x6 Fisher information over (tau1, tau2, Re/Im of
both gains), reduced by a Schur complement onto the delay pair.
"""
import numpy as np

from mbdelay import (
    TwoPathChannel,
    crlb_delta_tau,
    get_scenario,
    build_mask,
    sigma_from_snr,
    sweep_delta_tau,
    sweep_snr,
)
from mbdelay.crlb import grid_phase_center_hz

theta = TwoPathChannel(5e-9, 15e-9).to_params()

print("sqrt CRLB of the delay separation at 20 dB, (tau1, tau2) = (5, 15) ns")
print("---------------------------------------------------------------------")
for sid in ("A1", "A2", "A3", "B1", "B2", "B3"):
    mask = build_mask(get_scenario(sid), "flat-taper")
    sigma2 = sigma_from_snr(theta, mask, 20.0, f_ref_hz=grid_phase_center_hz(mask))
    r = crlb_delta_tau(theta, mask, sigma2)
    print(f"{sid}: {r.sqrt_crlb_ns * 1e3:7.2f} ps   "
          f"(cond I_alpha {r.cond_i_alpha:8.1f}, cond I_eff {r.cond_i_eff:8.1f})")

# Larger aperture helps even though the gapped allocations use the same
# number of occupied tones as their contiguous baselines.
print("\ngapped vs aperture-matched contiguous reference, dtau = 1 ns, 20 dB")
for sid in ("A2", "A3", "B2", "B3"):
    res = sweep_snr(get_scenario(sid), 1e-9, np.array([20.0]))
    by_id = {r.scenario_id: r.sqrt_crlb_ns for r in res}
    penalty = by_id[sid] / by_id[sid + "*"]
    print(f"{sid}: gapped/reference = {penalty:.2f}x")

# The bound scales exactly with noise: one decade of SNR is a factor 10.
mask = build_mask(get_scenario("A2"), "flat-taper")
f_ref = grid_phase_center_hz(mask)
for snr in (0.0, 20.0, 40.0):
    sigma2 = sigma_from_snr(theta, mask, snr, f_ref_hz=f_ref)
    r = crlb_delta_tau(theta, mask, sigma2)
    print(f"A2 at {snr:5.1f} dB: sqrt bound {r.sqrt_crlb_ns * 1e3:9.3f} ps")

# Sweeping the separation exposes the coupling oscillations of gapped masks.
grid = np.linspace(1e-9, 20e-9, 200)
res = sweep_delta_tau(get_scenario("A2"), 20.0, grid, include_reference=True)
gap = np.array([r.sqrt_crlb_ns for r in res if r.scenario_id == "A2"])
ref = np.array([r.sqrt_crlb_ns for r in res if r.scenario_id == "A2*"])
print("\nA2 bound vs separation (20 dB): ripple band "
      f"{gap.min() * 1e3:.1f}..{gap.max() * 1e3:.1f} ps; "
      f"reference stays smooth {ref.min() * 1e3:.1f}..{ref.max() * 1e3:.1f} ps")
print(f"beyond 10 ns the two agree within "
      f"{np.abs(gap[grid > 10e-9] / ref[grid > 10e-9] - 1).max() * 100:.0f}%")
