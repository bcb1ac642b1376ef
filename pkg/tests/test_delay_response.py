import numpy as np
import pytest

from mbdelay.channel import TwoPathChannel, sigma_from_snr
from mbdelay.crlb import sweep_delta_tau
from mbdelay.delay_response import (
    DelayScan,
    _phase_poly_sum,
    leakage,
    local_maxima,
    local_minima,
    median_extrema_spacing_s,
    peak_report,
    phase_center_hz,
    predicted_minima,
    restricted_peak,
    scan_observation,
    single_path_response,
    subband_decomposition,
    two_path_scan,
)
from mbdelay.spectrum import build_mask, get_scenario, used_set

PAPER_CHANNEL = TwoPathChannel(5e-9, 15e-9)


def axis(start_ns, stop_ns, step_ns=0.001):
    n = int(round((stop_ns - start_ns) / step_ns))
    return (start_ns + step_ns * np.arange(n + 1)) * 1e-9


class TestPhaseSumEngine:
    def test_against_direct_sum(self):
        rng = np.random.default_rng(0)
        coeffs = rng.standard_normal(400) + 1j * rng.standard_normal(400)
        f0, df = -0.16, 78.125e-6  # GHz
        for tau_ns in (np.linspace(-5, 40, 777), rng.uniform(0, 50, 300)):
            got = _phase_poly_sum(coeffs, f0, df, tau_ns)
            f = f0 + df * np.arange(coeffs.size)
            want = np.exp(-2j * np.pi * np.outer(tau_ns, f)) @ coeffs
            scale = np.abs(want).max()
            assert np.abs(got - want).max() / scale < 1e-12

    def test_production_path_matches_direct(self):
        mask = build_mask(get_scenario("A2"), "flat-taper")
        tau = axis(0, 30, 0.01)
        g = single_path_response(mask, tau, normalized=False)
        k = used_set(mask)
        f_bb = (mask.grid.frequencies_hz()[k] - phase_center_hz(mask)) * 1e-9
        direct = np.exp(-2j * np.pi * np.outer(tau * 1e9, f_bb)) @ (mask.weights[k] ** 2)
        assert np.abs(g.complex_values - direct).max() / np.abs(direct).max() < 1e-11


class TestSinglePathResponse:
    def test_unit_at_zero(self):
        mask = build_mask(get_scenario("A2"), "flat-taper")
        g = single_path_response(mask, axis(0, 10, 0.01))
        assert g.values[0] == pytest.approx(1.0, abs=1e-12)

    def test_even_magnitude(self):
        mask = build_mask(get_scenario("B2"), "flat")
        tau = axis(-20, 20, 0.01)
        g = single_path_response(mask, tau)
        assert np.allclose(g.values, g.values[::-1], rtol=0, atol=1e-12)

    def test_first_null_a1(self):
        mask = build_mask(get_scenario("A1"), "flat")
        tau = axis(0, 10)
        g = single_path_response(mask, tau)
        first = local_minima(g.values)[0]
        assert abs(tau[first] - 6.25e-9) <= 1.0001e-12

    def test_first_null_b1(self):
        mask = build_mask(get_scenario("B1"), "flat")
        tau = axis(0, 5)
        g = single_path_response(mask, tau)
        first = local_minima(g.values)[0]
        assert abs(tau[first] - 3.125e-9) <= 1.0001e-12


class TestSubbandDecomposition:
    def test_recombination_identity(self):
        for preset in ("flat", "flat-taper"):
            mask = build_mask(get_scenario("A2"), preset)
            tau = axis(0, 50, 0.01)
            direct = single_path_response(mask, tau).complex_values
            sb = subband_decomposition(mask, tau)
            dev = np.abs(sb.recombined() - direct).max() / np.abs(direct).max()
            assert dev < 1e-10, preset

    def test_normalization_at_zero(self):
        mask = build_mask(get_scenario("B3"), "flat-taper")
        sb = subband_decomposition(mask, np.array([0.0]))
        assert (sb.g1[0] + sb.g2[0]).real == pytest.approx(1.0, abs=1e-12)

    def test_equal_subbands_have_equal_envelopes(self):
        mask = build_mask(get_scenario("A2"), "flat")
        sb = subband_decomposition(mask, axis(0, 30, 0.05))
        assert np.allclose(np.abs(sb.g1), np.abs(sb.g2), rtol=0, atol=1e-12)

    def test_requires_two_subbands(self):
        mask = build_mask(get_scenario("A1"), "flat")
        with pytest.raises(ValueError, match="exactly 2"):
            subband_decomposition(mask, axis(0, 10, 0.1))


class TestPredictedMinima:
    def test_a2_gap_minima(self):
        out = predicted_minima(240e6, 80e6, m_max=5)
        assert np.allclose(out["gap_minima_s"] * 1e9,
                           [2.0833333, 6.25, 10.4166667, 14.5833333, 18.75],
                           rtol=1e-6)

    def test_a2_envelope_minima(self):
        out = predicted_minima(240e6, 80e6, m_max=2)
        assert np.allclose(out["envelope_minima_s"] * 1e9, [12.5, 25.0], rtol=1e-12)

    def test_one_ghz_spacing(self):
        out = predicted_minima(1e9, 100e6, m_max=1)
        assert out["gap_minima_s"][0] == pytest.approx(0.5e-9, rel=1e-12)

    def test_validation(self):
        with pytest.raises(ValueError):
            predicted_minima(0.0, 80e6)


class TestTwoPathScan:
    def test_single_path_reduction(self):
        mask = build_mask(get_scenario("A3"), "flat-taper")
        ch = TwoPathChannel(7e-9, 20e-9, alpha1=1.0, alpha2=0.0)
        tau = axis(0, 30)
        scan = two_path_scan(mask, ch, tau)
        peak = tau[int(np.argmax(scan.values))]
        assert abs(peak - 7e-9) <= 1.0001e-12

    def test_direct_correlation_oracle(self):
        # independent evaluation: explicit tone sum of the noiseless snapshot
        mask = build_mask(get_scenario("B3"), "flat-taper")
        tau = axis(2, 18, 0.01)
        scan = two_path_scan(mask, PAPER_CHANNEL, tau)
        k = used_set(mask)
        f_bb = (mask.grid.frequencies_hz()[k] - phase_center_hz(mask)) * 1e-9
        w = mask.weights[k] ** 2
        t = (PAPER_CHANNEL.alpha1
             * (np.exp(-2j * np.pi * np.outer(tau * 1e9 - 5.0, f_bb)) @ w)
             + PAPER_CHANNEL.alpha2
             * (np.exp(-2j * np.pi * np.outer(tau * 1e9 - 15.0, f_bb)) @ w))
        assert np.abs(scan.values - np.abs(t)).max() / np.abs(t).max() < 1e-10

    def test_observation_mode_matches_noise_free(self):
        mask = build_mask(get_scenario("A2"), "flat-taper")
        tau = axis(0, 25, 0.005)
        nf = two_path_scan(mask, PAPER_CHANNEL, tau)
        obs = scan_observation(mask, PAPER_CHANNEL, 0.0)
        om = two_path_scan(mask, PAPER_CHANNEL, tau, observation=obs)
        assert np.abs(nf.values - om.values).max() / nf.values.max() < 1e-10

    def test_noisy_observation_reproducible(self):
        mask = build_mask(get_scenario("A2"), "flat-taper")
        sigma2 = sigma_from_snr(PAPER_CHANNEL.to_params(), mask, 20.0,
                                f_ref_hz=phase_center_hz(mask))
        a = scan_observation(mask, PAPER_CHANNEL, sigma2, seed=77)
        b = scan_observation(mask, PAPER_CHANNEL, sigma2, seed=77)
        assert np.array_equal(a.y_stacked, b.y_stacked)

    def test_b1_resolves_paper_geometry(self):
        # (5, 10) ns exceeds the 3.13 ns width of the 320 MHz baseline
        mask = build_mask(get_scenario("B1"), "flat-taper")
        ch = TwoPathChannel(5e-9, 10e-9)
        tau = axis(0, 20)
        scan = two_path_scan(mask, ch, tau)
        peaks = tau[local_maxima(scan.values, 0.05 * scan.values.max())]
        assert np.abs(peaks - 5e-9).min() < 0.3e-9
        assert np.abs(peaks - 10e-9).min() < 0.3e-9

    def test_mask_mismatch_rejected(self):
        m1 = build_mask(get_scenario("A2"), "flat-taper")
        m2 = build_mask(get_scenario("A3"), "flat-taper")
        obs = scan_observation(m2, PAPER_CHANNEL, 0.0)
        with pytest.raises(ValueError, match="different mask"):
            two_path_scan(m1, PAPER_CHANNEL, axis(0, 20, 0.01), observation=obs)


class TestRestrictedPeak:
    def test_clean_mainlobe_offset_below_grid_step(self):
        mask = build_mask(get_scenario("A1"), "flat")
        ch = TwoPathChannel(8e-9, 30e-9, alpha1=1.0, alpha2=0.0)
        tau = axis(0, 40)
        scan = two_path_scan(mask, ch, tau)
        est = restricted_peak(scan, 8e-9, window_s=1e-9)
        assert abs(est.offset_s) < 1e-12
        assert est.refined

    def test_window_must_cover_five_steps(self):
        scan = DelayScan(tau_s=axis(0, 10, 0.1), values=np.ones(101),
                         normalized=False)
        with pytest.raises(ValueError, match="5 grid steps"):
            restricted_peak(scan, 5e-9, window_s=0.2e-9)

    def test_window_touching_boundary(self):
        mask = build_mask(get_scenario("A1"), "flat")
        scan = single_path_response(mask, axis(0, 10, 0.01))
        with pytest.raises(ValueError, match="boundary"):
            restricted_peak(scan, 0.2e-9, window_s=1e-9)

    def test_overlapping_windows_warn_and_proceed(self):
        mask = build_mask(get_scenario("B1"), "flat-taper")
        ch = TwoPathChannel(5e-9, 10e-9)
        scan = two_path_scan(mask, ch, axis(0, 20, 0.01))
        with pytest.warns(UserWarning, match="overlap"):
            rep = peak_report(scan, (5e-9, 10e-9), window_s=3e-9)
        assert len(rep.peaks) == 2

    def test_report_round_trip(self):
        mask = build_mask(get_scenario("A3"), "flat-taper")
        scan = two_path_scan(mask, PAPER_CHANNEL, axis(0, 25, 0.001))
        rep = peak_report(scan, (5e-9, 15e-9))
        d = rep.to_dict()
        assert set(d) == {"id", "tau_hat_1_ns", "d_tau_1_ns", "tau_hat_2_ns", "d_tau_2_ns"}
        assert d["id"] == "A3"


class TestLeakage:
    def test_unity_at_zero_and_bounded(self):
        for sid in ("A1", "A2", "A3", "B1", "B2", "B3"):
            mask = build_mask(get_scenario(sid), "flat-taper")
            lk = leakage(mask, axis(0, 50, 0.005))
            assert lk.level[0] == pytest.approx(1.0, abs=1e-12)
            assert lk.level.max() <= 1.0 + 1e-9, sid

    def test_a2_minima_near_predictions(self):
        mask = build_mask(get_scenario("A2"), "flat")
        tau = axis(0, 22)
        lk = leakage(mask, tau)
        mins = tau[local_minima(lk.level)] * 1e9
        for target in (2.0833, 6.25, 10.4167, 14.5833, 18.75):
            nearest = mins[np.argmin(np.abs(mins - target))]
            assert abs(nearest - target) / target < 0.05, target

    def test_minima_spacing_tracks_center_separation(self):
        # measured below the first per-subband envelope null 1/b_sb, where the
        # inter-subband modulation alone sets the null comb
        for sid, dfc_hz, bsb_hz in (("A2", 240e6, 80e6), ("A3", 480e6, 80e6),
                                    ("B2", 320e6, 160e6), ("B3", 480e6, 160e6)):
            mask = build_mask(get_scenario(sid), "flat")
            tau = axis(0, 0.95 / bsb_hz * 1e9, 0.002)
            lk = leakage(mask, tau)
            spacing = median_extrema_spacing_s(tau, lk.level, kind="min")
            assert abs(spacing - 1 / dfc_hz) / (1 / dfc_hz) < 0.10, sid

    def test_negative_axis_rejected(self):
        mask = build_mask(get_scenario("A2"), "flat")
        with pytest.raises(ValueError):
            leakage(mask, np.array([-1e-9, 0.0]))


@pytest.mark.xfail(
    strict=True,
    reason="The separation bound at the fixed default channel point, validated "
    "against maximum-likelihood Monte Carlo, mixes oscillation periods "
    "1/delta_fc and 2/delta_fc; its largest local maxima do not all align "
    "with leakage maxima (on A2 the dominant maximum sits near a leakage "
    "null). Kept as the originally stated property for the record.")
def test_leakage_crlb_linkage_as_stated():
    mask = build_mask(get_scenario("A2"), "flat-taper")
    grid = axis(1, 20, 0.02)
    res = sweep_delta_tau(get_scenario("A2"), 20.0, grid, include_reference=False)
    vals = np.array([r.sqrt_crlb_ns for r in res])
    from scipy.signal import find_peaks

    pk, props = find_peaks(vals, prominence=1e-3 * (vals.max() - vals.min()))
    order = np.argsort(props["prominences"])[::-1][:3]
    top = grid[pk[order]]
    lk = leakage(mask, grid)
    lk_max = grid[local_maxima(lk.level)]
    for t in top:
        assert np.abs(lk_max - t).min() < 0.5e-9


class TestDelayScanInvariants:
    def test_nonuniform_axis_rejected(self):
        tau = np.array([0.0, 1e-12, 3e-12])
        with pytest.raises(ValueError, match="uniform"):
            DelayScan(tau_s=tau, values=np.zeros(3), normalized=False)

    def test_normalized_bound_enforced(self):
        tau = axis(0, 1, 0.1)
        with pytest.raises(ValueError, match="exceeds 1"):
            DelayScan(tau_s=tau, values=np.full(tau.size, 1.5), normalized=True)

    def test_negative_values_rejected(self):
        tau = axis(0, 1, 0.1)
        with pytest.raises(ValueError):
            DelayScan(tau_s=tau, values=np.full(tau.size, -0.1), normalized=False)
