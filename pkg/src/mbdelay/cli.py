"""Command-line front end: scenario catalog, masks, CRLB sweeps, delay scans,
leakage joins, and the full reproduction run.

Every command is deterministic given its configuration (including the seed);
CSV output uses 17 significant digits with LF line endings, and the only
nondeterministic output line (a timestamp comment) is suppressed by
``--no-meta``. Exit codes: 0 success, 2 usage or validation error,
3 numerical failure.
"""
from __future__ import annotations

import argparse
import json
import os
import sys
import warnings
from dataclasses import dataclass, fields, replace
from datetime import datetime, timezone
from pathlib import Path

import numpy as np

from . import __version__
from .channel import (
    DEFAULT_ALPHA1,
    DEFAULT_ALPHA2,
    TwoPathChannel,
    observation_rows,
    sigma_from_snr,
)
from .crlb import (
    DEFAULT_DTAU_GRID_S,
    DEFAULT_SNR_GRID_DB,
    NumericalError,
    sweep_delta_tau,
    sweep_snr,
)
from .delay_response import (
    leakage,
    peak_report,
    phase_center_hz,
    scan_observation,
    single_path_response,
    subband_decomposition,
    two_path_scan,
)
from .spectrum import (
    GridAlignmentError,
    MaskShaping,
    build_mask,
    contiguous_reference,
    get_scenario,
    mask_rows,
    scenario_catalog,
)

ENV_OUT_DIR = "MBDELAY_OUTDIR"

GROUPS = {"A": ("A1", "A2", "A3"), "B": ("B1", "B2", "B3"),
          "all": ("A1", "A2", "A3", "B1", "B2", "B3")}

# Paper-style two-path geometries: group A probes 10 ns separation, group B 5 ns.
GROUP_DELAYS_NS = {"A": (5.0, 15.0), "B": (5.0, 10.0)}


@dataclass(frozen=True)
class RunConfig:
    """Fully serializable run description; flags override config-file fields."""

    scenario_ids: tuple = GROUPS["all"]
    include_references: bool = True
    preset: str = "flat-taper"
    edge_width_mhz: float = 2.0
    tau1_ns: float = 5.0
    tau2_ns: float | None = None  # group default when unset
    alpha1_re: float = DEFAULT_ALPHA1.real
    alpha1_im: float = DEFAULT_ALPHA1.imag
    alpha2_re: float = DEFAULT_ALPHA2.real
    alpha2_im: float = DEFAULT_ALPHA2.imag
    snr_db: float = 20.0
    snr_grid_db: tuple = tuple(DEFAULT_SNR_GRID_DB)
    dtau_ns: float = 1.0
    dtau_grid_ns: tuple = tuple(DEFAULT_DTAU_GRID_S * 1e9)
    tau_start_ns: float = 0.0
    tau_stop_ns: float = 50.0
    tau_step_ns: float = 0.001
    peak_window_ns: float = 1.0
    noise_free: bool = True
    seed: int = 12345
    out_dir: str = ""
    no_meta: bool = False
    workers: int = 1

    def shaping(self) -> MaskShaping:
        return MaskShaping(preset=self.preset, edge_width_hz=self.edge_width_mhz * 1e6)

    def channel_for(self, scenario_id: str) -> TwoPathChannel:
        tau2 = self.tau2_ns
        if tau2 is None:
            tau2 = GROUP_DELAYS_NS.get(scenario_id[:1], (self.tau1_ns, self.tau1_ns + 10.0))[1]
        return TwoPathChannel(
            tau1_s=self.tau1_ns * 1e-9, tau2_s=tau2 * 1e-9,
            alpha1=complex(self.alpha1_re, self.alpha1_im),
            alpha2=complex(self.alpha2_re, self.alpha2_im),
        )

    def tau_axis_s(self) -> np.ndarray:
        n = int(round((self.tau_stop_ns - self.tau_start_ns) / self.tau_step_ns))
        if n < 1:
            raise ValueError("empty delay axis")
        return (self.tau_start_ns + self.tau_step_ns * np.arange(n + 1)) * 1e-9

    def resolved_out_dir(self) -> Path:
        if self.out_dir:
            return Path(self.out_dir)
        return Path(os.environ.get(ENV_OUT_DIR, "mbdelay-out"))

    def to_dict(self) -> dict:
        out = {}
        for f in fields(self):
            v = getattr(self, f.name)
            out[f.name] = list(v) if isinstance(v, tuple) else v
        return out


def _config_from_sources(args: argparse.Namespace) -> RunConfig:
    cfg = RunConfig()
    if getattr(args, "config", None):
        with open(args.config) as fh:
            data = json.load(fh)
        unknown = set(data) - {f.name for f in fields(RunConfig)}
        if unknown:
            raise ValueError(f"unknown config fields: {sorted(unknown)}")
        data = {k: tuple(v) if isinstance(v, list) else v for k, v in data.items()}
        cfg = replace(cfg, **data)
    overrides = {}
    for f in fields(RunConfig):
        if f.name == "no_meta":  # flag only ever forces True, below
            continue
        v = getattr(args, f.name, None)
        if v is not None:
            overrides[f.name] = tuple(v) if isinstance(v, list) else v
    if getattr(args, "scenario", None):
        overrides["scenario_ids"] = tuple(args.scenario)
    elif getattr(args, "group", None):
        overrides["scenario_ids"] = GROUPS[args.group]
    if getattr(args, "snr", None) is not None:
        overrides["snr_db"] = args.snr
    if getattr(args, "dtau", None) is not None:
        overrides["dtau_ns"] = _parse_ns(args.dtau)
    if getattr(args, "no_meta", False):
        overrides["no_meta"] = True
    if getattr(args, "noisy", False):
        overrides["noise_free"] = False
    return replace(cfg, **overrides)


def _parse_ns(text) -> float:
    """Accept plain numbers (ns) or values suffixed ns/us/ps/s."""
    if isinstance(text, (int, float)):
        return float(text)
    t = text.strip().lower()
    for suffix, scale in (("ns", 1.0), ("ps", 1e-3), ("us", 1e3), ("s", 1e9)):
        if t.endswith(suffix):
            return float(t[: -len(suffix)]) * scale
    return float(t)


def _fmt(x) -> str:
    return "%.17g" % float(x)


def _safe_name(scenario_id: str) -> str:
    return scenario_id.replace("*", "star")


def _selected_variants(cfg: RunConfig):
    """Selected scenarios, each followed by its contiguous reference when gapped."""
    variants = []
    for sid in cfg.scenario_ids:
        s = get_scenario(sid)  # raises KeyError naming the id
        variants.append(s)
        if cfg.include_references and s.gap_hz > 0 and not s.is_contiguous_reference:
            variants.append(contiguous_reference(s))
    return variants


def _write_csv(path: Path, columns, rows, meta: dict, cfg: RunConfig):
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="\n") as fh:
        for key, value in meta.items():
            fh.write(f"# {key}: {value}\n")
        if not cfg.no_meta:
            fh.write(f"# generated: {datetime.now(timezone.utc).isoformat()}\n")
        fh.write(",".join(columns) + "\n")
        for row in rows:
            fh.write(",".join(_fmt(x) for x in row) + "\n")


def _write_json(path: Path, payload):
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="\n") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")


def _channel_meta(cfg: RunConfig, scenario_id: str) -> dict:
    ch = cfg.channel_for(scenario_id)
    meta = {
        "scenario": scenario_id,
        "preset": cfg.shaping().label(),
        "tau1_ns": ch.tau1_s * 1e9,
        "tau2_ns": ch.tau2_s * 1e9,
        "alpha1": f"{ch.alpha1.real:.12g}{ch.alpha1.imag:+.12g}j",
        "alpha2": f"{ch.alpha2.real:.12g}{ch.alpha2.imag:+.12g}j",
    }
    return meta


def cmd_scenarios(args) -> int:
    cfg = _config_from_sources(args)
    catalog = scenario_catalog()
    if getattr(args, "filter", None):
        wanted = set(args.filter)
        known = {s.id for s in catalog}
        missing = wanted - known
        if missing:
            raise KeyError(f"unknown scenario id(s): {sorted(missing)}")
        catalog = [s for s in catalog if s.id in wanted]
    if args.json:
        print(json.dumps([s.to_dict() for s in catalog], indent=2))
    else:
        print(f"{'id':5s} {'bands [GHz]':28s} {'aperture [MHz]':>14s} "
              f"{'gap [MHz]':>10s} {'reference of':>12s}")
        for s in catalog:
            bands = ",".join(f"[{lo / 1e9:g},{hi / 1e9:g}]" for lo, hi in s.bands_hz)
            print(f"{s.id:5s} {bands:28s} {s.aperture_hz / 1e6:14.0f} "
                  f"{s.gap_hz / 1e6:10.0f} {s.reference_of or '-':>12s}")
    if args.out:
        _write_json(Path(args.out), [s.to_dict() for s in catalog])
    return 0


def cmd_mask(args) -> int:
    cfg = _config_from_sources(args)
    out_dir = cfg.resolved_out_dir()
    for variant in _selected_variants(cfg):
        mask = build_mask(variant, cfg.shaping())
        meta = {"scenario": variant.id, "preset": cfg.shaping().label(),
                "delta_f_hz": mask.grid.delta_f_hz, "n_used": mask.n_used}
        if variant.reference_of:
            meta["reference_of"] = variant.reference_of
        path = out_dir / f"mask_{_safe_name(variant.id)}.csv"
        _write_csv(path, ("n", "f_hz", "weight"), mask_rows(mask), meta, cfg)
        print(path)
    return 0


def _crlb_rows(results, x_key):
    for r in results:
        x = r.snr_db if x_key == "snr_db" else r.delta_tau_s * 1e9
        yield (x, r.sqrt_crlb_ns, r.cond_i_alpha, r.cond_i_eff)


def cmd_crlb(args) -> int:
    cfg = _config_from_sources(args)
    out_dir = cfg.resolved_out_dir()
    sweep = args.sweep
    theta_alpha = dict(alpha1=complex(cfg.alpha1_re, cfg.alpha1_im),
                       alpha2=complex(cfg.alpha2_re, cfg.alpha2_im))
    written = []
    for sid in cfg.scenario_ids:
        scenario = get_scenario(sid)
        if sweep == "snr":
            results = sweep_snr(
                scenario, cfg.dtau_ns * 1e-9, np.asarray(cfg.snr_grid_db),
                shaping=cfg.shaping(), tau1_s=cfg.tau1_ns * 1e-9,
                include_reference=cfg.include_references, workers=cfg.workers,
                **theta_alpha,
            )
            x_key, x_col = "snr_db", "snr_db"
            tag = f"dtau{cfg.dtau_ns:g}ns"
        else:
            results = sweep_delta_tau(
                scenario, cfg.snr_db, np.asarray(cfg.dtau_grid_ns) * 1e-9,
                shaping=cfg.shaping(), tau1_s=cfg.tau1_ns * 1e-9,
                include_reference=cfg.include_references, workers=cfg.workers,
                **theta_alpha,
            )
            x_key, x_col = "dtau_ns", "dtau_ns"
            tag = f"snr{cfg.snr_db:g}dB"
        by_variant = {}
        for r in results:
            by_variant.setdefault(r.scenario_id, []).append(r)
        for vid, rows in by_variant.items():
            meta = {"scenario": vid, "preset": cfg.shaping().label(), "sweep": sweep,
                    "tau1_ns": cfg.tau1_ns,
                    "alpha2": f"{cfg.alpha2_re:.12g}{cfg.alpha2_im:+.12g}j"}
            if vid.endswith("*"):
                meta["reference_of"] = vid.rstrip("*")
            if sweep == "snr":
                meta["dtau_ns"] = cfg.dtau_ns
            else:
                meta["snr_db"] = cfg.snr_db
            path = out_dir / f"crlb_{sweep}_{_safe_name(vid)}_{tag}.csv"
            _write_csv(path, (x_col, "sqrt_crlb_ns", "cond_i_alpha", "cond_i_eff"),
                       _crlb_rows(rows, x_key), meta, cfg)
            written.append(path)
            print(path)
    if not written:
        raise ValueError("no scenarios selected")
    return 0


def cmd_response(args) -> int:
    cfg = _config_from_sources(args)
    out_dir = cfg.resolved_out_dir()
    axis = cfg.tau_axis_s()
    for variant in _selected_variants(cfg):
        mask = build_mask(variant, cfg.shaping())
        scan = single_path_response(mask, axis, normalized=True)
        meta = {"scenario": variant.id, "preset": cfg.shaping().label(),
                "normalized": True}
        if variant.reference_of:
            meta["reference_of"] = variant.reference_of
        if args.check_recombination and len(mask.subbands) == 2:
            sb = subband_decomposition(mask, axis)
            dev = np.abs(sb.recombined() - scan.complex_values).max()
            meta["recombination_max_dev"] = _fmt(dev)
            print(f"{variant.id}: recombination max deviation {dev:.3e}")
        path = out_dir / f"response_{_safe_name(variant.id)}.csv"
        _write_csv(path, ("tau_ns", "value"),
                   zip(scan.tau_s * 1e9, scan.values), meta, cfg)
        print(path)
    return 0


def cmd_scan(args) -> int:
    cfg = _config_from_sources(args)
    out_dir = cfg.resolved_out_dir()
    axis = cfg.tau_axis_s()
    reports = []
    for sid in cfg.scenario_ids:
        scenario = get_scenario(sid)
        mask = build_mask(scenario, cfg.shaping())
        ch = cfg.channel_for(sid)
        if cfg.noise_free:
            sigma2 = 0.0
            scan = two_path_scan(mask, ch, axis)
        else:
            sigma2 = sigma_from_snr(ch.to_params(), mask, cfg.snr_db,
                                    f_ref_hz=phase_center_hz(mask))
            obs = scan_observation(mask, ch, sigma2, seed=cfg.seed)
            scan = two_path_scan(mask, ch, axis, observation=obs)
        with warnings.catch_warnings(record=True) as caught:
            warnings.simplefilter("always")
            report = peak_report(scan, (ch.tau1_s, ch.tau2_s),
                                 window_s=cfg.peak_window_ns * 1e-9)
        for w in caught:
            print(f"warning: {w.message}", file=sys.stderr)
        reports.append(report.to_dict())
        meta = _channel_meta(cfg, sid)
        meta["sigma2"] = sigma2
        if getattr(args, "export_observation", False):
            obs = (scan_observation(mask, ch, sigma2, seed=cfg.seed)
                   if not cfg.noise_free else scan_observation(mask, ch, 0.0))
            obs_path = out_dir / f"observation_{_safe_name(sid)}.csv"
            _write_csv(obs_path, ("n", "f_hz", "re", "im"),
                       observation_rows(obs), dict(meta), cfg)
            print(obs_path)
        if not cfg.noise_free:
            meta["snr_db"] = cfg.snr_db
            meta["seed"] = cfg.seed
        path = out_dir / f"scan_{_safe_name(sid)}.csv"
        _write_csv(path, ("tau_ns", "value"),
                   zip(scan.tau_s * 1e9, scan.values), meta, cfg)
        print(path)
    _write_json(out_dir / "peaks.json", reports)
    print(out_dir / "peaks.json")
    return 0


def cmd_table2(args) -> int:
    cfg = _config_from_sources(args)
    out_dir = cfg.resolved_out_dir()
    axis = cfg.tau_axis_s()
    rows = []
    for sid in GROUPS["all"]:
        mask = build_mask(get_scenario(sid), cfg.shaping())
        ch = cfg.channel_for(sid)
        scan = two_path_scan(mask, ch, axis)
        report = peak_report(scan, (ch.tau1_s, ch.tau2_s),
                             window_s=cfg.peak_window_ns * 1e-9)
        rows.append(report.to_dict())
    _write_json(out_dir / "table2.json", rows)
    print(f"{'id':4s} {'tau_hat_1':>10s} {'d_tau_1':>9s} {'tau_hat_2':>10s} {'d_tau_2':>9s}  [ns]")
    for row in rows:
        print(f"{row['id']:4s} {row['tau_hat_1_ns']:10.3f} {row['d_tau_1_ns']:+9.3f} "
              f"{row['tau_hat_2_ns']:10.3f} {row['d_tau_2_ns']:+9.3f}")
    print(out_dir / "table2.json")
    return 0


def cmd_leakage(args) -> int:
    cfg = _config_from_sources(args)
    out_dir = cfg.resolved_out_dir()
    dtau_s = np.asarray(cfg.dtau_grid_ns) * 1e-9
    theta_alpha = dict(alpha1=complex(cfg.alpha1_re, cfg.alpha1_im),
                       alpha2=complex(cfg.alpha2_re, cfg.alpha2_im))
    for sid in cfg.scenario_ids:
        scenario = get_scenario(sid)
        for variant in ([scenario, contiguous_reference(scenario)]
                        if cfg.include_references and scenario.gap_hz > 0 else [scenario]):
            mask = build_mask(variant, cfg.shaping())
            results = sweep_delta_tau(
                variant, cfg.snr_db, dtau_s, shaping=cfg.shaping(),
                tau1_s=cfg.tau1_ns * 1e-9, include_reference=False,
                workers=cfg.workers, **theta_alpha,
            )
            lk = leakage(mask, dtau_s)
            meta = {"scenario": variant.id, "preset": cfg.shaping().label(),
                    "snr_db": cfg.snr_db, "tau1_ns": cfg.tau1_ns}
            if variant.reference_of:
                meta["reference_of"] = variant.reference_of
            rows = ((r.delta_tau_s * 1e9, r.sqrt_crlb_ns, lv)
                    for r, lv in zip(results, lk.level))
            path = out_dir / f"leakage_{_safe_name(variant.id)}.csv"
            _write_csv(path, ("dtau_ns", "sqrt_crlb_ns", "leakage"), rows, meta, cfg)
            print(path)
    return 0


def cmd_reproduce_all(args) -> int:
    cfg = _config_from_sources(args)
    out_dir = cfg.resolved_out_dir()
    out_dir.mkdir(parents=True, exist_ok=True)
    _write_json(out_dir / "config.json", cfg.to_dict())
    _write_json(out_dir / "scenarios.json", [s.to_dict() for s in scenario_catalog()])

    # masks for every variant
    cmd_mask(_ns_with(args, out_dir=str(out_dir / "masks")))
    # bound versus SNR at the two paper separations, per group
    for group in ("A", "B"):
        for dtau_ns in (1.0, 10.0):
            sub = _ns_with(args, out_dir=str(out_dir / "crlb_snr"), group=group,
                           sweep="snr", dtau=dtau_ns)
            cmd_crlb(sub)
    # bound versus separation at the working SNR
    cmd_crlb(_ns_with(args, out_dir=str(out_dir / "crlb_dtau"), group="all",
                      sweep="dtau"))
    # single-path responses, two-path scans, restricted peaks, leakage joins
    cmd_response(_ns_with(args, out_dir=str(out_dir / "response"),
                          check_recombination=True))
    cmd_scan(_ns_with(args, out_dir=str(out_dir / "scan")))
    cmd_table2(_ns_with(args, out_dir=str(out_dir)))
    cmd_leakage(_ns_with(args, out_dir=str(out_dir / "leakage")))
    print(out_dir)
    return 0


def _ns_with(args, **kw) -> argparse.Namespace:
    ns = argparse.Namespace(**vars(args))
    for key, value in kw.items():
        setattr(ns, key, value)
    return ns


def _add_common(p: argparse.ArgumentParser):
    p.add_argument("--config", help="JSON config file; flags override its fields")
    p.add_argument("--scenario", action="append",
                   help="scenario id (repeatable); overrides --group")
    p.add_argument("--group", choices=sorted(GROUPS), help="scenario group")
    p.add_argument("--preset", choices=("flat", "flat-taper", "toneplan-11ax"))
    p.add_argument("--edge-width-mhz", type=float, dest="edge_width_mhz")
    p.add_argument("--no-references", action="store_false", dest="include_references",
                   default=None)
    p.add_argument("--out-dir", dest="out_dir",
                   help=f"output directory (default ${ENV_OUT_DIR} or ./mbdelay-out)")
    p.add_argument("--no-meta", action="store_true", default=False,
                   help="suppress the timestamp comment line in CSV output")
    p.add_argument("--seed", type=int)
    p.add_argument("--workers", type=int)
    p.add_argument("--tau1-ns", type=float, dest="tau1_ns")
    p.add_argument("--tau2-ns", type=float, dest="tau2_ns")
    p.add_argument("--alpha2-re", type=float, dest="alpha2_re")
    p.add_argument("--alpha2-im", type=float, dest="alpha2_im")
    p.add_argument("--tau-step-ns", type=float, dest="tau_step_ns")
    p.add_argument("--tau-stop-ns", type=float, dest="tau_stop_ns")
    p.add_argument("--peak-window-ns", type=float, dest="peak_window_ns")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="mbdelay",
        description="Multiband Wi-Fi delay-estimation bounds and sidelobe analysis",
    )
    parser.add_argument("--version", action="version", version=f"mbdelay {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("scenarios", help="list the scenario catalog")
    p.add_argument("--json", action="store_true", help="machine-readable output")
    p.add_argument("--filter", action="append", help="restrict to these ids")
    p.add_argument("--out", help="also write the catalog JSON here")
    _add_common(p)
    p.set_defaults(func=cmd_scenarios)

    p = sub.add_parser("mask", help="export spectral masks as CSV")
    _add_common(p)
    p.set_defaults(func=cmd_mask)

    p = sub.add_parser("crlb", help="CRLB sweeps versus SNR or separation")
    p.add_argument("--sweep", choices=("snr", "dtau"), required=True)
    p.add_argument("--dtau", help="separation for --sweep snr (ns or e.g. '1ns')")
    p.add_argument("--snr", type=float, help="SNR in dB for --sweep dtau")
    _add_common(p)
    p.set_defaults(func=cmd_crlb)

    p = sub.add_parser("response", help="normalized single-path delay responses")
    p.add_argument("--check-recombination", action="store_true",
                   help="verify the subband recombination identity")
    _add_common(p)
    p.set_defaults(func=cmd_response)

    p = sub.add_parser("scan", help="two-path matched-filter delay scans")
    p.add_argument("--noisy", action="store_true",
                   help="seeded noisy mode at --snr instead of the noise-free default")
    p.add_argument("--snr", type=float, help="SNR in dB for --noisy")
    p.add_argument("--export-observation", action="store_true",
                   help="also write the scanned snapshot as n,f_hz,re,im CSV")
    _add_common(p)
    p.set_defaults(func=cmd_scan)

    p = sub.add_parser("table2", help="restricted-peak offsets for all six scenarios")
    _add_common(p)
    p.set_defaults(func=cmd_table2)

    p = sub.add_parser("leakage", help="CRLB versus separation joined with leakage")
    p.add_argument("--snr", type=float)
    _add_common(p)
    p.set_defaults(func=cmd_leakage)

    p = sub.add_parser("reproduce-all", help="run every reproduction artifact")
    p.add_argument("--sweep", default="dtau", help=argparse.SUPPRESS)
    p.add_argument("--dtau", default=None, help=argparse.SUPPRESS)
    p.add_argument("--snr", type=float, default=None, help=argparse.SUPPRESS)
    p.add_argument("--json", action="store_true", help=argparse.SUPPRESS)
    p.add_argument("--noisy", action="store_true", help=argparse.SUPPRESS)
    p.add_argument("--check-recombination", action="store_true", help=argparse.SUPPRESS)
    p.add_argument("--filter", default=None, help=argparse.SUPPRESS)
    p.add_argument("--out", default=None, help=argparse.SUPPRESS)
    _add_common(p)
    p.set_defaults(func=cmd_reproduce_all)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except NumericalError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 3
    except (ValueError, KeyError, GridAlignmentError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
