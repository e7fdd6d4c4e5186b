"""Command-line entry point: ``hazecascade <command> ...``.

stdout carries JSON only; diagnostics go to stderr. Exit status is 0 on
success, 1 on I/O failures (or any failed batch entry) and 2 on bad input
formats or parameters.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

from . import dataset as ds
from .dcp import DcpConfig, dcp_dehaze
from .errors import HazeError
from .metrics import DEPTH_FIELDS, band_abs_error, depth_metrics, psnr, ssim_rgb
from .progressive import CascadeConfig, pdld_classical
from .scattering import DEFAULT_T_FLOOR, AtmosphericLight, hazify, transmission_from_depth

log = logging.getLogger("hazecascade")

REPORT_FIELDS = ("psnr", "ssim") + DEPTH_FIELDS
BAND_FIELDS = ("band_upper_m", "mean_abs_error_m", "pixel_count")
GEN_KEYS = {
    "scenes": int, "width": int, "height": int, "depth_min": float, "depth_max": float,
    "primitives": int, "count_per_image": int, "seed": int, "freq_min": float, "freq_max": float,
}


def _emit(obj) -> None:
    sys.stdout.write(json.dumps(obj, indent=2, sort_keys=True) + "\n")


def _stem(path) -> Path:
    p = Path(path)
    return p.with_suffix("")


# ------------------------------------------------------------------ hazify

def cmd_hazify(args) -> int:
    clear, depth = ds.load_rgbd(args.clear, args.depth)
    if args.sample:
        params = ds.sample_haze_params(args.seed, args.count)
        outs = [Path(f"{_stem(args.output)}_{j:02d}.png") for j in range(len(params))]
    else:
        if args.A is None or args.beta is None:
            raise HazeError("either --A and --beta, or --sample, is required")
        params = [ds.HazeParams(args.A, args.beta, args.seed)]
        outs = [Path(args.output)]
    report = []
    for p, out in zip(params, outs):
        t = transmission_from_depth(depth, p.scattering)
        ds.write_rgb(out, hazify(clear, t, AtmosphericLight.homogeneous(p.A)))
        item = {"hazy": str(out), "A": p.A, "beta": p.beta, "seed": p.seed}
        if args.emit_t:
            t_path = Path(f"{_stem(out)}_t.png")
            ds.write_plane_u8(t_path, t)
            item["transmission"] = str(t_path)
        report.append(item)
    _emit({"outputs": report})
    return 0


# ------------------------------------------------------------------ dehaze

def _dcp_config(args) -> DcpConfig:
    return DcpConfig(
        patch_radius=args.patch_radius, omega=args.omega, top_fraction=args.top_fraction,
        guided_radius=args.guided_radius, guided_eps=args.guided_eps, t_floor=args.t_floor,
    )


def _cascade_config(args) -> CascadeConfig:
    return CascadeConfig(
        stages=args.stages, beta=args.beta, transmission_radius=args.transmission_radius,
        transmission_eps=args.transmission_eps, depth_radius=args.depth_radius,
        depth_eps=args.depth_eps, dcp=_dcp_config(args), t_floor=args.t_floor,
    )


def dehaze_file(hazy_path, out_path, method, dcp_cfg, cascade_cfg, depth_path=None,
                emit_all=False) -> dict:
    hazy = ds.read_rgb(hazy_path)
    out_path = Path(out_path)
    item = {"hazy": str(hazy_path), "output": str(out_path), "method": method}
    if method == "dcp":
        dehazed, t, A = dcp_dehaze(hazy, dcp_cfg)
        ds.write_rgb(out_path, dehazed)
        item["A"] = A.as_array().tolist()
        if emit_all:
            t_path = Path(f"{_stem(out_path)}_t.png")
            ds.write_plane_u8(t_path, t)
            item["transmission"] = str(t_path)
        return item

    external = ds.read_depth(depth_path) if depth_path else None
    if external is not None and external.shape != hazy.shape[:2]:
        raise ds.FormatError(f"{depth_path} does not match the size of {hazy_path}")
    result = pdld_classical(hazy, cascade_cfg, external)
    ds.write_rgb(out_path, result.dehazed)
    residuals = [s.residual for s in result.stages]
    item.update(A=result.atmospheric_light.as_array().tolist(), beta=result.beta,
                residuals=residuals)
    if emit_all:
        stem = _stem(out_path)
        t_path = Path(f"{stem}_t.png")
        ds.write_plane_u8(t_path, result.stages[-1].transmission)
        depth_paths = []
        for s in result.stages:
            p = Path(f"{stem}_stage{s.index}_depth.png")
            ds.write_depth(p, s.depth)
            depth_paths.append(str(p))
        res_path = Path(f"{stem}_residuals.json")
        res_path.write_text(json.dumps(
            {"initial_residual": result.initial_residual,
             "stages": [{"stage": s.index, "residual": s.residual} for s in result.stages]},
            indent=2) + "\n")
        item.update(transmission=str(t_path), stage_depths=depth_paths, residuals_json=str(res_path))
    return item


def _dehaze_job(job):
    try:
        return dehaze_file(*job), None
    except (HazeError, OSError) as exc:
        return None, f"{job[0]}: {exc}"


def _run_jobs(fn, jobs, n_workers):
    if n_workers <= 1 or len(jobs) <= 1:
        return [fn(j) for j in jobs]
    with ProcessPoolExecutor(max_workers=n_workers) as pool:
        return list(pool.map(fn, jobs))


def cmd_dehaze(args) -> int:
    dcp_cfg = _dcp_config(args)
    cascade_cfg = _cascade_config(args)
    if args.manifest:
        entries = ds.read_manifest(args.manifest)
        out_dir = Path(args.out_dir or ".")
        out_dir.mkdir(parents=True, exist_ok=True)
        jobs = [(e.hazy_path, out_dir / Path(e.hazy_path).name, args.method, dcp_cfg,
                 cascade_cfg, e.depth_path if args.use_manifest_depth else None, args.emit_all)
                for e in entries]
        results = _run_jobs(_dehaze_job, jobs, args.jobs)
        failures = [err for _, err in results if err]
        for err in failures:
            log.error("skipped %s", err)
        _emit({"outputs": [r for r, _ in results if r], "failed": len(failures)})
        return 1 if failures else 0
    if not args.hazy or not args.output:
        raise HazeError("dehaze needs HAZY and -o OUTPUT, or --manifest")
    _emit(dehaze_file(args.hazy, args.output, args.method, dcp_cfg, cascade_cfg,
                      args.depth, args.emit_all))
    return 0


# ---------------------------------------------------------------- evaluate

def evaluate_pair(pred_path, ref_path, depth_pred=None, depth_gt=None, bands=False,
                  band_width=2.0, max_depth=30.0) -> dict:
    pred = ds.read_rgb(pred_path)
    ref = ds.read_rgb(ref_path)
    if pred.shape != ref.shape:
        raise ds.FormatError(f"{pred_path} and {ref_path} differ in size")
    report = {"psnr": psnr(pred, ref), "ssim": ssim_rgb(pred, ref)}
    report.update({k: None for k in DEPTH_FIELDS})
    if depth_pred and depth_gt:
        dp, dg = ds.read_depth(depth_pred), ds.read_depth(depth_gt)
        report.update(depth_metrics(dp, dg).as_dict())
        if bands:
            report["bands"] = [
                {"band_upper_m": b.upper,
                 "mean_abs_error_m": None if b.empty else b.mean_abs_error,
                 "pixel_count": b.count}
                for b in band_abs_error(dp, dg, band_width, max_depth)
            ]
    return report


def _eval_job(job):
    name, args = job
    try:
        return name, evaluate_pair(*args), None
    except (HazeError, OSError) as exc:
        return name, None, f"{name}: {exc}"


def _csv_text(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for r in rows:
        w.writerow(["" if v is None else (f"{v:.6g}" if isinstance(v, float) else v) for v in r])
    return buf.getvalue()


def cmd_evaluate(args) -> int:
    if args.manifest:
        if not args.pred_dir:
            raise HazeError("--manifest needs --pred-dir")
        entries = ds.read_manifest(args.manifest)
        jobs = [(Path(e.hazy_path).name,
                 (str(Path(args.pred_dir) / Path(e.hazy_path).name), e.clear_path))
                for e in entries]
        results = _run_jobs(_eval_job, jobs, args.jobs)
        failures = [err for _, _, err in results if err]
        for err in failures:
            log.error("skipped %s", err)
        rows = [(name, rep) for name, rep, _ in results if rep]
        if args.format == "csv":
            if not args.output:
                raise HazeError("--format csv needs -o")
            Path(args.output).write_text(_csv_text(
                ("name",) + REPORT_FIELDS, [[n] + [r[k] for k in REPORT_FIELDS] for n, r in rows]))
            _emit({"report": args.output, "entries": len(rows), "failed": len(failures)})
        else:
            report = {"entries": [{"name": n, **r} for n, r in rows], "failed": len(failures)}
            if args.output:
                Path(args.output).write_text(json.dumps(report, indent=2, sort_keys=True) + "\n")
            _emit(report)
        return 1 if failures else 0

    if not args.pred or not args.ref:
        raise HazeError("evaluate needs --pred and --ref, or --manifest")
    if bool(args.depth_pred) != bool(args.depth_gt):
        raise HazeError("--depth-pred and --depth-gt must be given together")
    report = evaluate_pair(args.pred, args.ref, args.depth_pred, args.depth_gt,
                           args.bands, args.band_width, args.max_depth)
    report["units"] = {"depth_errors": "meters"}
    if args.format == "csv":
        if not args.output:
            raise HazeError("--format csv needs -o")
        out = Path(args.output)
        out.write_text(_csv_text(REPORT_FIELDS, [[report[k] for k in REPORT_FIELDS]]))
        written = {"report": str(out)}
        if "bands" in report:
            band_path = Path(f"{_stem(out)}_bands.csv")
            band_path.write_text(_csv_text(
                BAND_FIELDS, [[b[k] for k in BAND_FIELDS] for b in report["bands"]]))
            written["bands"] = str(band_path)
        _emit(written)
    else:
        if args.output:
            Path(args.output).write_text(json.dumps(report, indent=2, sort_keys=True) + "\n")
        _emit(report)
    return 0


# ------------------------------------------------------------- gen-dataset

def parse_gen_spec(text: str) -> dict:
    """Parse ``key = value`` lines; ``#`` starts a comment."""
    cfg = {"scenes": 5, "width": 96, "height": 96, "depth_min": 0.5, "depth_max": 2.5,
           "primitives": 6, "count_per_image": ds.DRAWS_PER_IMAGE, "seed": 0,
           "freq_min": 2.0, "freq_max": 12.0}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = (s.strip() for s in line.partition("="))
        if not sep or key not in GEN_KEYS:
            raise ds.FormatError(f"line {lineno}: expected one of {sorted(GEN_KEYS)} = value")
        try:
            cfg[key] = GEN_KEYS[key](value)
        except ValueError:
            raise ds.FormatError(f"line {lineno}: bad value {value!r} for {key}") from None
    return cfg


def cmd_gen_dataset(args) -> int:
    cfg = parse_gen_spec(Path(args.spec).read_text(encoding="utf-8"))
    pairs = []
    for i in range(cfg["scenes"]):
        spec = ds.SceneSpec(cfg["width"], cfg["height"], (cfg["depth_min"], cfg["depth_max"]),
                            cfg["primitives"], freq_range=(cfg["freq_min"], cfg["freq_max"]),
                            seed=cfg["seed"] * 100003 + i)
        pairs.append(ds.gen_scene(spec))
    entries = ds.synthesize_dataset(pairs, cfg["count_per_image"], cfg["seed"], args.out_dir)
    summary = {"manifest": str(Path(args.out_dir) / "manifest.csv"), "entries": len(entries),
               "scenes": cfg["scenes"]}
    if args.verify:
        worst = 0.0
        for e in ds.read_manifest(Path(args.out_dir) / "manifest.csv"):
            worst = max(worst, ds.verify_entry(e))
        summary.update(verified=True, max_rehazify_error=worst)
    _emit(summary)
    return 0


# ------------------------------------------------------------------ parser

def _add_dcp_flags(p):
    d = DcpConfig()
    g = p.add_argument_group("dark channel prior")
    g.add_argument("--patch-radius", type=int, default=d.patch_radius,
                   help="dark channel window radius (default %(default)s)")
    g.add_argument("--omega", type=float, default=d.omega,
                   help="fraction of haze removed (default %(default)s)")
    g.add_argument("--top-fraction", type=float, default=d.top_fraction,
                   help="share of brightest dark-channel pixels used for A (default %(default)s)")
    g.add_argument("--guided-radius", type=int, default=d.guided_radius,
                   help="guided filter radius for DCP transmission (default %(default)s)")
    g.add_argument("--guided-eps", type=float, default=d.guided_eps,
                   help="guided filter regulariser (default %(default)s)")
    g.add_argument("--t-floor", type=float, default=DEFAULT_T_FLOOR,
                   help="lower bound on transmission when inverting (default %(default)s)")


def _add_cascade_flags(p):
    c = CascadeConfig()
    g = p.add_argument_group("progressive cascade (--method pdld)")
    g.add_argument("--stages", type=int, default=c.stages, help="number of stages (default %(default)s)")
    g.add_argument("--beta", type=float, default=None,
                   help="scattering coefficient; default: fit to --depth if given, else 1.0")
    g.add_argument("--transmission-radius", type=int, default=c.transmission_radius,
                   help="(default %(default)s)")
    g.add_argument("--transmission-eps", type=float, default=c.transmission_eps,
                   help="(default %(default)s)")
    g.add_argument("--depth-radius", type=int, default=c.depth_radius, help="(default %(default)s)")
    g.add_argument("--depth-eps", type=float, default=c.depth_eps, help="(default %(default)s)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="hazecascade", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true", help="debug logging on stderr")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("hazify", help="render haze onto a clear image from its depth map")
    p.add_argument("--clear", required=True, help="8-bit RGB PNG")
    p.add_argument("--depth", required=True, help="16-bit PNG, millimetres, 0 = invalid")
    p.add_argument("--A", type=float, help="homogeneous atmospheric light in [0, 1]")
    p.add_argument("--beta", type=float, help="scattering coefficient (1/m)")
    p.add_argument("--sample", action="store_true",
                   help="draw A in [0.7, 1.0] and beta in [0.5, 1.5] instead")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--count", type=int, default=ds.DRAWS_PER_IMAGE,
                   help="draws with --sample (default %(default)s); outputs get _NN suffixes")
    p.add_argument("--emit-t", action="store_true", help="also write the transmission map")
    p.add_argument("-o", "--output", required=True)
    p.set_defaults(func=cmd_hazify)

    p = sub.add_parser("dehaze", help="remove haze from an image or a manifest of images")
    p.add_argument("hazy", nargs="?")
    p.add_argument("-o", "--output")
    p.add_argument("--method", choices=("dcp", "pdld"), default="pdld")
    p.add_argument("--depth", help="external depth PNG used to initialise the cascade")
    p.add_argument("--emit-all", action="store_true",
                   help="also write transmission, per-stage depth and residual JSON")
    p.add_argument("--manifest", help="batch mode: manifest CSV")
    p.add_argument("--out-dir", help="batch output directory")
    p.add_argument("--use-manifest-depth", action="store_true",
                   help="batch mode: initialise from the manifest's depth files")
    p.add_argument("--jobs", type=int, default=os.cpu_count() or 1)
    _add_dcp_flags(p)
    _add_cascade_flags(p)
    p.set_defaults(func=cmd_dehaze)

    p = sub.add_parser("evaluate", help="PSNR/SSIM and depth metrics")
    p.add_argument("--pred")
    p.add_argument("--ref")
    p.add_argument("--depth-pred")
    p.add_argument("--depth-gt")
    p.add_argument("--bands", action="store_true", help="per-distance-band depth error")
    p.add_argument("--band-width", type=float, default=2.0)
    p.add_argument("--max-depth", type=float, default=30.0)
    p.add_argument("--format", choices=("json", "csv"), default="json")
    p.add_argument("--manifest", help="batch mode: compare --pred-dir outputs with clear images")
    p.add_argument("--pred-dir")
    p.add_argument("--jobs", type=int, default=os.cpu_count() or 1)
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("gen-dataset", help="procedural scenes + hazy variants + manifest",
                       description="SPEC is a text file of 'key = value' lines; keys: "
                       + ", ".join(sorted(GEN_KEYS)))
    p.add_argument("spec")
    p.add_argument("out_dir")
    p.add_argument("--verify", action="store_true", help="re-render every entry and compare")
    p.set_defaults(func=cmd_gen_dataset)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        stream=sys.stderr, format="%(levelname)s %(message)s")
    try:
        return args.func(args)
    except HazeError as exc:
        log.error("%s", exc)
        return 2
    except OSError as exc:
        log.error("%s", exc)
        return 1


if __name__ == "__main__":
    sys.exit(main())
