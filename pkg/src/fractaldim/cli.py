"""Command-line front end.

Every subcommand reads optional ``key = value`` config files (``--config``),
then applies command-line flags on top.  All randomness comes from ``seed``
(default 0).  Outputs are written atomically and embed the run configuration.

Exit status: 0 success or campaign pass, 1 campaign failure, 2 usage error.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass, field
from pathlib import Path

from . import __version__

USAGE_ERROR = 2
CAMPAIGN_FAIL = 1


class UsageError(Exception):
    pass


def _int_list(text: str) -> list[int]:
    return [int(v) for v in str(text).split(",") if v.strip()]


def _bool(text) -> bool:
    if isinstance(text, bool):
        return text
    t = str(text).strip().lower()
    if t in ("1", "true", "yes", "on"):
        return True
    if t in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"not a boolean: {text!r}")


# key -> (type, default, help); keys are shared by config files and flags
COMMON = {
    "seed": (int, 0, "PRNG seed (64-bit)"),
}
KEYS = {
    "generate": {
        "fractal": (str, "koch", "koch, koch_curve, cantor or sierpinski"),
        "order": (int, 6, "order / depth of the construction"),
        "ratio": (float, 1 / 3, "Cantor contraction ratio"),
        "ifs": (str, None, "IFS description file (overrides --fractal)"),
        "precision": (int, 30, "mantissa bits"),
        "out": (str, None, "output point cloud (.fdim binary or .csv)"),
    },
    "boxdim": {
        "input": (str, None, "point cloud"),
        "rmin": (int, None, "smallest scale (auto if omitted)"),
        "rmax": (int, None, "largest scale (auto if omitted)"),
        "out": (str, None, "estimate JSON"),
        "profile": (str, None, "scale profile CSV"),
    },
    "kdim": {
        "input": (str, None, "point cloud to take a point from"),
        "index": (int, 0, "row of the point cloud"),
        "point": (str, "prng", "prng, dyadic or file"),
        "dyadic": (str, "3/8", "comma-separated dyadic coordinates"),
        "dim": (int, 1, "ambient dimension of a prng point"),
        "rlist": (str, "512,1024,2048,3072,4096", "precisions"),
        "calibration": (str, None, "calibration file"),
        "out": (str, None, "complexity profile CSV"),
    },
    "intersect": {
        "e": (str, None, "point cloud E"),
        "f": (str, None, "point cloud F"),
        "count": (int, 100, "number of sampled translations"),
        "rmin": (int, 3, "smallest scale"),
        "rmax": (int, 8, "largest scale"),
        "tolerance": (float, 0.1, "allowed excess over the bound"),
        "allowed": (float, 0.05, "allowed violation fraction"),
        "box_factor": (float, 2.0, "translation box side / (diam E + diam F)"),
        "side": (str, "hausdorff", "hausdorff (fitted value) or packing (upper slope)"),
        "report": (str, None, "report JSON"),
        "csv": (str, None, "per-sample CSV"),
    },
    "motion": {
        "e": (str, None, "point cloud E"),
        "f": (str, None, "point cloud F"),
        "count": (int, 100, "number of sampled motions"),
        "rmin": (int, 3, "smallest scale"),
        "rmax": (int, 8, "largest scale"),
        "tolerance": (float, 0.1, "allowed excess over the bound"),
        "allowed": (float, 0.05, "allowed violation fraction"),
        "box_factor": (float, 2.0, "translation box side / (diam E + diam F)"),
        "scale": (float, 1.0, "similarity scale (1 for rigid motions)"),
        "report": (str, None, "report JSON"),
        "csv": (str, None, "per-sample CSV"),
    },
    "product": {
        "e": (str, None, "point cloud E"),
        "f": (str, None, "point cloud F"),
        "rmin": (int, 3, "smallest scale"),
        "rmax": (int, 11, "largest scale"),
        "tolerance": (float, 0.1, "tolerance per link of the chain"),
        "cap": (int, 10**8, "largest product to materialise"),
        "report": (str, None, "report JSON"),
        "csv": (str, None, "per-link CSV"),
    },
    "chain": {
        "pairs": (int, 50, "number of PRNG point pairs"),
        "r": (int, 4096, "largest precision"),
        "allowed": (float, 0.1, "allowed failing fraction"),
        "calibration": (str, None, "calibration file"),
        "report": (str, None, "report JSON"),
        "csv": (str, None, "per-pair CSV"),
    },
    "probe": {
        "input": (str, None, "point cloud"),
        "count": (int, 50, "sampled points"),
        "rlist": (str, None, "precisions (default spread up to precision + 2)"),
        "rmin": (int, None, "box-dimension smallest scale"),
        "rmax": (int, None, "box-dimension largest scale"),
        "report": (str, None, "report JSON"),
        "csv": (str, None, "per-point CSV"),
    },
    "calibrate": {
        "out": (str, None, "calibration file (default: the packaged one)"),
    },
}
REQUIRED = {
    "generate": ("out",),
    "boxdim": ("input",),
    "intersect": ("e", "f"),
    "motion": ("e", "f"),
    "product": ("e", "f"),
    "probe": ("input",),
}


@dataclass
class RunConfig:
    command: str
    seed: int = 0
    params: dict = field(default_factory=dict)

    def snapshot(self) -> dict:
        return {"tool": "fractaldim", "version": __version__, "command": self.command, "seed": self.seed, "params": self.params}


def valid_keys(command: str) -> dict:
    keys = dict(COMMON)
    keys.update(KEYS[command])
    return keys


def parse_config_text(text: str, command: str) -> dict:
    keys = valid_keys(command)
    out = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, val = line.partition("=")
        key = key.strip().replace("-", "_")
        if not sep:
            raise UsageError(f"config line {lineno}: expected key = value")
        if key not in keys:
            raise UsageError(f"unknown config key {key!r}; valid keys: {', '.join(sorted(keys))}")
        out[key] = val.strip()
    return out


def build_config(command: str, file_values: dict, flag_values: dict) -> RunConfig:
    keys = valid_keys(command)
    merged = {k: spec[1] for k, spec in keys.items()}
    for source in (file_values, flag_values):
        for k, v in source.items():
            if v is None:
                continue
            if k not in keys:
                raise UsageError(f"unknown key {k!r}; valid keys: {', '.join(sorted(keys))}")
            typ = keys[k][0]
            try:
                merged[k] = typ(v) if v is not None else None
            except (TypeError, ValueError) as exc:
                raise UsageError(f"bad value for {k}: {v!r}") from exc
    for k in REQUIRED.get(command, ()):
        if merged.get(k) is None:
            raise UsageError(f"{command}: missing required key {k!r}")
    seed = merged.pop("seed")
    if not 0 <= seed < 1 << 64:
        raise UsageError("seed must be a 64-bit unsigned integer")
    return RunConfig(command, seed, merged)


def make_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="fractaldim", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"fractaldim {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    for command in KEYS:
        sp = sub.add_parser(command)
        sp.add_argument("--config", action="append", default=[], help="key = value config file")
        for key, (typ, default, text) in valid_keys(command).items():
            flag = "--" + key.replace("_", "-")
            names = [flag]
            if key == "input":
                names.append("--in")
            if key == "rmin":
                names.append("--r-min")
            if key == "rmax":
                names.append("--r-max")
            sp.add_argument(*names, dest=key, default=None, help=f"{text} (default {default})")
    return parser


# --- command implementations ---------------------------------------------------


def _write_report(rep, cfg: RunConfig) -> None:
    from .io import atomic_write_text

    rep.provenance["run_config"] = cfg.snapshot()
    if cfg.params.get("report"):
        atomic_write_text(cfg.params["report"], rep.to_json())
    if cfg.params.get("csv"):
        atomic_write_text(cfg.params["csv"], "# " + json.dumps(cfg.snapshot()) + "\n" + rep.to_csv())


def _load(path: str):
    from .io import FormatError, read_pointset

    p = Path(path)
    if not p.exists():
        raise UsageError(f"input file {path} does not exist")
    try:
        return read_pointset(p)[0]
    except FormatError as exc:
        raise UsageError(f"cannot read {path}: {exc}") from exc


def _label(ps, path: str):
    return ps if ps.label else ps.relabel(Path(path).stem)


def cmd_generate(cfg: RunConfig) -> int:
    from .generators import attractor, named_fractal, parse_ifs
    from .io import write_pointset

    p = cfg.params
    if p["ifs"]:
        ifs = parse_ifs(Path(p["ifs"]).read_text(encoding="utf-8"))
        ps = attractor(ifs, p["order"], p["precision"])
    else:
        ps = named_fractal(p["fractal"], p["order"], p["precision"], p["ratio"])
    snap = cfg.snapshot()
    snap["label"] = ps.label
    write_pointset(p["out"], ps, snap)
    print(f"generate {ps.label} value={len(ps)} bound=nan violations=0/0 status=PASS")
    return 0


def cmd_boxdim(cfg: RunConfig) -> int:
    from .estimators import box_dimension, scale_profile
    from .io import atomic_write_text

    p = cfg.params
    ps = _label(_load(p["input"]), p["input"])
    est = box_dimension(ps, p["rmin"], p["rmax"])
    if p["out"]:
        rec = est.to_record()
        rec["provenance"] = cfg.snapshot()
        atomic_write_text(p["out"], json.dumps(rec, indent=1) + "\n")
    if p["profile"]:
        prof = scale_profile(ps, range(est.r_min, est.r_max + 1))
        atomic_write_text(p["profile"], "# " + json.dumps(cfg.snapshot()) + "\n" + prof.to_csv())
    print(f"boxdim {ps.label} value={est.value:.4f} bound=nan violations=0/0 status=PASS")
    return 0


def _calibration(path):
    from .algodim import CalibrationError, load_calibration

    try:
        return load_calibration(path)
    except CalibrationError as exc:
        raise UsageError(f"{exc}") from exc


def cmd_kdim(cfg: RunConfig) -> int:
    from .algodim import complexity_profile, dim_estimate, dyadic_point, prng_point
    from .experiments import unit_cube_point
    from .io import atomic_write_text

    p = cfg.params
    _calibration(p["calibration"])
    rs = _int_list(p["rlist"])
    kind = "file" if p["input"] else p["point"]
    if kind == "prng":
        x = prng_point(cfg.seed, p["dim"], max(rs))
        label = f"prng{cfg.seed}"
    elif kind == "dyadic":
        x = dyadic_point(p["dyadic"].split(","), max(rs))
        label = f"dyadic({p['dyadic']})"
    elif kind == "file":
        ps = _load(p["input"])
        x = unit_cube_point(ps, p["index"])
        label = f"{Path(p['input']).stem}[{p['index']}]"
    else:
        raise UsageError("point must be prng, dyadic or file")
    try:
        est = dim_estimate(x, rs)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    if p["out"]:
        prof = complexity_profile(x, rs)
        atomic_write_text(p["out"], "# " + json.dumps(cfg.snapshot()) + "\n" + prof.to_csv())
    print(f"kdim {label} value={est.upper:.4f} bound=nan violations=0/0 status=PASS lower={est.lower:.4f}")
    return 0


def _campaign_params(cfg: RunConfig):
    from .experiments import CampaignParams

    p = cfg.params
    return CampaignParams(
        r_min=p["rmin"],
        r_max=p["rmax"],
        tolerance=p["tolerance"],
        allowed_fraction=p.get("allowed", 0.0),
        box_factor=p.get("box_factor", 2.0),
        seed=cfg.seed,
    )


def cmd_intersect(cfg: RunConfig) -> int:
    from .experiments import intersection_campaign, packing_intersection_campaign

    p = cfg.params
    E, F = _label(_load(p["e"]), p["e"]), _label(_load(p["f"]), p["f"])
    if p["side"] not in ("hausdorff", "packing"):
        raise UsageError("side must be hausdorff or packing")
    run = packing_intersection_campaign if p["side"] == "packing" else intersection_campaign
    rep = run(E, F, None, p["count"], _campaign_params(cfg))
    _write_report(rep, cfg)
    print(rep.summary("intersect"))
    return 0 if rep.passed else CAMPAIGN_FAIL


def cmd_motion(cfg: RunConfig) -> int:
    from .experiments import motion_campaign

    p = cfg.params
    E, F = _label(_load(p["e"]), p["e"]), _label(_load(p["f"]), p["f"])
    rep = motion_campaign(E, F, None, p["count"], _campaign_params(cfg), scale=p["scale"])
    _write_report(rep, cfg)
    print(rep.summary("motion"))
    return 0 if rep.passed else CAMPAIGN_FAIL


def cmd_product(cfg: RunConfig) -> int:
    from .experiments import product_campaign

    p = cfg.params
    E, F = _label(_load(p["e"]), p["e"]), _label(_load(p["f"]), p["f"])
    params = _campaign_params(cfg)
    rep = product_campaign(E, F, params, cap=p["cap"])
    _write_report(rep, cfg)
    print(rep.summary("product"))
    return 0 if rep.passed else CAMPAIGN_FAIL


def cmd_chain(cfg: RunConfig) -> int:
    from .experiments import chain_campaign, prng_pairs

    p = cfg.params
    cal = _calibration(p["calibration"])
    pairs = prng_pairs(cfg.seed, p["pairs"], p["r"])
    rep = chain_campaign(pairs, p["r"], cal, p["allowed"])
    _write_report(rep, cfg)
    print(rep.summary("chain"))
    return 0 if rep.passed else CAMPAIGN_FAIL


def cmd_probe(cfg: RunConfig) -> int:
    from .experiments import p2s_probe

    p = cfg.params
    S = _label(_load(p["input"]), p["input"])
    rs = _int_list(p["rlist"]) if p["rlist"] else None
    rep = p2s_probe(S, p["count"], rs, cfg.seed, p["rmin"], p["rmax"])
    _write_report(rep, cfg)
    print(rep.summary("probe"))
    return 0


def cmd_calibrate(cfg: RunConfig) -> int:
    from .algodim.calibration import DEFAULT_PATH, write_calibration

    out = cfg.params["out"] or DEFAULT_PATH
    cal = write_calibration(out)
    print(f"calibrate {Path(out).name} value={cal.c1:.4f} bound={cal.c0:.4f} violations=0/0 status=PASS")
    return 0


COMMANDS = {
    "generate": cmd_generate,
    "boxdim": cmd_boxdim,
    "kdim": cmd_kdim,
    "intersect": cmd_intersect,
    "motion": cmd_motion,
    "product": cmd_product,
    "chain": cmd_chain,
    "probe": cmd_probe,
    "calibrate": cmd_calibrate,
}


def main(argv=None) -> int:
    parser = make_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code is not None else 0
    command = args.command
    flags = {k: v for k, v in vars(args).items() if k not in ("command", "config")}
    try:
        file_values: dict = {}
        for path in args.config:
            if not Path(path).exists():
                raise UsageError(f"config file {path} does not exist")
            file_values.update(parse_config_text(Path(path).read_text(encoding="utf-8"), command))
        cfg = build_config(command, file_values, flags)
        return COMMANDS[command](cfg)
    except UsageError as exc:
        print(f"fractaldim {command}: error: {exc}", file=sys.stderr)
        return USAGE_ERROR
    except (ValueError, OSError) as exc:
        print(f"fractaldim {command}: error: {exc}", file=sys.stderr)
        return USAGE_ERROR


if __name__ == "__main__":
    sys.exit(main())
