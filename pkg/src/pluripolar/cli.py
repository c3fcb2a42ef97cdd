"""Command-line front end: ``pluripolar <subcommand> --config cfg.json --out dir``.

Every run writes its reports, a CSV where one applies, and ``manifest.json``.
The manifest digest covers the command, input digests, seed, parameters and
tool version (not the wall-clock time), and is embedded in every report.
Exit codes: 0 success, 2 invalid input, 3 search found nothing, 4 precision
failure.
"""
from __future__ import annotations

import argparse
import hashlib
import json
import math
import sys
import time
from pathlib import Path

import numpy as np

from . import __version__
from .gevrey import GevreyGraph, check_power_bound, sample_graph, validate_family
from .kdim import EpsSchedule, estimate_psi
from .metric_entropy import reports_to_csv
from .polynomials import Polydisk
from .smallpoly import PrecisionError, SearchConfig, SearchNotFound, search_small_poly
from .trace_space import PointCloud, entropy_lower, entropy_upper
from .witness import build_witness, cheb_lower_oracle

EXIT_OK, EXIT_INVALID, EXIT_NOT_FOUND, EXIT_PRECISION = 0, 2, 3, 4


class ConfigError(ValueError):
    pass


# deterministic JSON ------------------------------------------------------

def _fmt(obj) -> str:
    if isinstance(obj, bool) or obj is None:
        return json.dumps(obj)
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        if math.isnan(x) or math.isinf(x):
            return json.dumps(str(x))
        s = format(x, ".17g")
        return s if any(ch in s for ch in ".en") else s + ".0"
    if isinstance(obj, str):
        return json.dumps(obj)
    if isinstance(obj, dict):
        return "{" + ", ".join(f"{json.dumps(str(k))}: {_fmt(v)}" for k, v in obj.items()) + "}"
    if isinstance(obj, (list, tuple, np.ndarray)):
        return "[" + ", ".join(_fmt(v) for v in obj) + "]"
    return json.dumps(str(obj))


def dumps(obj) -> str:
    """JSON with floats at 17 significant digits, keys in insertion order."""
    return _fmt(obj) + "\n"


def _sha(data: bytes) -> str:
    return hashlib.sha256(data).hexdigest()


# inputs ------------------------------------------------------------------

def load_config(path: str) -> tuple[dict, bytes]:
    raw = Path(path).read_bytes()
    try:
        return json.loads(raw.decode()), raw
    except json.JSONDecodeError as e:
        raise ConfigError(f"{path}:{e.lineno}:{e.colno}: malformed JSON: {e.msg}") from e


def _require(cfg: dict, key: str, kind=None):
    if key not in cfg:
        raise ConfigError(f"missing required key {key!r}")
    v = cfg[key]
    if kind is not None and not isinstance(v, kind):
        raise ConfigError(f"key {key!r} must be {kind.__name__ if isinstance(kind, type) else kind}")
    return v


def generate_cloud(gen: dict) -> np.ndarray:
    """Built-in clouds: ``disk`` (r, grid), ``point`` (z), ``exp_curve`` (lo, hi, count)."""
    kind = gen.get("generator")
    if kind == "disk":
        r, grid = float(gen.get("r", 0.25)), int(gen.get("grid", 25))
        g = np.linspace(-r, r, grid)
        Z = (g[:, None] + 1j * g[None, :]).ravel()
        return Z[np.abs(Z) <= r][:, None]
    if kind == "point":
        z = gen.get("z", [[0.0, 0.0]])
        return np.array([[complex(a, b) for a, b in z]])
    if kind == "exp_curve":
        x = np.linspace(float(gen.get("lo", 0.0)), float(gen.get("hi", 0.25)), int(gen.get("count", 400)))
        return np.stack([x + 0j, np.exp(x) + 0j], axis=1)
    raise ConfigError(f"unknown cloud generator {kind!r}")


def cloud_from_config(cfg: dict, base: Path) -> tuple[PointCloud, dict]:
    """The cloud named by ``cloud`` (inline object, generator or file path)."""
    gen = _require(cfg, "cloud")
    digests = {}
    if isinstance(gen, str):
        p = (base / gen) if not Path(gen).is_absolute() else Path(gen)
        raw = p.read_bytes()
        digests["cloud"] = _sha(raw)
        try:
            doc = json.loads(raw.decode())
        except json.JSONDecodeError as e:
            raise ConfigError(f"{p}:{e.lineno}:{e.colno}: malformed JSON: {e.msg}") from e
    else:
        doc = gen
    R = cfg.get("R")
    center = cfg.get("center")
    if "generator" in doc:
        pts = generate_cloud(doc)
        c = None if center is None else [complex(a, b) for a, b in center]
        return PointCloud.from_points(pts, R=R, center=c), digests
    try:
        return PointCloud.from_json(doc, R=R), digests
    except (KeyError, TypeError) as e:
        raise ConfigError(f"malformed cloud: {e}") from e


# subcommands -------------------------------------------------------------

def run_entropy(cfg, args, base):
    X, dig = cloud_from_config(cfg, base)
    eps = [float(e) for e in _require(cfg, "eps", list)]
    samples, seed = int(cfg.get("samples", 200)), int(args.seed if args.seed is not None else cfg.get("seed", 0))
    reports = []
    for i, e in enumerate(eps):
        reports.append(entropy_upper(X, e))
        if cfg.get("lower", True):
            reports.append(entropy_lower(X, e, samples, seed + i))
    return {"entropy.json": {"reports": [r.to_json() for r in reports]},
            "entropy.csv": reports_to_csv(reports)}, dig, seed, EXIT_OK


def run_kdim(cfg, args, base):
    X, dig = cloud_from_config(cfg, base)
    sched_doc = dict(_require(cfg, "schedule", dict))
    if args.seed is not None:
        sched_doc["seed"] = args.seed
    sched = EpsSchedule.from_json(sched_doc)
    est = estimate_psi(X, sched, lower=bool(cfg.get("lower", True)), threads=args.threads)
    return {"psi.json": est.to_json(), "kdim.csv": reports_to_csv(est.reports)}, dig, sched.seed, EXIT_OK


def run_smallpoly(cfg, args, base):
    X, dig = cloud_from_config(cfg, base)
    bits = args.precision_bits or int(cfg.get("precision_bits", 256))
    keys = ("strategy", "N", "h", "budget", "time_budget", "B", "R", "scales")
    sc = SearchConfig(**{k: cfg[k] for k in keys if k in cfg}, precision_bits=bits)
    D = None
    if "D" in cfg:
        D = Polydisk([complex(a, b) for a, b in cfg["D"]["center"]], float(cfg["D"]["radius"]))
    try:
        cert = search_small_poly(X, sc)
    except SearchNotFound as e:
        return {"notfound.json": {"message": str(e), "diagnosis": e.diagnosis}}, dig, None, EXIT_NOT_FOUND
    from .smallpoly import verify_certificate
    ok = verify_certificate(cert, X, D, max(bits, cert.extra.get("bits", bits)))
    doc = cert.to_json()
    doc["verified"] = ok
    return {"certificate.json": doc}, dig, None, EXIT_OK if ok else EXIT_NOT_FOUND


def run_witness(cfg, args, base):
    r, N = float(_require(cfg, "r")), int(_require(cfg, "N"))
    n = int(cfg.get("n", 1))
    W = build_witness(r, N, n, cfg.get("grid"))
    out = {"witness.json": dict(W.points.to_json(), r=r, N=N, eps_used=W.eps_used, grid=W.grid)}
    if args.action == "check":
        value, det = cheb_lower_oracle(W.points, N, int(cfg.get("unit_disk_grid", 64)), return_details=True)
        target = 0.5 * r ** N
        out["check.json"] = {"N": N, "r": r, "oracle": value, "target": target, "margin": value - target,
                             "pass": value >= target - 1e-6, "converged": det["converged"]}
    return out, {}, None, EXIT_OK


def run_gevrey(cfg, args, base):
    G = GevreyGraph.from_json(cfg)
    maxorder, samples = int(cfg.get("maxorder", 10)), int(cfg.get("samples", 9))
    fams = []
    for f in G.families:
        rep = validate_family(f, maxorder, samples)
        entry = {"kind": f.kind, "s": f.s, "accepted": rep["accepted"], "C": rep["C"],
                 "growth_slope": rep["growth_slope"], "C_power": f.C_power, "sup_bound": f.sup_bound}
        checks = []
        if rep["accepted"] and (f.sup_bound or 1) <= 1:
            for k in cfg.get("k", [1, 2, 3]):
                pb = check_power_bound(f, int(k), maxorder, samples)
                checks.append({"k": pb.k, "checked": pb.checked, "violations": len(pb.violations),
                               "undecided": pb.undecided})
        entry["power_bound"] = checks
        fams.append(entry)
    out = {"gevrey.json": {"m": G.m, "n": G.n, "s": G.s, "normalized": G.is_normalized(), "families": fams}}
    if "density" in cfg:
        out["graph_cloud.json"] = sample_graph(G, int(cfg["density"])).to_json()
    return out, {}, None, EXIT_OK


COMMANDS = {"entropy": run_entropy, "kdim": run_kdim, "smallpoly": run_smallpoly,
            "witness": run_witness, "gevrey": run_gevrey}


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="pluripolar", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        sp = sub.add_parser(name)
        if name == "witness":
            sp.add_argument("action", choices=("build", "check"))
        sp.add_argument("--config", required=True)
        sp.add_argument("--out", required=True)
        sp.add_argument("--seed", type=int)
        sp.add_argument("--threads", type=int, default=1)
        sp.add_argument("--precision-bits", type=int, dest="precision_bits")
    return p


def manifest_digest(manifest: dict) -> str:
    core = {k: manifest[k] for k in ("command", "inputs", "seed", "params", "version")}
    return _sha(dumps(core).encode())


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    t0 = time.time()
    try:
        cfg, raw = load_config(args.config)
        if not isinstance(cfg, dict):
            raise ConfigError("config must be a JSON object")
        if args.threads < 1:
            raise ConfigError("--threads must be positive")
        outputs, digests, seed, code = COMMANDS[args.command](cfg, args, Path(args.config).resolve().parent)
    except (ConfigError, ValueError, KeyError, TypeError, FileNotFoundError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_INVALID
    except PrecisionError as e:
        print(f"precision failure: {e}", file=sys.stderr)
        return EXIT_PRECISION
    command = args.command + (f" {args.action}" if args.command == "witness" else "")
    manifest = {"command": command, "inputs": dict(config=_sha(raw), **digests),
                "seed": seed if seed is not None else args.seed,
                "params": dict(cfg, precision_bits=args.precision_bits, threads=args.threads),
                "version": __version__}
    digest = manifest_digest(manifest)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    files = {}
    for name, payload in outputs.items():
        if isinstance(payload, dict):
            text = dumps(dict(payload, manifest_digest=digest))
        else:
            text = f"# manifest_digest={digest}\n" + payload
        (out / name).write_text(text)
        files[name] = _sha(text.encode())
    manifest.update(digest=digest, outputs=files, wall_clock=round(time.time() - t0, 3))
    (out / "manifest.json").write_text(dumps(manifest))
    if code == EXIT_NOT_FOUND:
        print("no certificate found", file=sys.stderr)
    return code


if __name__ == "__main__":
    sys.exit(main())
