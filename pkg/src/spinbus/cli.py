"""``spinbus`` command-line front end.

    spinbus <experiment> --config FILE [--output DIR] [--threads N]
    spinbus list [NAME] [--json]

Exit status is 0 on success, 2 for invalid input and 3 when a run exceeds
a capacity limit or an eigensolver fails to converge.
"""

from __future__ import annotations

import argparse
import datetime as _dt
import hashlib
import json
import shutil
import sys
import tempfile
import time
from pathlib import Path

from . import __version__
from .errors import CapacityError, ConvergenceError, DomainError, SpinbusError
from .experiments import EXPERIMENTS, validate_config

EXIT_OK = 0
EXIT_INVALID = 2
EXIT_CAPACITY = 3


def _sha256(path):
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 16), b""):
            h.update(chunk)
    return h.hexdigest()


def _load_config(path):
    try:
        with open(path) as fh:
            return json.load(fh)
    except OSError as exc:
        raise DomainError(f"cannot read config {path}: {exc.strerror}") from None
    except json.JSONDecodeError as exc:
        raise DomainError(f"malformed JSON in {path}: {exc}") from None


def _target_dir(name, cfg, output):
    if output is not None:
        return Path(output)
    stamp = _dt.datetime.now().strftime("%Y%m%dT%H%M%S")
    base = Path(cfg.get("output_dir", "."))
    target = base / f"{name}_{stamp}"
    n = 1
    while target.exists():
        target = base / f"{name}_{stamp}_{n}"
        n += 1
    return target


def run_experiment(name, config_path, output=None, threads=None, stream=None):
    """Validate, run and persist one experiment; returns the exit status."""
    stream = sys.stderr if stream is None else stream
    try:
        cfg = _load_config(config_path)
        exp, params = validate_config(cfg)
        if cfg["experiment"] != name:
            raise DomainError(f"config is for {cfg['experiment']!r}, command asked for {name!r}")
        if threads is not None and threads < 1:
            raise DomainError("--threads must be positive")
        target = _target_dir(name, cfg, output)
        if target.exists() and (not target.is_dir() or any(target.iterdir())):
            raise DomainError(f"output directory {target} exists and is not empty")
    except CapacityError as exc:
        print(f"spinbus: capacity error: {exc}", file=stream)
        return EXIT_CAPACITY
    except DomainError as exc:
        print(f"spinbus: invalid input: {exc}", file=stream)
        return EXIT_INVALID

    target.parent.mkdir(parents=True, exist_ok=True)
    work = Path(tempfile.mkdtemp(prefix=f".{target.name}.", dir=target.parent))
    start = time.perf_counter()
    try:
        if threads is not None:
            from threadpoolctl import threadpool_limits

            with threadpool_limits(limits=threads):
                summary = exp.run(params, work)
        else:
            summary = exp.run(params, work)
    except (CapacityError, ConvergenceError) as exc:
        shutil.rmtree(work, ignore_errors=True)
        print(f"spinbus: {type(exc).__name__}: {exc}", file=stream)
        return EXIT_CAPACITY
    except (DomainError, SpinbusError) as exc:
        shutil.rmtree(work, ignore_errors=True)
        print(f"spinbus: invalid input: {exc}", file=stream)
        return EXIT_INVALID
    except BaseException:
        shutil.rmtree(work, ignore_errors=True)
        raise

    files = sorted(p.name for p in work.iterdir())
    manifest = {
        "tool": "spinbus",
        "version": __version__,
        "experiment": name,
        "status": "ok",
        "config": cfg,
        "resolved_parameters": params,
        "wall_time_s": time.perf_counter() - start,
        "checksums": {f: _sha256(work / f) for f in files},
        "summary": summary,
    }
    with open(work / "manifest.json", "w") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True, default=float)
        fh.write("\n")
    if target.exists():
        target.rmdir()
    work.rename(target)
    print(str(target))
    return EXIT_OK


def list_experiments(name=None, as_json=False, stream=None):
    stream = sys.stdout if stream is None else stream
    if name is not None and name not in EXPERIMENTS:
        print(f"spinbus: unknown experiment {name!r}; choose from {sorted(EXPERIMENTS)}", file=sys.stderr)
        return EXIT_INVALID
    names = [name] if name else list(EXPERIMENTS)
    if as_json:
        json.dump({n: EXPERIMENTS[n].schema() for n in names}, stream, indent=2)
        stream.write("\n")
        return EXIT_OK
    for n in names:
        exp = EXPERIMENTS[n]
        print(f"{n}: {exp.description}", file=stream)
        for pname, p in exp.params.items():
            tag = "required" if p.required else f"default {json.dumps(p.default)}"
            print(f"    {pname:<16} {p.kind:<10} {tag:<28} {p.help}", file=stream)
        print(f"    outputs: {', '.join(exp.outputs)}, manifest.json", file=stream)
    return EXIT_OK


def build_parser():
    parser = argparse.ArgumentParser(prog="spinbus", description="Spin-chain quantum channel experiments.")
    parser.add_argument("--version", action="version", version=f"spinbus {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, metavar="{list," + ",".join(EXPERIMENTS) + "}")
    lp = sub.add_parser("list", help="describe the available experiments")
    lp.add_argument("name", nargs="?", help="show one experiment only")
    lp.add_argument("--json", action="store_true", help="print the JSON schema of each config")
    for name, exp in EXPERIMENTS.items():
        ep = sub.add_parser(name, help=exp.description)
        ep.add_argument("--config", required=True, help="JSON config file")
        ep.add_argument("--output", help="output directory (default <experiment>_<timestamp>)")
        ep.add_argument("--threads", type=int, help="cap on BLAS/LAPACK threads")
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    if args.command == "list":
        return list_experiments(args.name, args.json)
    return run_experiment(args.command, args.config, args.output, args.threads)


if __name__ == "__main__":
    sys.exit(main())
