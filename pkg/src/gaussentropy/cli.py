"""Command-line front-end: ``gaussentropy run --preset NAME | --config FILE``.

Exit codes: 0 success, 1 numerical failure or cross-check mismatch, 2 invalid
configuration (nothing is written).
"""

import argparse
import json
import os
import re
import shutil
import subprocess
import sys
import tempfile
import time
from importlib import resources
from pathlib import Path

import jsonschema
import numpy as np

from . import __version__
from ._kernels import BACKEND
from .boson_gaussian import COND_LIMIT, DRIFT_LIMIT, NU_TOL
from .fock_probability import CutoffError
from .presets import PRESETS
from .runner import ORACLE_TOL, ConfigError, OracleMismatch, apply_sweep, resolve, run_scenario
from .transport_fcs import EPSREL, QUAD_LIMIT

OUT_ENV = "GAUSSENTROPY_OUT"
DEFAULT_OUT = "gaussentropy_output"

EXIT_OK, EXIT_NUMERIC, EXIT_CONFIG = 0, 1, 2


def load_schema():
    return json.loads(resources.files(__package__).joinpath("scenario.schema.json").read_text())


def _line_of(text, path):
    """Line of the last key of ``path`` in the config text, if it can be found."""
    keys = [p for p in path if isinstance(p, str)]
    if not text or not keys:
        return None
    m = re.search(r'"%s"\s*:' % re.escape(keys[-1]), text)
    return text.count("\n", 0, m.start()) + 1 if m else None


def load_config(path):
    """Parse and schema-check a JSON scenario file."""
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError(f"{path}: {exc.strerror}") from None
    try:
        config = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}:{exc.lineno}:{exc.colno}: {exc.msg}") from None
    validate_config(config, text, path)
    return config


def validate_config(config, text=None, path="<config>"):
    try:
        jsonschema.validate(config, load_schema())
    except jsonschema.ValidationError as exc:
        field = ".".join(str(p) for p in exc.absolute_path) or "<root>"
        line = _line_of(text, list(exc.absolute_path))
        where = f"{path}:{line}" if line else path
        raise ConfigError(f"{where}: field {field}: {exc.message}") from None


def parse_sweep(text):
    """``key=a..b`` (unit step), ``key=a..b:step``, ``key=a..b/n`` (n points) or ``key=v1,v2,...``."""
    key, sep, spec = text.partition("=")
    key = key.strip()
    if not sep or not key or not spec:
        raise ConfigError(f"sweep: expected key=range, got {text!r}")
    try:
        if ".." in spec:
            lo, rest = spec.split("..", 1)
            if "/" in rest:
                hi, n = rest.split("/", 1)
                values = np.linspace(float(lo), float(hi), int(n))
            else:
                hi, _, step = rest.partition(":")
                step = float(step) if step else 1.0
                if step <= 0:
                    raise ValueError("step must be positive")
                count = int(np.floor((float(hi) - float(lo)) / step + 1e-9)) + 1
                if count < 1:
                    raise ValueError("empty range")
                values = float(lo) + step * np.arange(count)
        else:
            values = [float(v) for v in spec.split(",")]
    except ValueError as exc:
        raise ConfigError(f"sweep: cannot parse {spec!r} ({exc})") from None
    return key, [int(v) if float(v).is_integer() and key in ("K", "cutoff") else float(v) for v in values]


def git_describe():
    here = Path(__file__).resolve().parent
    try:
        out = subprocess.run(["git", "describe", "--always", "--dirty", "--tags"], cwd=here,
                             capture_output=True, text=True, timeout=10)
    except (OSError, subprocess.SubprocessError):
        return "unknown"
    return out.stdout.strip() if out.returncode == 0 and out.stdout.strip() else "unknown"


def _fmt(x):
    if isinstance(x, (bool, np.bool_)):
        return str(int(x))
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return format(float(x), ".17g")


def format_csv(panel):
    lines = [",".join(panel.header)]
    lines += [",".join(_fmt(v) for v in row) for row in panel.rows]
    return "\n".join(lines) + "\n"


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, (np.floating, np.integer, np.bool_)):
        return obj.item()
    return obj


def write_outputs(out_dir, sc, panels, reports, runtime, argv):
    """Write CSVs and the JSON sidecar through a temporary directory, then move them in place."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    name = sc["name"]
    files = []
    for p in panels:
        files.append(f"{name}_{p.label}.csv" if p.label else f"{name}.csv")
    sidecar = dict(
        name=name, kind=sc["kind"], source=sc["source"], axis=sc["axis"], columns=sc["columns"],
        params=sc["params"],
        panels=[dict(label=p.label, file=f, params=p.params, runtime_s=p.runtime) for p, f in zip(panels, files)],
        oracle_check=[r.as_dict() for r in reports],
        git_describe=git_describe(), version=__version__, backend=BACKEND,
        tolerances=dict(quad_epsrel=EPSREL, quad_limit=QUAD_LIMIT, oracle_abs=ORACLE_TOL,
                        symplectic_nu=NU_TOL, eig_condition_limit=COND_LIMIT, symplectic_drift=DRIFT_LIMIT),
        runtime_s=runtime, command=argv,
    )
    tmp = Path(tempfile.mkdtemp(prefix=f".{name}-", dir=out_dir))
    try:
        for p, f in zip(panels, files):
            (tmp / f).write_text(format_csv(p))
        (tmp / f"{name}.json").write_text(json.dumps(_jsonable(sidecar), indent=2, sort_keys=True) + "\n")
        for f in files + [f"{name}.json"]:
            os.replace(tmp / f, out_dir / f)
    finally:
        shutil.rmtree(tmp, ignore_errors=True)
    return [out_dir / f for f in files], out_dir / f"{name}.json"


def build_parser():
    ap = argparse.ArgumentParser(prog="gaussentropy", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True)
    run = sub.add_parser("run", help="evaluate a scenario and write CSV tables")
    src = run.add_mutually_exclusive_group(required=True)
    src.add_argument("--preset", help="named scenario (see 'gaussentropy presets')")
    src.add_argument("--config", help="JSON scenario file")
    run.add_argument("--out", help=f"output directory (default: ${OUT_ENV} or ./{DEFAULT_OUT})")
    run.add_argument("--sweep", action="append", default=[], metavar="KEY=RANGE",
                     help="replace the axis or add panels: a..b, a..b:step, a..b/n or v1,v2")
    run.add_argument("--oracle-check", action="store_true",
                     help="cross-check the Gaussian ledger against the many-body route")
    run.add_argument("--threads", type=int, default=1, help="worker threads for grid points")
    sub.add_parser("presets", help="list the named scenarios")
    return ap


def _run(args, argv):
    config = {"preset": args.preset} if args.preset else load_config(args.config)
    sc = resolve(config)
    for s in args.sweep:
        sc = apply_sweep(sc, *parse_sweep(s))
    if args.oracle_check:
        sc["oracle_check"] = True
    sc = resolve(sc)
    if args.threads < 1:
        raise ConfigError("threads: must be at least 1")
    start = time.perf_counter()
    panels, reports = run_scenario(sc, threads=args.threads)
    runtime = time.perf_counter() - start
    for r in reports:
        if not r.passed:
            q = r.worst if r.J_M_within_bound else "J_M"
            detail = (f"max |deviation| {r.deviations[q]:.3e} > {r.tol:.0e}" if q != "J_M"
                      else "exact J_M exceeds the Holevo chain bound")
            raise OracleMismatch(f"oracle check failed for {q}: {detail}")
    out = args.out or os.environ.get(OUT_ENV) or DEFAULT_OUT
    files, sidecar = write_outputs(out, sc, panels, reports, runtime, argv)
    for f in files:
        print(f)
    print(sidecar)
    if reports:
        worst = max(max(r.deviations.values()) for r in reports)
        print(f"oracle check passed: max deviation {worst:.3e}")
    return EXIT_OK


def main(argv=None):
    argv = sys.argv[1:] if argv is None else list(argv)
    args = build_parser().parse_args(argv)
    if args.command == "presets":
        for name, sc in PRESETS.items():
            print(f"{name:12s} {sc['kind']:15s} {sc['source']}")
        return EXIT_OK
    try:
        return _run(args, argv)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (OracleMismatch, FloatingPointError, CutoffError, np.linalg.LinAlgError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except ValueError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
