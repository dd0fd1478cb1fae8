"""Command-line entry point ``frgs``.

Subcommands::

    frgs solve CONFIG.json [--out DIR]
    frgs check P Q N S
    frgs norms FIELD.csv P Q
    frgs rearrange FIELD.csv [--s S] [--out PATH]
    frgs propsuite SEED
"""
from __future__ import annotations

import argparse
import datetime as _dt
import json
import math
import os
import sys
import warnings
from pathlib import Path

import numpy as np

from . import __version__
from .errors import FieldFormatError, HypothesisError, NumericalError, StagnationError
from .field import format_float, read_field_csv, write_field_csv
from .fracop import FracParams, seminorm_sq_fourier
from .nonlinearity import Exponents, Nonlinearity, check_hypotheses, matching_coefficients
from .orlicz import orlicz_norm
from .rearrange import symm_decr_rearrange
from .solver import SolverConfig, minimize, radial_profile

EXIT_OK = 0
EXIT_INPUT = 1
EXIT_STAGNATION = 2
EXIT_VIOLATION = 3


def _err(msg: str) -> None:
    print(f"frgs: {msg}", file=sys.stderr)


def _dumps(obj) -> str:
    def clean(x):
        if isinstance(x, dict):
            return {str(k): clean(v) for k, v in x.items()}
        if isinstance(x, (list, tuple)):
            return [clean(v) for v in x]
        if isinstance(x, (bool, np.bool_)):
            return bool(x)
        if isinstance(x, (int, np.integer)):
            return int(x)
        if isinstance(x, (float, np.floating)):
            x = float(x)
            # JSON has no inf/nan; keep them readable as strings
            return x if math.isfinite(x) else repr(x)
        return x
    return json.dumps(clean(obj), sort_keys=True, indent=2)


def _write_profile(path: Path, r: np.ndarray, u: np.ndarray) -> None:
    with open(path, "w", newline="") as fh:
        fh.write("r,u\n")
        for a, b in zip(r, u):
            fh.write(f"{format_float(a)},{format_float(b)}\n")


def cmd_solve(args) -> int:
    try:
        with open(args.config) as fh:
            raw = json.load(fh)
        if not isinstance(raw, dict):
            raise ValueError("config must be a JSON object")
        cfg = SolverConfig.from_dict(raw)
    except FileNotFoundError:
        _err(f"config file not found: {args.config}")
        return EXIT_INPUT
    except (KeyError, ValueError, TypeError) as exc:
        msg = exc.args[0] if isinstance(exc, KeyError) and exc.args else exc
        _err(f"invalid config: {msg}")
        return EXIT_INPUT

    out = Path(args.out) if args.out else Path(args.config).with_suffix("").parent / (
        Path(args.config).stem + "_out")
    out.mkdir(parents=True, exist_ok=True)
    code = EXIT_OK
    try:
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            rep = minimize(cfg)
        if not rep.converged:
            _err(f"no convergence within max_iters={cfg.max_iters} "
                 f"(residual {rep.pde_residual:.3e})")
            code = EXIT_STAGNATION
    except StagnationError as exc:
        _err(str(exc))
        rep = exc.report
        code = EXIT_STAGNATION
    except (HypothesisError, NumericalError) as exc:
        _err(str(exc))
        return EXIT_INPUT

    ext = rep.u_extended.values
    edge = max(float(np.abs(np.take(ext, [0, -1], axis=ax)).max()) for ax in range(ext.ndim))
    if edge > 1e-4 * float(np.abs(ext).max()):
        _err(f"warning: boundary value {edge:.3e} exceeds 1e-4 of the maximum; "
             "consider a larger box")

    paths = {
        "summary": out / "summary.json",
        "profile": out / "profile.csv",
        "field": out / "field.csv",
        "manifest": out / "manifest.json",
    }
    summary = rep.summary()
    summary["energy_trace"] = list(rep.energy_trace)
    paths["summary"].write_text(_dumps(summary) + "\n")
    _write_profile(paths["profile"], *radial_profile(rep.u))
    write_field_csv(rep.u, paths["field"])
    manifest = {
        "config_echo": cfg.to_dict(),
        "artifact_version": __version__,
        "timestamp": _dt.datetime.now(_dt.timezone.utc).isoformat(timespec="seconds"),
        "outputs": [str(p) for p in paths.values()],
    }
    paths["manifest"].write_text(_dumps(manifest) + "\n")
    print(_dumps({k: summary[k] for k in rep.SCALARS}))
    return code


def cmd_check(args) -> int:
    try:
        exps = Exponents(int(args.N), float(args.s), float(args.p), float(args.q))
    except ValueError as exc:
        _err(f"invalid exponents: {exc}")
        return EXIT_INPUT
    nl = Nonlinearity(exps, *matching_coefficients(exps.p, exps.q), "odd")
    try:
        rep = check_hypotheses(nl, samples=args.samples)
    except HypothesisError as exc:
        _err(str(exc))
        return EXIT_VIOLATION
    if exps.critical:
        _err("note: q equals the critical exponent 2N/(N-2s)")
    print(_dumps(rep.to_dict()))
    return EXIT_OK if rep.ok else EXIT_VIOLATION


def _read(path):
    try:
        return read_field_csv(path)
    except FieldFormatError as exc:
        _err(f"{path}: {exc}")
    except FileNotFoundError:
        _err(f"file not found: {path}")
    return None


def cmd_norms(args) -> int:
    u = _read(args.field)
    if u is None:
        return EXIT_INPUT
    try:
        rep = orlicz_norm(u, float(args.p), float(args.q))
    except ValueError as exc:
        _err(str(exc))
        return EXIT_INPUT
    print(_dumps(rep.to_dict()))
    return EXIT_OK


def cmd_rearrange(args) -> int:
    u = _read(args.field)
    if u is None:
        return EXIT_INPUT
    try:
        fp = FracParams(args.s, u.grid.N)
    except ValueError as exc:
        _err(str(exc))
        return EXIT_INPUT
    us = symm_decr_rearrange(u)
    out = args.out or str(Path(args.field).with_suffix("")) + "_rearranged.csv"
    write_field_csv(us, out)
    print(json.dumps({"s": fp.s, "seminorm_sq": seminorm_sq_fourier(u, fp),
                      "seminorm_sq_rearranged": seminorm_sq_fourier(us, fp), "output": out},
                     sort_keys=True))
    return EXIT_OK


def cmd_propsuite(args) -> int:
    from .propsuite import run
    return EXIT_OK if run(args.seed) else EXIT_VIOLATION


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="frgs", description=__doc__.splitlines()[0])
    ap.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("solve", help="compute a ground-state candidate from a JSON config")
    sp.add_argument("config")
    sp.add_argument("--out", help="output directory (default: <config stem>_out)")
    sp.set_defaults(func=cmd_solve)

    sp = sub.add_parser("check", help="sample the growth hypotheses of the model nonlinearity")
    sp.add_argument("p")
    sp.add_argument("q")
    sp.add_argument("N")
    sp.add_argument("s")
    sp.add_argument("--samples", type=int, default=10**6)
    sp.set_defaults(func=cmd_check)

    sp = sub.add_parser("norms", help="L^p + L^q norms of a field CSV")
    sp.add_argument("field")
    sp.add_argument("p")
    sp.add_argument("q")
    sp.set_defaults(func=cmd_norms)

    sp = sub.add_parser("rearrange", help="symmetric-decreasing rearrangement of a field CSV")
    sp.add_argument("field")
    sp.add_argument("--s", type=float, default=0.5, help="order of the seminorm (default 0.5)")
    sp.add_argument("--out", help="output CSV (default: <field stem>_rearranged.csv)")
    sp.set_defaults(func=cmd_rearrange)

    sp = sub.add_parser("propsuite", help="seeded run of every module's invariant checks")
    sp.add_argument("seed", type=int)
    sp.set_defaults(func=cmd_propsuite)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if os.environ.get("FRGS_THREADS") is not None:
        try:
            int(os.environ["FRGS_THREADS"])
        except ValueError:
            _err("FRGS_THREADS must be an integer")
            return EXIT_INPUT
    try:
        return args.func(args)
    except ValueError as exc:
        _err(str(exc))
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
