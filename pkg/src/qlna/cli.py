"""Command-line front end.

Subcommands: derive, modes, perturb, sweep-photons, sweep-nf, validate.
Every CSV is written atomically (temp file + rename) with a matching
``<basename>.manifest.txt`` recording the run parameters; CSV content is
deterministic, timestamps live only in the manifest.

Exit codes: 0 success, 1 computation error, 2 usage error, 3 validation
failure.
"""

from __future__ import annotations

import argparse
import math
import os
import sys
import tempfile
import time
from pathlib import Path

from . import __version__
from .constants import DerivationError, constant_rows, derive_constants
from .fockspace import build_h0, build_hp
from .params import CircuitParams, ConfigError, load_config
from .response import (
    DEFAULT_GRID,
    ResponseError,
    SweepGrid,
    frame_constants,
    resolve_kappas,
    sweep,
)
from .spectra import first_order_state, spectrum_report
from .validate import run_invariants

SWEEP_CSV_HEADER = ("omega_in,g_m,n1ph,n2ph,dV1sq,dV2sq,dI1sq,dI2sq,"
                    "nf,nf_db,status")


def _fmt(x: float) -> str:
    if isinstance(x, float) and math.isnan(x):
        return "nan"
    return format(x, ".17g")


def _atomic_write(path: Path, text: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _write_manifest(out: Path, config_path: Path, args: argparse.Namespace,
                    elapsed: float) -> None:
    manifest = out.with_name(out.stem + ".manifest.txt")
    lines = [
        f"tool: qlna {__version__}",
        f"command: {args.verb}",
        f"wall_clock_s: {elapsed:.3f}",
        f"written_at: {time.strftime('%Y-%m-%dT%H:%M:%S%z')}",
        "parameters:",
    ]
    for key, value in sorted(vars(args).items()):
        if key in ("func", "verb"):
            continue
        lines.append(f"  {key} = {value}")
    lines.append(f"config file: {config_path}")
    lines.append("config echo:")
    for line in config_path.read_text(encoding="utf-8").splitlines():
        lines.append(f"  {line}")
    _atomic_write(manifest, "\n".join(lines) + "\n")


def _load(args: argparse.Namespace, parser: argparse.ArgumentParser
          ) -> tuple[CircuitParams, Path]:
    config = args.config or os.environ.get("QLNA_CONFIG")
    if not config:
        parser.error("--config is required (or set QLNA_CONFIG)")
    path = Path(config)
    if not path.exists():
        parser.error(f"config file not found: {path}")
    return load_config(path), path


def _cmd_derive(args, parser) -> int:
    p, cfg_path = _load(args, parser)
    start = time.perf_counter()
    consts = derive_constants(p, mode=args.mode)
    lines = ["name,value_re,value_im,units,mode"]
    for name, re_, im_, units, mode in constant_rows(consts):
        lines.append(f"{name},{_fmt(re_)},{_fmt(im_)},{units},{mode}")
    out = Path(args.out)
    _atomic_write(out, "\n".join(lines) + "\n")
    _write_manifest(out, cfg_path, args, time.perf_counter() - start)
    print(f"wrote {len(lines) - 1} constants to {out}")
    return 0


def _cmd_modes(args, parser) -> int:
    p, _ = _load(args, parser)
    consts = derive_constants(p, mode=args.mode)
    frame = frame_constants(p, mode=args.mode)
    for label, m in (("biased", consts.modes), ("drive frame", frame.modes)):
        k1, k2 = resolve_kappas(p, m)
        print(f"[{label}]")
        rows = [
            ("omega1", m.omega1), ("omega2", m.omega2),
            ("omega1+omega2", m.omega1 + m.omega2),
            ("kappa1", k1), ("kappa2", k2),
        ]
        for name, w in rows:
            print(f"{name:>15}: {w:.6e} rad/s = {w / (2 * math.pi):.6e} Hz")
        print(f"{'Z1':>15}: {m.z1:.6e} Ohm")
        print(f"{'Z2':>15}: {m.z2:.6e} Ohm")
    return 0


def _cmd_perturb(args, parser) -> int:
    p, cfg_path = _load(args, parser)
    start = time.perf_counter()
    dim = args.dim or p.fock_dim
    consts = derive_constants(p, mode=args.mode)
    h0 = build_h0(consts, dim)
    hp = build_hp(consts, dim, even_mode1_only=True)
    correction = first_order_state(args.j1, args.j2, hp, h0)
    report = spectrum_report(consts, h0, build_hp(consts, dim),
                             args.j1, args.j2)
    lines = ["kind,key,value_re,value_im"]
    for (j1, j2), amp in sorted(correction.amplitudes.items()):
        lines.append(f"amplitude,({j1};{j2}),{_fmt(amp.real)},{_fmt(amp.imag)}")
    for name, value in report.literal.items():
        lines.append(f"energy_literal,{name},{_fmt(value.real)},{_fmt(value.imag)}")
    nd = report.numeric_diagonal
    lines.append(f"energy_diagonal,H0,{_fmt(nd.real)},{_fmt(nd.imag)}")
    ne = report.nearest_exact
    lines.append(f"energy_exact,nearest,{_fmt(ne.real)},{_fmt(ne.imag)}")
    out = Path(args.out)
    _atomic_write(out, "\n".join(lines) + "\n")
    _write_manifest(out, cfg_path, args, time.perf_counter() - start)
    print(f"wrote {len(correction.amplitudes)} mixing amplitudes to {out}")
    return 0


def _cmd_sweep(args, parser) -> int:
    p, cfg_path = _load(args, parser)
    start = time.perf_counter()
    grid = SweepGrid(
        win_min=args.win_min, win_max=args.win_max, win_steps=args.win_steps,
        gm_min=args.gm_min, gm_max=args.gm_max, gm_steps=args.gm_steps,
    )
    points = sweep(p, grid, mode=args.mode, threads=args.threads)
    lines = [SWEEP_CSV_HEADER]
    for pt in points:
        lines.append(",".join([
            _fmt(pt.omega_in), _fmt(pt.g_m), _fmt(pt.n1ph), _fmt(pt.n2ph),
            _fmt(pt.dv1sq), _fmt(pt.dv2sq), _fmt(pt.di1sq), _fmt(pt.di2sq),
            _fmt(pt.nf), _fmt(pt.nf_db), pt.status.replace(",", ";"),
        ]))
    out = Path(args.out)
    _atomic_write(out, "\n".join(lines) + "\n")
    _write_manifest(out, cfg_path, args, time.perf_counter() - start)
    if args.figure:
        from .plots import render_sweep_figure
        fields = ["n1ph", "n2ph"] if args.verb == "sweep-photons" else ["nf_db"]
        render_sweep_figure(points, fields, args.figure)
        print(f"wrote figure to {args.figure}")
    errors = sum(1 for pt in points if pt.status != "ok")
    print(f"wrote {len(points)} rows to {out} ({errors} error rows)")
    return 0


def _cmd_validate(args, parser) -> int:
    p, _ = _load(args, parser)
    checks = run_invariants(p, mode=args.mode)
    failed = 0
    for name, status, detail in checks:
        tag = "INFO" if status is None else ("PASS" if status else "FAIL")
        if status is False:
            failed += 1
        print(f"[{tag}] {name}: {detail}")
    print(f"{sum(1 for _, s, _ in checks if s is True)} passed, "
          f"{failed} failed, "
          f"{sum(1 for _, s, _ in checks if s is None)} informational")
    return 3 if failed else 0


def _add_common(sp: argparse.ArgumentParser) -> None:
    sp.add_argument("--config", help="config file (fallback: QLNA_CONFIG)")
    sp.add_argument("--mode", choices=("literal", "consistent"),
                    default="consistent", help="evaluation mode")


def _add_sweep_flags(sp: argparse.ArgumentParser) -> None:
    g = DEFAULT_GRID
    sp.add_argument("--win-min", type=float, default=g.win_min,
                    help="sweep start, rad/s")
    sp.add_argument("--win-max", type=float, default=g.win_max,
                    help="sweep end, rad/s")
    sp.add_argument("--win-steps", type=int, default=g.win_steps)
    sp.add_argument("--gm-min", type=float, default=g.gm_min,
                    help="transconductance start, S")
    sp.add_argument("--gm-max", type=float, default=g.gm_max,
                    help="transconductance end, S")
    sp.add_argument("--gm-steps", type=int, default=g.gm_steps)
    sp.add_argument("--out", required=True, help="output CSV path")
    sp.add_argument("--figure", help="optional heatmap figure path (png/pdf)")
    sp.add_argument("--threads", type=int, default=os.cpu_count() or 1)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qlna",
        description="Quantum two-oscillator LNA analysis: derived constants, "
                    "spectra, driven photon numbers and noise figure.",
    )
    parser.add_argument("--version", action="version",
                        version=f"qlna {__version__}")
    sub = parser.add_subparsers(dest="verb", required=True)

    sp = sub.add_parser("derive", help="emit every derived constant as CSV")
    _add_common(sp)
    sp.add_argument("--out", required=True)
    sp.set_defaults(func=_cmd_derive)

    sp = sub.add_parser("modes", help="print oscillator mode parameters")
    _add_common(sp)
    sp.set_defaults(func=_cmd_modes)

    sp = sub.add_parser("perturb", help="first-order state mixing report")
    _add_common(sp)
    sp.add_argument("--j1", type=int, default=0)
    sp.add_argument("--j2", type=int, default=0)
    sp.add_argument("--dim", type=int, default=None)
    sp.add_argument("--out", required=True)
    sp.set_defaults(func=_cmd_perturb)

    for verb in ("sweep-photons", "sweep-nf"):
        sp = sub.add_parser(verb, help=f"{verb.split('-')[1]} sweep over "
                            "(omega_in, g_m), CSV output")
        _add_common(sp)
        _add_sweep_flags(sp)
        sp.set_defaults(func=_cmd_sweep)

    sp = sub.add_parser("validate", help="run the invariant suite")
    _add_common(sp)
    sp.set_defaults(func=_cmd_validate)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args, parser)
    except (ConfigError, DerivationError, ResponseError, ValueError,
            IndexError) as exc:
        print(f"qlna {args.verb}: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
