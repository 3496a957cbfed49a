"""Command-line front end.

Subcommands: ``decompose`` (low-rank/sparse split of a tensor file or a
directory of P5 frames, with manifest, history CSV, and figures),
``tsvd`` (factorize and report ranks), ``synth`` (generate test data with
ground truth), ``metrics`` (norms, errors, support scores), and
``incoherence`` (coherence diagnostics of a square block).

Exit codes: 0 success, 2 bad arguments, 3 I/O failure, 4 numerical failure.
"""

from __future__ import annotations

import argparse
import hashlib
import sys
import time
from pathlib import Path

import numpy as np

from . import io as tio
from .block import IBTSVTConfig, ibtsvt
from .core import norm
from .errors import (
    BadMagic,
    BadVersion,
    DescriptorMismatch,
    EmptySequence,
    InconsistentDims,
    NonFiniteData,
    NumericalFailure,
    ShapeMismatch,
    SymmetryViolation,
    TruncatedPayload,
    ZeroTensor,
)
from .incoherence import incoherence_report
from .synth import lowrank_instance, support_scores, video_instance
from .tsvd import multi_rank, tnn, tsvd, tubal_rank

_IO_ERRORS = (
    OSError,
    BadMagic,
    BadVersion,
    TruncatedPayload,
    NonFiniteData,
    InconsistentDims,
    EmptySequence,
    DescriptorMismatch,
)
_NUMERIC_ERRORS = (NumericalFailure, ZeroTensor, SymmetryViolation)


class UsageError(Exception):
    """Invalid argument values; maps to exit code 2."""


def _parse_block(text: str) -> tuple[int, int]:
    parts = text.lower().split("x")
    if len(parts) != 2:
        raise UsageError(f"--block expects B1xB2, got {text!r}")
    try:
        b1, b2 = int(parts[0]), int(parts[1])
    except ValueError:
        raise UsageError(f"--block expects integers, got {text!r}") from None
    return b1, b2


def _sha256(path: Path) -> str:
    h = hashlib.sha256()
    if path.is_dir():
        for p in sorted(path.iterdir()):
            if p.is_file():
                h.update(p.name.encode())
                h.update(p.read_bytes())
    else:
        h.update(path.read_bytes())
    return h.hexdigest()


def _load_input(path: Path, normalize: str):
    if path.is_dir():
        frames = tio.read_frames(path)
        return tio.frames_to_tensor(frames, normalize=normalize), "frames"
    return tio.read_tensor(path), "tensor"


def cmd_decompose(args) -> int:
    b1, b2 = _parse_block(args.block)
    try:
        cfg = IBTSVTConfig(
            tau_scale=args.tau_scale,
            mu=args.mu,
            eta0=args.eta,
            eps=args.eps,
            max_iters=args.max_iters,
            b1=b1,
            b2=b2,
        )
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    if args.threads < 1:
        raise UsageError(f"--threads must be at least 1, got {args.threads}")

    inp = Path(args.input)
    input_hash = _sha256(inp)
    x, kind = _load_input(inp, args.normalize)

    started = time.perf_counter()
    result = ibtsvt(x, cfg, threads=args.threads)
    elapsed = time.perf_counter() - started

    outdir = Path(args.output_dir) if args.output_dir else inp.parent / (inp.stem + "_out")
    outdir.mkdir(parents=True, exist_ok=True)
    low_path = outdir / "low_rank.ten"
    sparse_path = outdir / "sparse.ten"
    tio.write_tensor(low_path, result.l)
    tio.write_tensor(sparse_path, result.s)

    from . import report

    csv_path = outdir / "history.csv"
    report.write_history_csv(csv_path, result)

    entries = {
        "tool": "trpca",
        "command": "decompose",
        "input": str(inp),
        "input_kind": kind,
        "input_sha256": input_hash,
        "n1": x.shape[0],
        "n2": x.shape[1],
        "n3": x.shape[2],
        "normalize": args.normalize,
        "block": f"{b1}x{b2}",
        "tau_scale": repr(args.tau_scale),
        "tau0": repr(cfg.resolved_tau0(x.shape[2])),
        "mu": repr(args.mu),
        "eta0": repr(args.eta),
        "eps": repr(args.eps),
        "max_iters": args.max_iters,
        "threads": args.threads,
        "block_count": result.grid.count,
        "iterations": result.iterations,
        "converged": str(result.converged).lower(),
        "final_change": repr(result.history[-1]) if result.history else "",
        "tubal_rank_min": int(result.block_ranks.min()) if result.block_ranks.size else 0,
        "tubal_rank_max": int(result.block_ranks.max()) if result.block_ranks.size else 0,
        "tubal_rank_mean": (
            f"{result.block_ranks.mean():.4f}" if result.block_ranks.size else "0"
        ),
        "wall_clock_seconds": f"{elapsed:.3f}",
        "history": ",".join(repr(v) for v in result.history),
        "thresholds": ",".join(repr(v) for v in result.thresholds),
        "output_low_rank": str(low_path),
        "output_sparse": str(sparse_path),
        "output_history_csv": str(csv_path),
    }

    if not args.no_figures:
        conv_path = outdir / "convergence.png"
        montage_path = outdir / "montage.png"
        report.render_convergence(conv_path, result, cfg.eps)
        report.render_montage(montage_path, x, result.l, result.s)
        entries["figure_convergence"] = str(conv_path)
        entries["figure_montage"] = str(montage_path)

    if kind == "frames":
        low_clamp = "clip" if args.normalize == "unit" else "rescale"
        low_frames_dir = outdir / "low_rank_frames"
        sparse_frames_dir = outdir / "sparse_frames"
        tio.write_frames(low_frames_dir, tio.tensor_to_frames(result.l, low_clamp))
        tio.write_frames(sparse_frames_dir, tio.tensor_to_frames(result.s, "rescale"))
        entries["render_low_rank"] = low_clamp
        entries["render_sparse"] = "rescale"
        entries["output_low_rank_frames"] = str(low_frames_dir)
        entries["output_sparse_frames"] = str(sparse_frames_dir)

    manifest_path = outdir / "manifest.txt"
    report.write_manifest(manifest_path, entries)

    print(f"iterations = {result.iterations}")
    print(f"converged = {str(result.converged).lower()}")
    if result.history:
        print(f"final_change = {result.history[-1]:.6e}")
    print(f"manifest = {manifest_path}")
    return 0


def cmd_tsvd(args) -> int:
    inp = Path(args.input)
    x = tio.read_tensor(inp)
    factors = tsvd(x)
    outdir = Path(args.output_dir) if args.output_dir else inp.parent / (inp.stem + "_tsvd")
    outdir.mkdir(parents=True, exist_ok=True)
    for name, tensor in (("u", factors.u), ("s", factors.s), ("v", factors.v)):
        tio.write_tensor(outdir / f"{name}.ten", tensor)
    ranks = multi_rank(x, args.rel_tol)
    print(f"tubal_rank = {int(ranks.max())}")
    print(f"multi_rank = {','.join(str(int(r)) for r in ranks)}")
    print(f"tnn = {tnn(x):.12g}")
    print(f"factors = {outdir}")
    if args.verify:
        recon = factors.reconstruct()
        denom = norm(x)
        err = norm(recon - x) / denom if denom > 0 else norm(recon - x)
        print(f"reconstruction_relative_error = {err:.3e}")
    return 0


def cmd_synth(args) -> int:
    outdir = Path(args.output_dir)
    outdir.mkdir(parents=True, exist_ok=True)
    if args.kind == "lowrank":
        try:
            x, l0, s0 = lowrank_instance(
                args.n1, args.n2, args.n3, args.rank, args.rho, args.amplitude, args.seed
            )
        except (ValueError, ShapeMismatch) as exc:
            raise UsageError(str(exc)) from None
        written = {"x.ten": x, "l0.ten": l0, "s0.ten": s0}
    else:
        try:
            x, mask = video_instance(
                args.n1,
                args.n2,
                args.n3,
                args.square,
                args.bg_amplitude,
                args.fg_amplitude,
                args.seed,
            )
        except (ValueError, ShapeMismatch) as exc:
            raise UsageError(str(exc)) from None
        written = {"x.ten": x, "mask.ten": mask}
        if args.pgm:
            frame_paths = tio.write_frames(args.pgm, tio.tensor_to_frames(x, "rescale"))
            print(f"frames = {args.pgm} ({len(frame_paths)} files)")
    for name, tensor in written.items():
        path = outdir / name
        tio.write_tensor(path, tensor)
        print(f"wrote = {path}")
    return 0


def cmd_metrics(args) -> int:
    a = tio.read_tensor(args.input)
    for kind in ("fro", "inf", "l1", "l112"):
        print(f"{kind} = {norm(a, kind):.12g}")
    if args.reference:
        b = tio.read_tensor(args.reference)
        if a.shape != b.shape:
            raise ShapeMismatch(f"shapes differ: {a.shape} vs {b.shape}")
        denom = norm(b)
        err = norm(a - b) / denom if denom > 0 else norm(a - b)
        print(f"relative_error = {err:.6e}")
    if args.mask:
        mask = tio.read_tensor(args.mask)
        precision, recall, fmeasure = support_scores(a, mask, args.support_threshold)
        print(f"precision = {precision:.4f}")
        print(f"recall = {recall:.4f}")
        print(f"fmeasure = {fmeasure:.4f}")
    return 0


def cmd_incoherence(args) -> int:
    x = tio.read_tensor(args.input)
    rep = incoherence_report(x, args.rel_tol)
    print(f"n = {rep.n}")
    print(f"n3 = {rep.n3}")
    print(f"r = {rep.r}")
    print(f"mu_u = {rep.mu_u:.4f}")
    print(f"mu_v = {rep.mu_v:.4f}")
    print(f"mu_uv = {rep.mu_uv:.4f}")
    print(f"mu = {rep.mu:.4f}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="trpca",
        description="Low-rank plus sparse decomposition of third-order tensors.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    d = sub.add_parser("decompose", help="split a tensor into low-rank and sparse parts")
    d.add_argument("input", help="tensor file or directory of P5 frames")
    d.add_argument("-o", "--output-dir", help="output directory (default: <input>_out)")
    d.add_argument("--block", default="2x2", help="block face size B1xB2 (default 2x2)")
    d.add_argument("--tau-scale", type=float, default=20.0,
                   help="threshold scale c, tau0 = c / sqrt(max(B1,B2) * n3) (default 20)")
    d.add_argument("--mu", type=float, default=1.8, help="threshold decay factor (default 1.8)")
    d.add_argument("--eta", type=float, default=1.0, help="initial decay state (default 1)")
    d.add_argument("--eps", type=float, default=1e-2, help="stopping tolerance (default 1e-2)")
    d.add_argument("--max-iters", type=int, default=50, help="sweep cap (default 50)")
    d.add_argument("--normalize", choices=("none", "unit"), default="unit",
                   help="frame scaling on ingestion (default unit)")
    d.add_argument("--threads", type=int, default=1, help="parallel workers over blocks")
    d.add_argument("--no-figures", action="store_true", help="skip figure rendering")
    d.set_defaults(func=cmd_decompose)

    t = sub.add_parser("tsvd", help="factorize a tensor and report its ranks")
    t.add_argument("input", help="tensor file")
    t.add_argument("-o", "--output-dir", help="directory for u/s/v files (default: <input>_tsvd)")
    t.add_argument("--rel-tol", type=float, default=1e-10, help="rank tolerance (default 1e-10)")
    t.add_argument("--verify", action="store_true", help="print the reconstruction error")
    t.set_defaults(func=cmd_tsvd)

    s = sub.add_parser("synth", help="generate synthetic data with ground truth")
    ssub = s.add_subparsers(dest="kind", required=True)
    lr = ssub.add_parser("lowrank", help="low tubal rank plus sparse spikes")
    lr.add_argument("--n1", type=int, default=40)
    lr.add_argument("--n2", type=int, default=40)
    lr.add_argument("--n3", type=int, default=10)
    lr.add_argument("--rank", type=int, default=2)
    lr.add_argument("--rho", type=float, default=0.05, help="sparse fraction in [0, 1]")
    lr.add_argument("--amplitude", type=float, default=1.0)
    lr.add_argument("--seed", type=int, default=0)
    lr.add_argument("-o", "--output-dir", default=".")
    lr.set_defaults(func=cmd_synth)
    vid = ssub.add_parser("video", help="static background plus moving square")
    vid.add_argument("--n1", type=int, default=32)
    vid.add_argument("--n2", type=int, default=32)
    vid.add_argument("--n3", type=int, default=16)
    vid.add_argument("--square", type=int, default=6)
    vid.add_argument("--bg-amplitude", type=float, default=1.0)
    vid.add_argument("--fg-amplitude", type=float, default=1.0)
    vid.add_argument("--seed", type=int, default=0)
    vid.add_argument("--pgm", help="also write the clip as P5 frames to this directory")
    vid.add_argument("-o", "--output-dir", default=".")
    vid.set_defaults(func=cmd_synth)

    m = sub.add_parser("metrics", help="norms, errors, and support scores")
    m.add_argument("input", help="tensor file")
    m.add_argument("reference", nargs="?", help="second tensor for the relative error")
    m.add_argument("--mask", help="ground-truth mask tensor for support scoring")
    m.add_argument("--support-threshold", type=float, default=0.25,
                   help="support cut as a fraction of the max magnitude (default 0.25)")
    m.set_defaults(func=cmd_metrics)

    i = sub.add_parser("incoherence", help="coherence diagnostics of a square block")
    i.add_argument("input", help="tensor file, square in its first two modes")
    i.add_argument("--rel-tol", type=float, default=1e-10, help="rank tolerance (default 1e-10)")
    i.set_defaults(func=cmd_incoherence)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except ShapeMismatch as exc:
        print(f"error: ShapeMismatch: {exc}", file=sys.stderr)
        return 2
    except _IO_ERRORS as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 3
    except _NUMERIC_ERRORS as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 4


if __name__ == "__main__":
    sys.exit(main())
