"""Command-line pipeline: synthesize/ingest -> filter -> connectivity ->
order -> export -> metrics.

Exit codes: 0 success, 2 I/O, 3 validation, 4 numerical degeneracy.
"""

from __future__ import annotations

import argparse
import csv
import os
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from itertools import combinations
from pathlib import Path

import numpy as np

from . import connectivity as conn
from . import errors as err
from . import filterbank as fb
from . import io as eio
from . import metrics as met
from . import ordering as ordm
from . import synth as syn
from . import tensor as ten

IO_ERRORS = (err.FormatError, OSError)
VALIDATION_ERRORS = (err.LayoutError, err.SpecError, err.LabelError,
                     err.AlignmentError, err.DimensionError,
                     err.BandOrderError, ValueError)
DEGENERACY_ERRORS = (err.DegenerateSignal, err.DegenerateDisparity,
                     err.NoDiscordance, err.NoVariation, err.EmptyIncidence,
                     err.PhaseUndefined, err.EmptySegmentation,
                     err.PartialFailure)


def _parse_blocks(text: str) -> list[list[int]]:
    """'0-3;4-7' -> [[0,1,2,3],[4,5,6,7]]."""
    blocks = []
    for part in text.split(";"):
        part = part.strip()
        if not part:
            continue
        if "-" in part:
            lo, hi = part.split("-")
            blocks.append(list(range(int(lo), int(hi) + 1)))
        else:
            blocks.append([int(v) for v in part.split(",")])
    return blocks


def cmd_synth(args) -> int:
    labels = None
    if args.subject is not None:
        labels = eio.TrialLabels(args.subject, args.video or 0,
                                 args.valence or 0.0, args.arousal or 0.0)
    spec = syn.SynthSpec(
        n_channels=args.channels, sample_rate=args.rate,
        duration_s=args.duration, kind=args.kind,
        blocks=_parse_blocks(args.blocks) if args.blocks else (),
        noise_sigma=args.noise, freq_hz=args.freq,
        chain_edges=[tuple(int(v) for v in e.split(","))
                     for e in args.chain.split(";")] if args.chain else (),
        labels=labels)
    rec = syn.synth_generate(spec, seed=args.seed)
    eio.save_recording(rec, args.out)
    print(f"synth: wrote {rec.layout.n_electrodes} channels x "
          f"{rec.n_samples} samples to {args.out}")
    return 0


def _load_input(path: str, rate: float) -> eio.EegRecording:
    p = Path(path)
    if not p.exists():
        raise err.FormatError(f"input file not found: {p}")
    if p.suffix == ".csv":
        return eio.load_csv(p, sample_rate=rate)
    return eio.load_recording(p)


def _band_matrices(banded: fb.BandedSegment, measure: str, bins: int):
    return [conn.connectivity_matrix(banded, b, measure, bins=bins)
            for b in range(banded.n_bands)]


def _extract_matrices(rec, args):
    """Per-segment, per-band connectivity matrices plus stage timing."""
    bank = fb.canonical_bank(rec.sample_rate)
    segs = eio.segment(rec, args.window, args.overlap)
    t0 = time.perf_counter()
    workers = args.workers or os.cpu_count() or 1
    with ThreadPoolExecutor(max_workers=workers) as pool:
        banded = list(pool.map(
            lambda s: fb.apply_filterbank(s, bank), segs))
    t1 = time.perf_counter()
    with ThreadPoolExecutor(max_workers=workers) as pool:
        per_seg = list(pool.map(
            lambda b: _band_matrices(b, args.measure, args.bins), banded))
    t2 = time.perf_counter()
    print(f"extract: {len(segs)} segments, {len(bank)} bands "
          f"(filter {t1 - t0:.2f}s, connectivity {t2 - t1:.2f}s)")
    return segs, per_seg


def _resolve_order(rec, per_seg, args) -> ordm.ElectrodeOrder:
    names = rec.layout.names
    if getattr(args, "order_file", None):
        return ordm.load_order(args.order_file, names)
    strategy = args.order
    if strategy == "identity":
        return ordm.ElectrodeOrder(
            perm=tuple(range(len(names))), strategy="identity")
    if strategy in ("dist", "dist-restr"):
        fn = (ordm.greedy_dist_order if strategy == "dist"
              else ordm.greedy_dist_restr_order)
        return fn(rec.layout, start=args.start_electrode)
    mode = {"data-global": "global", "data-local": "local"}[strategy]
    all_mats = [m for mats in per_seg for m in mats]
    return ordm.order_from_connectivity(all_mats, mode,
                                        restarts=args.restarts,
                                        seed=args.seed)


def cmd_extract(args) -> int:
    rec = _load_input(args.infile, args.rate)
    _, per_seg = _extract_matrices(rec, args)
    order = _resolve_order(rec, per_seg, args)
    tensors = [ten.stack_bands(mats, order, labels=rec.labels)
               for mats in per_seg]
    ten.export_tensors(tensors, args.out)
    ten.write_manifest(tensors, str(args.out) + ".manifest.txt")
    ordm.save_order(order, rec.layout.names, str(args.out) + ".order.txt",
                    seed=args.seed)
    shp = tensors[0].shape
    print(f"extract: wrote {len(tensors)} tensors of shape "
          f"{shp[0]}x{shp[1]}x{shp[2]} to {args.out}")
    return 0


def cmd_order(args) -> int:
    if args.strategy in ("dist", "dist-restr"):
        from .layout import canonical_layout
        layout = (canonical_layout() if args.infile is None
                  else _load_input(args.infile, args.rate).layout)
        fn = (ordm.greedy_dist_order if args.strategy == "dist"
              else ordm.greedy_dist_restr_order)
        order = fn(layout, start=args.start_electrode)
        names = layout.names
    else:
        if args.infile is None:
            raise err.SpecError("data-driven orderings need --in")
        rec = _load_input(args.infile, args.rate)
        args.order = args.strategy
        _, per_seg = _extract_matrices(rec, args)
        order = _resolve_order(rec, per_seg, args)
        names = rec.layout.names
    ordm.save_order(order, names, args.out, seed=args.seed)
    stress = "" if order.stress is None else f" (stress {order.stress:.6g})"
    print(f"order: {order.strategy}{stress} -> {args.out}")
    return 0


def cmd_concentrate(args) -> int:
    from .layout import canonical_layout
    names = canonical_layout().names
    if args.order_file:
        order = ordm.load_order(args.order_file, names)
    else:
        order = ordm.ElectrodeOrder(perm=tuple(range(len(names))),
                                    strategy="identity")
    n_e = len(order.perm)
    rows = []
    measures = ["PCC", "PLV"] if args.measure == "both" \
        else [args.measure.upper()]
    sides = ["low", "high"] if args.side == "both" else [args.side]
    for measure in measures:
        ps = met.PAIR_SETS[measure]
        for side in sides:
            pairs = met.pairs_to_indices(getattr(ps, side), names)
            c = met.concentrativeness(order, pairs, args.kernel, n_e)
            rows.append((measure, side, args.kernel, c))
    if args.format == "csv":
        print("measure,side,kernel,concentrativeness")
        for m, sd, s, c in rows:
            print(f"{m},{sd},{s},{c:.6f}")
    else:
        for m, sd, s, c in rows:
            print(f"concentrativeness {m} {sd}-valence s={s}: {c:.6f}")
    return 0


def read_predictions(path) -> list[met.PredictionRecord]:
    with open(path, newline="") as f:
        reader = csv.reader(f)
        header = next(reader)
        if [h.strip() for h in header[:3]] != ["instance_id", "true",
                                               "predicted"]:
            raise err.FormatError(
                f"{path}: expected header instance_id,true,predicted")
        return [met.PredictionRecord(int(r[0]), int(r[1]), int(r[2]))
                for r in reader if r]


def cmd_stats(args) -> int:
    systems = {Path(p).stem: read_predictions(p) for p in args.preds}
    names = list(systems)
    base_ids = [r.instance_id for r in systems[names[0]]]
    for name in names[1:]:
        if [r.instance_id for r in systems[name]] != base_ids:
            raise err.AlignmentError(
                f"instance ids in {name} do not align with {names[0]}")
    rows = []
    for a, b in combinations(names, 2):
        try:
            res = met.mcnemar(systems[a], systems[b],
                              continuity=args.continuity)
            rows.append((a, b, f"{res['chi2']:.4f}", f"{res['p']:.4g}",
                         res["b_count"], res["c_count"]))
        except err.NoDiscordance:
            rows.append((a, b, "no-discordance", "-", 0, 0))
    if args.format == "csv":
        print("system_a,system_b,chi2,p,b,c")
        for r in rows:
            print(",".join(str(v) for v in r))
    else:
        for a, b, chi2, p, bc, cc in rows:
            print(f"McNemar {a} vs {b}: chi2={chi2} p={p} (b={bc}, c={cc})")
    return 0


def cmd_report(args) -> int:
    preds = read_predictions(args.pred)
    meta = {}
    if args.labels:
        with open(args.labels, newline="") as f:
            reader = csv.reader(f)
            next(reader)  # instance_id,subject,video,valence
            for r in reader:
                if r:
                    meta[int(r[0])] = (int(r[1]), int(r[2]), float(r[3]))
        preds = [met.PredictionRecord(
            p.instance_id, p.true_label, p.predicted,
            subject_id=meta[p.instance_id][0],
            video_id=meta[p.instance_id][1],
            valence=meta[p.instance_id][2]) for p in preds]
    report = met.error_report(preds, args.group_by)
    if args.format == "csv":
        print("group,wrong,total,error_rate")
        for key, row in report.items():
            print(f"{key},{row['wrong']},{row['total']},"
                  f"{row['error_rate']:.4f}")
    else:
        for key, row in report.items():
            print(f"{args.group_by} {key}: {row['wrong']}/{row['total']} "
                  f"wrong ({100 * row['error_rate']:.1f}%)")
    return 0


def _add_extract_flags(p):
    p.add_argument("--measure", default="pcc",
                   choices=["pcc", "plv", "te", "PCC", "PLV", "TE"])
    p.add_argument("--window", type=float, default=3.0)
    p.add_argument("--overlap", type=float, default=2.5)
    p.add_argument("--bins", type=int, default=conn.DEFAULT_TE_BINS)
    p.add_argument("--restarts", type=int, default=ordm.DEFAULT_RESTARTS)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--start-electrode", default="Fp1")
    p.add_argument("--rate", type=float, default=128.0,
                   help="sample rate for CSV inputs")
    p.add_argument("--workers", type=int, default=0,
                   help="0 = available parallelism")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="eegconn",
        description="EEG connectivity tensors, electrode orderings, and "
                    "classifier statistics")
    ap.add_argument("--config", help="flat key=value file; flags win")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("synth", help="generate a synthetic recording")
    p.add_argument("--kind", default="blocks",
                   choices=["blocks", "phase", "chain"])
    p.add_argument("--channels", type=int, default=32)
    p.add_argument("--rate", type=float, default=128.0)
    p.add_argument("--duration", type=float, default=60.0)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--blocks", help="e.g. '0-15;16-31'")
    p.add_argument("--chain", help="e.g. '0,1;1,2' as src,dst pairs")
    p.add_argument("--noise", type=float, default=0.1)
    p.add_argument("--freq", type=float, default=10.0)
    p.add_argument("--subject", type=int)
    p.add_argument("--video", type=int)
    p.add_argument("--valence", type=float)
    p.add_argument("--arousal", type=float)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("extract", help="recording -> CTEN tensor file")
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--order", default="identity",
                   choices=["identity", "dist", "dist-restr",
                            "data-global", "data-local"])
    p.add_argument("--order-file")
    p.add_argument("--out", required=True)
    _add_extract_flags(p)
    p.set_defaults(func=cmd_extract)

    p = sub.add_parser("order", help="compute an electrode ordering")
    p.add_argument("--strategy", required=True,
                   choices=["dist", "dist-restr", "data-global",
                            "data-local"])
    p.add_argument("--in", dest="infile")
    p.add_argument("--out", required=True)
    _add_extract_flags(p)
    p.set_defaults(func=cmd_order)

    p = sub.add_parser("concentrate",
                       help="valence-pair concentrativeness of an ordering")
    p.add_argument("--order-file")
    p.add_argument("--measure", default="both",
                   choices=["PCC", "PLV", "pcc", "plv", "both"])
    p.add_argument("--side", default="both", choices=["low", "high", "both"])
    p.add_argument("-s", "--kernel", type=int, default=3,
                   choices=[1, 3, 5, 7])
    p.add_argument("--format", default="text", choices=["csv", "text"])
    p.set_defaults(func=cmd_concentrate)

    p = sub.add_parser("stats", help="all-pairs McNemar over prediction files")
    p.add_argument("preds", nargs="+")
    p.add_argument("--continuity", action="store_true")
    p.add_argument("--format", default="text", choices=["csv", "text"])
    p.set_defaults(func=cmd_stats)

    p = sub.add_parser("report", help="per-group error rates")
    p.add_argument("--pred", required=True)
    p.add_argument("--labels", help="CSV instance_id,subject,video,valence")
    p.add_argument("--group-by", default="subject",
                   choices=["subject", "video", "valence_side"])
    p.add_argument("--format", default="text", choices=["csv", "text"])
    p.set_defaults(func=cmd_report)
    return ap


def _config_args(path: str) -> list[str]:
    out = []
    with open(path) as f:
        for line in f:
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            key, _, val = line.partition("=")
            out.append(f"--{key.strip().replace('_', '-')}={val.strip()}")
    return out


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    # config file values act as defaults: insert them after the subcommand
    if "--config" in argv:
        i = argv.index("--config")
        cfg = argv[i + 1]
        del argv[i:i + 2]
        if not argv:
            print("error: --config requires a subcommand", file=sys.stderr)
            return 3
        argv = [argv[0]] + _config_args(cfg) + argv[1:]
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if hasattr(args, "measure"):
            args.measure = args.measure.upper()
        return args.func(args)
    except IO_ERRORS as e:
        print(f"error [{type(e).__name__}]: {e}", file=sys.stderr)
        return 2
    except VALIDATION_ERRORS as e:
        print(f"error [{type(e).__name__}]: {e}", file=sys.stderr)
        return 3
    except DEGENERACY_ERRORS as e:
        print(f"error [{type(e).__name__}]: {e}", file=sys.stderr)
        return 4


if __name__ == "__main__":
    sys.exit(main())
