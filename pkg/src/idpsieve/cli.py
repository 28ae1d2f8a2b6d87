"""Command-line entry point: ``idpsieve {exact,gen,train,eval,sweep,scan}``."""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

import numpy as np

from . import trainer
from .binning import bins_of, relevant_set
from .hilbert import hilbert_basis, is_idp, is_idp_bins
from .neuralnet import ModelFormatError, NetSpec, load_params, save_params
from .sieve import scan
from .simplex import QVector, hstar, is_unimodal

log = logging.getLogger("idpsieve")

PAPER_HIDDEN = "100,400,800,3000"


def _floats(text: str) -> list[float]:
    return [float(t) for t in text.split(",") if t.strip()]


def _ints(text: str) -> list[int]:
    return [int(t) for t in text.split(",") if t.strip()]


def cmd_exact(args) -> int:
    q = QVector.parse(args.q)
    h = hstar(q)
    basis = hilbert_basis(q)
    print(f"q: {q}")
    print(f"d: {q.d}")
    print(f"N: {q.N}")
    print(f"h*: {','.join(map(str, h))}")
    print(f"unimodal: {str(is_unimodal(h)).lower()}")
    print(f"hilbert_extras: {len(basis.extras)}")
    for z in basis.extras:
        alpha = bins_of(np.array([z.weights.numerators]), q.N, q.d)[0]
        coords = ",".join(map(str, z.coords))
        weights = ",".join(f"{n}/{q.N}" for n in z.weights.numerators)
        print(f"  height={z.height} point=({coords}) weights=({weights}) bin=({','.join(map(str, alpha))})")
    print(f"idp_height: {str(is_idp(q)).lower()}")
    print(f"idp_bins: {str(is_idp_bins(q)).lower()}")
    return 0


def cmd_gen(args) -> int:
    ds = trainer.generate_dataset(args.d, args.bound, args.count, args.seed)
    trainer.save_dataset(ds, args.out)
    n_idp = sum(e.idp for e in ds.examples)
    print(f"wrote {len(ds)} examples to {args.out} ({n_idp} IDP, relevant={len(relevant_set(args.d))})")
    return 0


def cmd_train(args) -> int:
    ds = trainer.load_dataset(args.data)
    tr, va = trainer.split(ds, args.val_fraction, args.seed)
    widths = (ds.d, *_ints(args.hidden), len(relevant_set(ds.d)))
    spec = NetSpec(widths, args.epsilon, args.beta, args.batch_size, args.seed, args.l2)
    params, history = trainer.train(spec, tr, va, args.updates, args.eval_every, args.patience)
    save_params(params, args.out)
    if args.val_out:
        trainer.save_dataset(va, args.val_out)
    meta = {
        "widths": list(widths),
        "relevant": len(relevant_set(ds.d)),
        "train": len(tr),
        "validation": len(va),
        "epsilon": args.epsilon,
        "beta": args.beta,
        "batch_size": args.batch_size,
        "seed": args.seed,
        "best_update": history.best_update,
        "stopped_early": history.stopped_early,
        "evaluations": history.evaluations,
    }
    Path(str(args.out) + ".json").write_text(json.dumps(meta, indent=2) + "\n", encoding="utf-8")
    print(f"validation loss {history.initial_loss:.4f} -> {history.best_loss:.4f} "
          f"(best at update {history.best_update}); model written to {args.out}")
    return 0


def cmd_eval(args) -> int:
    params = load_params(args.model)
    ds = trainer.load_dataset(args.data)
    table = trainer.aggregate_confusion(params, ds, args.eta)
    print(f"HIB confusion table over {len(ds)} examples (eta={args.eta:g}):")
    print(table.render())
    print(f"specificity: {trainer.fmt_ratio(table.specificity)}")
    print(f"sensitivity: {trainer.fmt_ratio(table.sensitivity)}")
    row = trainer.sweep(params, ds, [args.eta], [args.tau])[0]
    print(f"IDP verdicts (tau={args.tau}): {row.true_pos}/{row.predicted} predicted positives are IDP; "
          f"precision {trainer.fmt_ratio(row.precision)}, sensitivity {trainer.fmt_ratio(row.sensitivity)}")
    return 0


def cmd_sweep(args) -> int:
    params = load_params(args.model)
    ds = trainer.load_dataset(args.data)
    rows = trainer.sweep(params, ds, _floats(args.etas), _ints(args.taus))
    text = trainer.SWEEP_HEADER + "\n" + "".join(r.csv() + "\n" for r in rows)
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)
    return 0


def cmd_scan(args) -> int:
    params = load_params(args.model)
    report, _ = scan(
        params, args.d, args.bound, args.eta, args.tau,
        verify=args.verify, exhaustive=args.exhaustive, positives_out=args.out, jobs=args.jobs,
    )
    print("\n".join(report.lines()))
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="idpsieve", description=__doc__)
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("exact", help="exact Hilbert basis, h*-vector and IDP verdict")
    p.add_argument("q", help="comma-separated q-vector, e.g. 4,10,14,14")
    p.set_defaults(func=cmd_exact)

    p = sub.add_parser("gen", help="sample and label a dataset")
    p.add_argument("--d", type=int, default=4)
    p.add_argument("--bound", type=int, default=25)
    p.add_argument("--count", type=int, default=50_000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("train", help="train the HIB approximator")
    p.add_argument("--data", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--hidden", default=PAPER_HIDDEN, help="comma-separated hidden widths")
    p.add_argument("--epsilon", type=float, default=0.001)
    p.add_argument("--beta", type=float, default=10.0)
    p.add_argument("--batch-size", type=int, default=10)
    p.add_argument("--updates", type=int, default=100_000)
    p.add_argument("--eval-every", type=int, default=1000)
    p.add_argument("--patience", type=int, default=10)
    p.add_argument("--val-fraction", type=float, default=0.1)
    p.add_argument("--l2", type=float, default=0.0)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--val-out", help="also write the validation split here")
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("eval", help="aggregate confusion table on a labeled file")
    p.add_argument("--model", required=True)
    p.add_argument("--data", required=True)
    p.add_argument("--eta", type=float, default=0.1)
    p.add_argument("--tau", type=int, default=0)
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("sweep", help="precision/sensitivity over eta x tau")
    p.add_argument("--model", required=True)
    p.add_argument("--data", required=True)
    p.add_argument("--etas", default="0.05,0.12,0.25,0.5")
    p.add_argument("--taus", default="0,10,20,30")
    p.add_argument("--out")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("scan", help="predict IDP over a full grid, optionally verify")
    p.add_argument("--model", required=True)
    p.add_argument("--d", type=int, default=4)
    p.add_argument("--bound", type=int, default=25)
    p.add_argument("--eta", type=float, default=0.1)
    p.add_argument("--tau", type=int, default=65)
    p.add_argument("--verify", action="store_true")
    p.add_argument("--exhaustive", action="store_true")
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--out", help="write predicted-positive q-vectors here")
    p.set_defaults(func=cmd_scan)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(message)s")
    try:
        return args.func(args)
    except (ValueError, OverflowError, ModelFormatError, OSError) as exc:
        print(f"idpsieve: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
