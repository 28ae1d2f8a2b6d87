"""Labeled datasets, training with early stopping, prediction and evaluation metrics."""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np

from .binning import bins_of, format_ranks, hib, parse_ranks, relevant_set
from .hilbert import HilbertBasis, reduce_candidates
from .neuralnet import NetSpec, Params, backward, forward, init_params, loss_bce, sgd_step, sigmoid
from .simplex import QVector, as_qvector, fpp_numerators, fpp_points

log = logging.getLogger(__name__)

DATA_HEADER = "# idpdata 1"


@dataclass(frozen=True)
class LabeledExample:
    q: QVector
    positives: tuple[int, ...]

    @property
    def idp(self) -> bool:
        return not self.positives


@dataclass
class Dataset:
    d: int
    bound: int
    seed: int
    examples: list[LabeledExample]

    def __len__(self) -> int:
        return len(self.examples)

    def inputs(self) -> np.ndarray:
        return np.array([e.q.q for e in self.examples], dtype=np.float64)

    def labels(self) -> np.ndarray:
        out = np.zeros((len(self.examples), len(relevant_set(self.d))))
        for i, e in enumerate(self.examples):
            out[i, list(e.positives)] = 1.0
        return out

    def subset(self, idx) -> "Dataset":
        return Dataset(self.d, self.bound, self.seed, [self.examples[i] for i in idx])


def label(q) -> LabeledExample:
    q = as_qvector(q)
    return LabeledExample(q, hib(q).positives)


def generate_dataset(d: int, bound: int, count: int, seed: int) -> Dataset:
    """Draw q-vectors uniformly from {1..bound}^d with replacement and label them exactly."""
    if bound < 1 or count < 1:
        raise ValueError("bound and count must be positive")
    rng = np.random.default_rng(seed)
    qs = rng.integers(1, bound + 1, size=(count, d))
    return Dataset(d, bound, seed, [label(tuple(int(v) for v in q)) for q in qs])


def save_dataset(ds: Dataset, path) -> None:
    rel = len(relevant_set(ds.d))
    lines = [f"{DATA_HEADER} d={ds.d} bound={ds.bound} seed={ds.seed} relevant={rel}"]
    lines += [f"{e.q}|{format_ranks(e.positives)}" for e in ds.examples]
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def load_dataset(path, check_fraction: float = 0.01, seed: int = 0) -> Dataset:
    """Read a dataset file; a random ``check_fraction`` of records is relabeled and compared."""
    lines = Path(path).read_text(encoding="utf-8").splitlines()
    if not lines or not lines[0].startswith(DATA_HEADER):
        raise ValueError(f"{path}: not an idpdata file")
    meta = dict(tok.split("=", 1) for tok in lines[0][len(DATA_HEADER):].split())
    d, bound, file_seed = int(meta["d"]), int(meta["bound"]), int(meta["seed"])
    if int(meta["relevant"]) != len(relevant_set(d)):
        raise ValueError(f"{path}: relevant-set size {meta['relevant']} does not match d={d}")
    examples = []
    for lineno, line in enumerate(lines[1:], start=2):
        if not line.strip():
            continue
        qtext, _, ranks = line.partition("|")
        q = QVector.parse(qtext)
        if q.d != d:
            raise ValueError(f"{path}:{lineno}: q-vector has dimension {q.d}, expected {d}")
        examples.append(LabeledExample(q, parse_ranks(ranks)))
    ds = Dataset(d, bound, file_seed, examples)
    if examples and check_fraction > 0:
        rng = np.random.default_rng(seed)
        k = max(1, int(round(check_fraction * len(examples))))
        for i in rng.choice(len(examples), size=min(k, len(examples)), replace=False):
            e = examples[i]
            if label(e.q).positives != e.positives:
                raise ValueError(f"{path}: labels for q={e.q} do not match the exact computation")
    return ds


def split(ds: Dataset, fraction: float, seed: int) -> tuple[Dataset, Dataset]:
    """Seeded shuffle; the last ``round(fraction * n)`` records become validation."""
    if not 0 < fraction < 1:
        raise ValueError("fraction must be in (0, 1)")
    n = len(ds)
    n_val = min(max(1, math.floor(fraction * n + 0.5)), n - 1) if n > 1 else 0
    order = np.random.default_rng(seed).permutation(n)
    return ds.subset(order[: n - n_val]), ds.subset(order[n - n_val :])


@dataclass
class TrainingLog:
    evaluations: list[tuple[int, float]] = field(default_factory=list)
    best_update: int = 0
    stopped_early: bool = False

    @property
    def initial_loss(self) -> float:
        return self.evaluations[0][1]

    @property
    def best_loss(self) -> float:
        return min(v for _, v in self.evaluations)


def mean_loss(p: Params, x: np.ndarray, y: np.ndarray, beta: float, chunk: int = 1024) -> float:
    total = 0.0
    for start in range(0, len(x), chunk):
        logits, _ = forward(p, x[start : start + chunk])
        total += loss_bce(logits, y[start : start + chunk], beta)
    return total / len(x)


def scale_first_layer(p: Params, factor: float) -> Params:
    """Params acting on ``x`` the way ``p`` acts on ``factor * x``."""
    return Params((p.weights[0] * factor,) + p.weights[1:], p.biases)


def train(
    spec: NetSpec,
    train_set: Dataset,
    val_set: Dataset,
    updates: int = 100_000,
    eval_every: int = 1000,
    patience: int = 10,
) -> tuple[Params, TrainingLog]:
    """Mini-batch SGD on the balanced cross entropy with validation early stopping.

    Inputs are scaled by ``1/bound`` during training; the returned parameters
    have that scaling folded into the first layer, so they take raw q-vectors.
    Returns the parameters with the best validation loss.
    """
    d = train_set.d
    out = len(relevant_set(d))
    if spec.widths[0] != d or spec.widths[-1] != out:
        raise ValueError(f"network widths {spec.widths} need input {d} and output {out}")
    scale = 1.0 / train_set.bound
    x_tr, y_tr = train_set.inputs() * scale, train_set.labels()
    x_va, y_va = val_set.inputs() * scale, val_set.labels()

    p = init_params(spec)
    rng = np.random.default_rng([spec.seed & 0xFFFFFFFFFFFFFFFF, 1])
    history = TrainingLog()
    best_p, best_loss = p, mean_loss(p, x_va, y_va, spec.beta)
    history.evaluations.append((0, best_loss))
    stale = 0
    order, cursor = rng.permutation(len(x_tr)), 0
    for step in range(1, updates + 1):
        if cursor + spec.batch_size > len(order):
            order, cursor = rng.permutation(len(x_tr)), 0
        idx = order[cursor : cursor + spec.batch_size]
        cursor += spec.batch_size
        g = backward(p, x_tr[idx], y_tr[idx], spec.beta, l2=spec.l2)
        p = sgd_step(p, [g], spec.epsilon)
        if step % eval_every == 0 or step == updates:
            v = mean_loss(p, x_va, y_va, spec.beta)
            history.evaluations.append((step, v))
            log.info("update %d: validation loss %.6f", step, v)
            if v < best_loss:
                best_p, best_loss, stale = p, v, 0
                history.best_update = step
            else:
                stale += 1
                if stale >= patience:
                    history.stopped_early = True
                    break
    return scale_first_layer(best_p, scale), history


def predict_logits(p: Params, qs) -> np.ndarray:
    x = np.array([as_qvector(q).q for q in qs], dtype=np.float64)
    logits, _ = forward(p, x)
    return logits


def predict_hib(p: Params, q, eta: float) -> np.ndarray:
    """0/1 vector over the relevant set: positive iff sigmoid(logit) > eta."""
    return (sigmoid(predict_logits(p, [q])[0]) > eta).astype(np.int8)


def predict_idp(p: Params, q, eta: float, tau: int = 0) -> int:
    return int(predict_hib(p, q, eta).sum() <= tau)


@dataclass(frozen=True)
class ConfusionTable:
    tn: int = 0
    fp: int = 0
    fn: int = 0
    tp: int = 0

    def __add__(self, other: "ConfusionTable") -> "ConfusionTable":
        return ConfusionTable(
            self.tn + other.tn, self.fp + other.fp, self.fn + other.fn, self.tp + other.tp
        )

    @property
    def total(self) -> int:
        return self.tn + self.fp + self.fn + self.tp

    @staticmethod
    def _ratio(num: int, den: int) -> float | None:
        return num / den if den else None

    @property
    def specificity(self) -> float | None:
        return self._ratio(self.tn, self.tn + self.fp)

    @property
    def sensitivity(self) -> float | None:
        return self._ratio(self.tp, self.tp + self.fn)

    @property
    def precision(self) -> float | None:
        return self._ratio(self.tp, self.tp + self.fp)

    def render(self) -> str:
        w = max(len(f"{v:,}") for v in (self.tn, self.fp, self.fn, self.tp)) + 2
        return "\n".join(
            [
                f"{'':10}{'PREDICTED 0':>{max(w, 13)}}{'PREDICTED 1':>{max(w, 13)}}",
                f"{'ACTUAL 0':10}{self.tn:>{max(w, 13)},}{self.fp:>{max(w, 13)},}",
                f"{'ACTUAL 1':10}{self.fn:>{max(w, 13)},}{self.tp:>{max(w, 13)},}",
            ]
        )


def fmt_ratio(x: float | None, digits: int = 3) -> str:
    return "n/a" if x is None else f"{x:.{digits}f}"


def confusion(pred, truth) -> ConfusionTable:
    pred = np.asarray(pred).astype(bool)
    truth = np.asarray(truth).astype(bool)
    if pred.shape != truth.shape:
        raise ValueError(f"prediction shape {pred.shape} differs from truth {truth.shape}")
    return ConfusionTable(
        tn=int(np.sum(~pred & ~truth)),
        fp=int(np.sum(pred & ~truth)),
        fn=int(np.sum(~pred & truth)),
        tp=int(np.sum(pred & truth)),
    )


def aggregate_confusion(p: Params, ds: Dataset, eta: float) -> ConfusionTable:
    """Entry-wise sum of per-example HIB confusion tables."""
    probs = sigmoid(predict_logits(p, [e.q for e in ds.examples]))
    return confusion(probs > eta, ds.labels() > 0)


@dataclass(frozen=True)
class SweepRow:
    eta: float
    tau: int
    predicted: int
    true_pos: int
    precision: float | None
    sensitivity: float | None

    def csv(self) -> str:
        return (
            f"{self.eta:g},{self.tau},{self.predicted},{self.true_pos},"
            f"{fmt_ratio(self.precision, 6)},{fmt_ratio(self.sensitivity, 6)}"
        )


SWEEP_HEADER = "eta,tau,predicted,true_pos,precision,sensitivity"


def sweep_counts(
    positive_counts: np.ndarray, truth_idp: np.ndarray, etas: Sequence[float], taus: Sequence[int]
) -> list[SweepRow]:
    """Rows from per-eta predicted positive-bin counts (``positive_counts[i_eta, example]``)."""
    truth_idp = np.asarray(truth_idp, dtype=bool)
    total_true = int(truth_idp.sum())
    rows = []
    for eta, counts in zip(etas, positive_counts):
        for tau in taus:
            pred = counts <= tau
            table = confusion(pred, truth_idp)
            rows.append(
                SweepRow(
                    float(eta), tau, int(pred.sum()), table.tp, table.precision,
                    table.tp / total_true if total_true else None,
                )
            )
    return rows


def sweep(p: Params, ds: Dataset, etas: Sequence[float], taus: Sequence[int]) -> list[SweepRow]:
    """Precision and sensitivity of the IDP verdicts for every (eta, tau) pair."""
    if not etas or not taus:
        raise ValueError("eta and tau lists must be non-empty")
    probs = sigmoid(predict_logits(p, [e.q for e in ds.examples]))
    counts = np.array([(probs > eta).sum(axis=1) for eta in etas])
    truth = np.array([e.idp for e in ds.examples])
    return sweep_counts(counts, truth, etas, taus)


def approx_hilbert_basis(p: Params, q, eta: float) -> HilbertBasis:
    """Reduce the parallelepiped points lying in predicted-positive or unscored bins."""
    q = as_qvector(q)
    rel = relevant_set(q.d)
    predicted = predict_hib(p, q, eta).astype(bool)
    positions = rel.positions(bins_of(fpp_numerators(q), q.N, q.d))
    keep = positions < 0
    if len(rel):
        keep |= predicted[np.maximum(positions, 0)]
    points = fpp_points(q)
    return reduce_candidates(q, [z for z, k in zip(points, keep) if k])
