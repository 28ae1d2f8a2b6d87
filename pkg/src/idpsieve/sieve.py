"""Predict-then-verify scan over a full grid of q-vectors."""

from __future__ import annotations

import itertools
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .binning import relevant_set
from .hilbert import is_idp
from .neuralnet import Params, forward, sigmoid
from .simplex import QVector


@dataclass
class ScanReport:
    d: int
    bound: int
    eta: float
    tau: int
    scanned: int = 0
    predicted_positive: int = 0
    verified_positive: int | None = None
    exhaustive_positive: int | None = None
    caught_positive: int | None = None
    seconds: float = 0.0

    @property
    def precision(self) -> float | None:
        if self.verified_positive is None or not self.predicted_positive:
            return None
        return self.verified_positive / self.predicted_positive

    @property
    def sensitivity(self) -> float | None:
        if self.exhaustive_positive is None or not self.exhaustive_positive:
            return None
        return self.caught_positive / self.exhaustive_positive

    def lines(self) -> list[str]:
        def ratio(x):
            return "n/a" if x is None else f"{x:.4f}"

        out = [
            f"grid: d={self.d} bound={self.bound}",
            f"eta={self.eta:g} tau={self.tau}",
            f"scanned: {self.scanned}",
            f"predicted_positive: {self.predicted_positive}",
        ]
        if self.verified_positive is not None:
            out += [f"verified_positive: {self.verified_positive}", f"precision: {ratio(self.precision)}"]
        if self.exhaustive_positive is not None:
            out += [f"idp_in_grid: {self.exhaustive_positive}", f"sensitivity: {ratio(self.sensitivity)}"]
        out.append(f"seconds: {self.seconds:.2f}")
        return out


def grid(d: int, bound: int):
    """All q in {1..bound}^d in lexicographic order."""
    return itertools.product(range(1, bound + 1), repeat=d)


def _chunks(it, size):
    while True:
        block = list(itertools.islice(it, size))
        if not block:
            return
        yield block


def _idp_flags(qs: list[tuple[int, ...]]) -> list[bool]:
    return [is_idp(QVector(q)) for q in qs]


def _exact_map(qs, jobs: int) -> list[bool]:
    if jobs <= 1 or len(qs) < 256:
        return _idp_flags(qs)
    step = -(-len(qs) // (4 * jobs))
    parts = [qs[i : i + step] for i in range(0, len(qs), step)]
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        # map preserves submission order, so output stays lexicographic
        return [flag for part in pool.map(_idp_flags, parts) for flag in part]


def scan(
    p: Params,
    d: int,
    bound: int,
    eta: float,
    tau: int,
    verify: bool = False,
    exhaustive: bool = False,
    positives_out=None,
    jobs: int = 1,
    chunk: int = 8192,
) -> tuple[ScanReport, list[tuple[int, ...]]]:
    """Apply the learned IDP verdict to every grid point; optionally verify exactly."""
    widths = p.widths
    if widths[0] != d or widths[-1] != len(relevant_set(d)):
        raise ValueError(
            f"model widths {widths} need input {d} and output {len(relevant_set(d))}"
        )
    start = time.perf_counter()
    report = ScanReport(d, bound, eta, tau)
    predicted: list[tuple[int, ...]] = []
    for block in _chunks(grid(d, bound), chunk):
        logits, _ = forward(p, np.array(block, dtype=np.float64))
        counts = (sigmoid(logits) > eta).sum(axis=1)
        report.scanned += len(block)
        predicted += [q for q, c in zip(block, counts) if c <= tau]
    report.predicted_positive = len(predicted)
    if verify:
        report.verified_positive = sum(_exact_map(predicted, jobs))
    if exhaustive:
        all_q = list(grid(d, bound))
        flags = _exact_map(all_q, jobs)
        truth = {q for q, f in zip(all_q, flags) if f}
        report.exhaustive_positive = len(truth)
        report.caught_positive = sum(q in truth for q in predicted)
        if report.verified_positive is None:
            report.verified_positive = report.caught_positive
    report.seconds = time.perf_counter() - start
    if positives_out is not None:
        text = "".join(",".join(map(str, q)) + "\n" for q in predicted)
        Path(positives_out).write_text(text, encoding="utf-8")
    return report, predicted
