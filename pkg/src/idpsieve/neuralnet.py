"""A from-scratch ReLU network: forward pass, backprop, losses, SGD and model files.

Weight matrices index outputs by row, so layer ``k`` maps ``x`` to
``W_k @ x + b_k``. Batched inputs are rows of a 2-D array.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

FORMAT_HEADER = "idpnet 1"

_MASK64 = (1 << 64) - 1
_GOLDEN = np.uint64(0x9E3779B97F4A7C15)
_MIX1 = np.uint64(0xBF58476D1CE4E5B9)
_MIX2 = np.uint64(0x94D049BB133111EB)


class ModelFormatError(ValueError):
    pass


@dataclass(frozen=True)
class NetSpec:
    widths: tuple[int, ...]
    epsilon: float = 0.001
    beta: float = 10.0
    batch_size: int = 10
    seed: int = 0
    l2: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "widths", tuple(int(w) for w in self.widths))
        if len(self.widths) < 2 or min(self.widths) < 1:
            raise ValueError(f"invalid layer widths {self.widths}")
        if not self.epsilon > 0:
            raise ValueError("learning rate must be positive")
        if self.batch_size < 1:
            raise ValueError("batch size must be positive")

    @property
    def m(self) -> int:
        """Number of hidden layers."""
        return len(self.widths) - 2


@dataclass(frozen=True)
class Params:
    weights: tuple[np.ndarray, ...]
    biases: tuple[np.ndarray, ...]

    @property
    def widths(self) -> tuple[int, ...]:
        return (self.weights[0].shape[1],) + tuple(w.shape[0] for w in self.weights)

    def arrays(self) -> list[np.ndarray]:
        out = []
        for w, b in zip(self.weights, self.biases):
            out += [w, b]
        return out

    def flat(self) -> np.ndarray:
        return np.concatenate([a.ravel() for a in self.arrays()])

    def bit_equal(self, other: "Params") -> bool:
        a, b = self.arrays(), other.arrays()
        return len(a) == len(b) and all(
            x.shape == y.shape and x.tobytes() == y.tobytes() for x, y in zip(a, b)
        )


# gradients share the parameter layout
Gradient = Params


def splitmix64(seed: int, count: int, offset: int = 0) -> np.ndarray:
    """Counter-based stream: draw ``i`` is splitmix64 of ``seed + (i+1) * golden``."""
    counter = np.arange(offset + 1, offset + count + 1, dtype=np.uint64)
    with np.errstate(over="ignore"):
        z = np.uint64(seed & _MASK64) + counter * _GOLDEN
        z = (z ^ (z >> np.uint64(30))) * _MIX1
        z = (z ^ (z >> np.uint64(27))) * _MIX2
    return z ^ (z >> np.uint64(31))


def uniform01(seed: int, count: int, offset: int = 0) -> np.ndarray:
    """Doubles in [0, 1) from the top 53 bits of each draw."""
    return (splitmix64(seed, count, offset) >> np.uint64(11)).astype(np.float64) * 2.0**-53


def init_params(spec: NetSpec) -> Params:
    """Uniform fan-balanced weights, zero biases.

    Draws are consumed layer by layer and row-major within each matrix.
    """
    weights, biases = [], []
    offset = 0
    for fan_in, fan_out in zip(spec.widths[:-1], spec.widths[1:]):
        s = math.sqrt(6.0 / (fan_in + fan_out))
        n = fan_in * fan_out
        u = uniform01(spec.seed, n, offset)
        offset += n
        weights.append((s * (2.0 * u - 1.0)).reshape(fan_out, fan_in))
        biases.append(np.zeros(fan_out))
    return Params(tuple(weights), tuple(biases))


def relu(x):
    return np.maximum(x, 0.0)


def sigmoid(x):
    x = np.asarray(x, dtype=np.float64)
    e = np.exp(-np.abs(x))
    out = np.where(x >= 0, 1.0 / (1.0 + e), e / (1.0 + e))
    return out if out.ndim else float(out)


def softplus(x):
    """``log(1 + e^x)`` without overflow."""
    x = np.asarray(x, dtype=np.float64)
    return np.maximum(x, 0.0) + np.log1p(np.exp(-np.abs(x)))


@dataclass
class ForwardCache:
    inputs: np.ndarray
    pre: list[np.ndarray] = field(default_factory=list)
    post: list[np.ndarray] = field(default_factory=list)


def forward(p: Params, x) -> tuple[np.ndarray, ForwardCache]:
    """Evaluate the network on one input (1-D) or a batch (rows)."""
    x = np.asarray(x, dtype=np.float64)
    single = x.ndim == 1
    a = x[None, :] if single else x
    if a.shape[1] != p.weights[0].shape[1]:
        raise ValueError(f"input width {a.shape[1]} does not match {p.weights[0].shape[1]}")
    cache = ForwardCache(a)
    last = len(p.weights) - 1
    for k, (w, b) in enumerate(zip(p.weights, p.biases)):
        z = a @ w.T + b
        cache.pre.append(z)
        a = z if k == last else relu(z)
        cache.post.append(a)
    return (a[0] if single else a), cache


def loss_euclid(p: Params, x, y_true) -> float:
    y_hat, _ = forward(p, x)
    return float(np.linalg.norm(np.asarray(y_true, dtype=np.float64) - y_hat))


def loss_bce(logits, labels, beta: float = 1.0) -> float:
    """Balanced binary cross entropy, summed over coordinates (and over rows if batched)."""
    t = np.asarray(logits, dtype=np.float64)
    y = np.asarray(labels, dtype=np.float64)
    if t.shape != y.shape:
        raise ValueError("logits and labels differ in shape")
    return float(np.sum((1.0 - y) * softplus(t) + beta * y * softplus(-t)))


def _output_grad(logits: np.ndarray, labels: np.ndarray, beta: float, loss: str) -> np.ndarray:
    if loss == "bce":
        return (1.0 - labels) * sigmoid(logits) - beta * labels * sigmoid(-logits)
    if loss == "euclid":
        diff = logits - labels
        norm = np.linalg.norm(diff, axis=1, keepdims=True)
        return np.divide(diff, norm, out=np.zeros_like(diff), where=norm > 0)
    raise ValueError(f"unknown loss {loss!r}")


def backward(p: Params, x, labels, beta: float = 1.0, loss: str = "bce", l2: float = 0.0) -> Gradient:
    """Gradient of the loss, averaged over the rows of a batch.

    ``loss`` is ``"bce"`` (balanced cross entropy on logits) or ``"euclid"``
    (the Euclidean distance between labels and outputs). The ReLU derivative
    at exactly 0 is taken to be 0.
    """
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(labels, dtype=np.float64)
    if x.ndim == 1:
        x, y = x[None, :], y.reshape(1, -1)
    logits, cache = forward(p, x)
    delta = _output_grad(logits, y, beta, loss) / len(x)
    gw, gb = [None] * len(p.weights), [None] * len(p.weights)
    for k in range(len(p.weights) - 1, -1, -1):
        a_prev = cache.post[k - 1] if k > 0 else cache.inputs
        gw[k] = delta.T @ a_prev
        gb[k] = delta.sum(axis=0)
        if k > 0:
            delta = (delta @ p.weights[k]) * (cache.pre[k - 1] > 0)
    if l2:
        gw = [g + 2.0 * l2 * w for g, w in zip(gw, p.weights)]
        gb = [g + 2.0 * l2 * b for g, b in zip(gb, p.biases)]
    return Gradient(tuple(gw), tuple(gb))


def sgd_step(p: Params, gradients: list[Gradient], epsilon: float) -> Params:
    """``p - epsilon * mean(gradients)``, reduced in list order."""
    if not gradients:
        raise ValueError("need at least one gradient")
    n = len(gradients)
    weights, biases = [], []
    for k in range(len(p.weights)):
        gw = gradients[0].weights[k]
        gb = gradients[0].biases[k]
        for g in gradients[1:]:
            gw = gw + g.weights[k]
            gb = gb + g.biases[k]
        weights.append(p.weights[k] - epsilon * (gw / n))
        biases.append(p.biases[k] - epsilon * (gb / n))
    return Params(tuple(weights), tuple(biases))


def _hex_line(values) -> str:
    return " ".join(float(v).hex() for v in values)


def save_params(p: Params, path) -> None:
    lines = [FORMAT_HEADER, " ".join(str(w) for w in p.widths)]
    for k, (w, b) in enumerate(zip(p.weights, p.biases), start=1):
        lines.append(f"W {k}")
        lines.extend(_hex_line(row) for row in w)
        lines.append(f"b {k}")
        lines.append(_hex_line(b))
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def _parse_floats(line: str, expected: int, where: str) -> list[float]:
    toks = line.split()
    if len(toks) != expected:
        raise ModelFormatError(f"{where}: expected {expected} values, got {len(toks)}")
    try:
        vals = [float.fromhex(t) for t in toks]
    except ValueError:
        raise ModelFormatError(f"{where}: malformed float literal") from None
    if not all(math.isfinite(v) for v in vals):
        raise ModelFormatError(f"{where}: non-finite value")
    return vals


def load_params(path) -> Params:
    lines = Path(path).read_text(encoding="utf-8").splitlines()
    if not lines or lines[0].strip() != FORMAT_HEADER:
        raise ModelFormatError(f"{path}: missing or unsupported header")
    try:
        widths = [int(t) for t in lines[1].split()]
    except (IndexError, ValueError):
        raise ModelFormatError(f"{path}: malformed widths line") from None
    if len(widths) < 2 or min(widths) < 1:
        raise ModelFormatError(f"{path}: invalid widths {widths}")
    pos = 2

    def take(expect_tag: str) -> str:
        nonlocal pos
        if pos >= len(lines):
            raise ModelFormatError(f"{path}: truncated before {expect_tag!r}")
        line = lines[pos]
        pos += 1
        return line

    weights, biases = [], []
    for k in range(1, len(widths)):
        fan_in, fan_out = widths[k - 1], widths[k]
        if take(f"W {k}").strip() != f"W {k}":
            raise ModelFormatError(f"{path}: expected 'W {k}' at line {pos}")
        rows = [_parse_floats(take("weights"), fan_in, f"W {k}") for _ in range(fan_out)]
        if take(f"b {k}").strip() != f"b {k}":
            raise ModelFormatError(f"{path}: expected 'b {k}' at line {pos}")
        biases.append(np.array(_parse_floats(take("biases"), fan_out, f"b {k}")))
        weights.append(np.array(rows).reshape(fan_out, fan_in))
    if any(line.strip() for line in lines[pos:]):
        raise ModelFormatError(f"{path}: trailing content after last layer")
    return Params(tuple(weights), tuple(biases))
