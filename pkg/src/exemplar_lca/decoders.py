"""Map sparse codes to class predictions.

Three decoders, in increasing order of machinery: the class of the
single strongest activation, the class with the largest sum of absolute
activations, and a trained single-layer softmax readout. The first two
need no training at all.

A code that fired nothing carries no class evidence; decoders flag it
``abstain`` (and evaluation counts abstentions as errors) instead of
silently guessing.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp

from .validation import DataError, DivergenceError, as_vector

MAX_ACTIVATION = "max_activation"
MAX_CLASS_SUM = "max_class_sum"
SHALLOW_NN = "shallow_nn"

DECODER_KINDS = (MAX_ACTIVATION, MAX_CLASS_SUM, SHALLOW_NN)


@dataclass
class ClassScores:
    """Per-class evidence with the winning class (lowest id wins ties)."""

    scores: np.ndarray
    predicted: int
    decoder_kind: str
    abstain: bool = False


def _code_vector(code, m):
    a = getattr(code, "a", code)
    return as_vector(a, m, "code")


def decode_max_activation(code, dictionary) -> ClassScores:
    """Class of the single largest (signed) firing activation.

    Per-class scores are the maximum signed activation among the
    class's firing atoms; a class with no atoms or none firing gets the
    lowest representable score, so silence never outranks evidence
    (a silent neuron's 0 is absence, not a measurement). Codes where
    nothing fired abstain.
    """
    a = _code_vector(code, dictionary.m)
    scores = np.full(dictionary.class_count, -np.inf)
    firing = np.flatnonzero(a)
    if firing.size:
        np.maximum.at(scores, dictionary.labels[firing], a[firing])
        predicted = int(np.argmax(scores))
        return ClassScores(scores, predicted, MAX_ACTIVATION, abstain=False)
    return ClassScores(scores, 0, MAX_ACTIVATION, abstain=True)


def decode_max_class_sum(code, dictionary) -> ClassScores:
    """Class with the largest sum of absolute activations over its atoms."""
    a = _code_vector(code, dictionary.m)
    scores = np.bincount(
        dictionary.labels, weights=np.abs(a), minlength=dictionary.class_count
    )
    if not a.any():
        return ClassScores(scores, 0, MAX_CLASS_SUM, abstain=True)
    return ClassScores(scores, int(np.argmax(scores)), MAX_CLASS_SUM, abstain=False)


def batch_max_class_sum(codes_matrix, dictionary):
    """Vectorized max-class-sum over a (B, M) dense or CSR code matrix.

    Returns (predicted, abstain) arrays; per-row result equals
    decode_max_class_sum on that row.
    """
    onehot = np.zeros((dictionary.m, dictionary.class_count), dtype=np.float64)
    onehot[np.arange(dictionary.m), dictionary.labels] = 1.0
    if sp.issparse(codes_matrix):
        scores = np.abs(codes_matrix) @ onehot
        nnz = codes_matrix.getnnz(axis=1)
    else:
        scores = np.abs(codes_matrix.astype(np.float64)) @ onehot
        nnz = np.count_nonzero(codes_matrix, axis=1)
    return np.argmax(scores, axis=1), nnz == 0


def batch_max_activation(codes_matrix, dictionary):
    """Row-wise max-activation decode over a (B, M) code matrix.

    Matches decode_max_activation per row, including the lowest-class-id
    tie rule, so ties are resolved identically in both paths.
    """
    if sp.issparse(codes_matrix):
        codes_matrix = codes_matrix.toarray()
    b = codes_matrix.shape[0]
    pred = np.zeros(b, dtype=np.int64)
    abstain = np.zeros(b, dtype=bool)
    for i in range(b):
        result = decode_max_activation(codes_matrix[i], dictionary)
        pred[i] = result.predicted
        abstain[i] = result.abstain
    return pred, abstain


@dataclass(frozen=True)
class ShallowNnConfig:
    epochs: int = 30
    learning_rate: float = 1e-2
    batch_size: int | None = 64    # None trains full-batch
    seed: int = 42

    def __post_init__(self):
        if self.epochs < 1:
            raise DataError(f"epochs must be >= 1, got {self.epochs}")
        if self.learning_rate <= 0:
            raise DataError(f"learning_rate must be > 0, got {self.learning_rate}")
        if self.batch_size is not None and self.batch_size < 1:
            raise DataError(f"batch_size must be >= 1, got {self.batch_size}")


@dataclass
class ShallowNnModel:
    """Single linear layer + softmax trained on sparse codes."""

    weights: np.ndarray   # (class_count, M)
    bias: np.ndarray      # (class_count,)
    training_meta: dict = field(default_factory=dict)

    @property
    def class_count(self) -> int:
        return self.weights.shape[0]

    @property
    def m(self) -> int:
        return self.weights.shape[1]


def _softmax(z):
    z = z - np.max(z, axis=-1, keepdims=True)
    e = np.exp(z)
    return e / e.sum(axis=-1, keepdims=True)


def codes_to_matrix(codes, m):
    """Stack SparseCode objects into a CSR matrix of shape (len(codes), m)."""
    rows, cols, vals = [], [], []
    for i, code in enumerate(codes):
        a = np.asarray(getattr(code, "a", code))
        idx = np.flatnonzero(a)
        rows.append(np.full(idx.size, i, dtype=np.int64))
        cols.append(idx)
        vals.append(a[idx].astype(np.float64))
    if rows:
        data = (np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols)))
    else:
        data = ((), ((), ()))
    return sp.csr_matrix(data, shape=(len(codes), m))


def _as_code_matrix(codes):
    if sp.issparse(codes):
        return codes.tocsr().astype(np.float64)
    if isinstance(codes, np.ndarray) and codes.ndim == 2:
        return codes.astype(np.float64)
    rows = [np.asarray(getattr(c, "a", c), dtype=np.float64) for c in codes]
    if not rows:
        raise DataError("no training codes given")
    m = rows[0].shape[0]
    for i, r in enumerate(rows):
        if r.shape != (m,):
            raise DataError(f"code {i} has length {r.shape}, expected ({m},)")
    return np.vstack(rows)


def nn_loss_and_gradient(weights, bias, x, y_onehot):
    """Mean cross-entropy over a batch and its analytic gradient.

    Overflow is allowed to surface as a non-finite loss; the trainer
    aborts on it rather than silently continuing.
    """
    with np.errstate(over="ignore", invalid="ignore"):
        logits = x @ weights.T + bias
        probs = _softmax(logits)
        n = x.shape[0]
        # clip only inside the log; the gradient uses the exact probs
        picked = probs[np.arange(n), np.argmax(y_onehot, axis=1)]
        loss = -np.mean(np.log(np.clip(picked, 1e-300, None)))
        delta = (probs - y_onehot) / n
        grad_w = delta.T @ x
        grad_b = delta.sum(axis=0)
    if sp.issparse(grad_w):
        grad_w = np.asarray(grad_w.todense())
    return loss, np.asarray(grad_w), grad_b


def train_shallow_nn(codes, labels, class_count=None, cfg=None) -> ShallowNnModel:
    """Fit the softmax readout with seeded mini-batch gradient descent.

    Deterministic for a fixed seed. Requires at least one example per
    class; aborts with the epoch index if the loss leaves the finite
    range. The final epoch's training accuracy is recorded on the model.
    """
    cfg = cfg or ShallowNnConfig()
    x = _as_code_matrix(codes)
    n, m = x.shape
    labels = np.asarray(labels, dtype=np.int64)
    if labels.shape != (n,):
        raise DataError(f"labels must have shape ({n},), got {labels.shape}")
    if class_count is None:
        class_count = int(labels.max()) + 1
    counts = np.bincount(labels, minlength=class_count)
    if (counts == 0).any():
        raise DataError(f"class {int(np.argmin(counts))} has no training examples")
    y_onehot = np.zeros((n, class_count))
    y_onehot[np.arange(n), labels] = 1.0

    rng = np.random.default_rng(cfg.seed)
    weights = np.zeros((class_count, m))
    bias = np.zeros(class_count)
    batch = n if cfg.batch_size is None else min(cfg.batch_size, n)
    epoch_losses = []
    for epoch in range(cfg.epochs):
        order = rng.permutation(n)
        losses = []
        for start in range(0, n, batch):
            sel = order[start:start + batch]
            loss, gw, gb = nn_loss_and_gradient(weights, bias, x[sel], y_onehot[sel])
            if not np.isfinite(loss):
                raise DivergenceError(
                    f"non-finite training loss at epoch {epoch}", step=epoch
                )
            with np.errstate(over="ignore"):
                weights -= cfg.learning_rate * gw
                bias -= cfg.learning_rate * gb
            losses.append(loss)
        epoch_losses.append(float(np.mean(losses)))
    logits = x @ weights.T + bias
    train_acc = float(np.mean(np.argmax(logits, axis=1) == labels))
    return ShallowNnModel(
        weights=weights,
        bias=bias,
        training_meta={
            "epochs": cfg.epochs,
            "learning_rate": cfg.learning_rate,
            "batch_size": cfg.batch_size,
            "seed": cfg.seed,
            "final_train_accuracy": train_acc,
            "epoch_losses": epoch_losses,
        },
    )


def decode_shallow_nn(model, code) -> ClassScores:
    """Softmax probabilities from the trained readout; argmax predicts."""
    a = _code_vector(code, model.m)
    probs = _softmax(model.weights @ a + model.bias)
    abstain = not a.any()
    return ClassScores(probs, int(np.argmax(probs)), SHALLOW_NN, abstain=abstain)


def batch_shallow_nn(codes_matrix, model):
    """Vectorized shallow-NN decode over a (B, M) code matrix."""
    if sp.issparse(codes_matrix):
        logits = codes_matrix @ model.weights.T + model.bias
        nnz = codes_matrix.getnnz(axis=1)
    else:
        logits = codes_matrix @ model.weights.T + model.bias
        nnz = np.count_nonzero(codes_matrix, axis=1)
    return np.argmax(logits, axis=1), nnz == 0
