"""Exemplar dictionaries and lateral-inhibition operators.

A dictionary holds M unit-normalized feature atoms (one per training
exemplar) with class labels. Competition between coding neurons is
mediated by the atom co-linearity matrix ``G = atoms @ atoms.T``; for
large M that matrix is replaced by an equivalent matrix-free operator
that applies ``atoms @ (atoms.T @ a)`` without forming G.

Dictionaries and operators are immutable after construction and safe to
share across concurrent encodes; appending atoms returns a new object.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .validation import DataError, as_matrix, as_vector, check_labels

# Rows whose L2 norm is already 1 within this tolerance are stored
# bit-identically, which makes normalization idempotent.
_UNIT_TOL = 1e-6

DEFAULT_GRAMIAN_BUDGET_BYTES = 2_000_000_000


def _freeze(arr):
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class ExemplarDictionary:
    """M unit-norm atoms of width N, one class id and original norm per atom."""

    atoms: np.ndarray       # (M, N) float32, rows unit L2
    labels: np.ndarray      # (M,) int64, values in [0, class_count)
    class_count: int
    atom_norms: np.ndarray  # (M,) float32, pre-normalization L2 norms

    @property
    def m(self) -> int:
        return self.atoms.shape[0]

    @property
    def n(self) -> int:
        return self.atoms.shape[1]

    def class_histogram(self) -> np.ndarray:
        return np.bincount(self.labels, minlength=self.class_count)


def _normalize_rows(rows32, name):
    """Unit-normalize float32 rows; returns (atoms, norms) with f64 accumulation."""
    norms = np.sqrt(np.einsum("ij,ij->i", rows32, rows32, dtype=np.float64))
    zero = np.flatnonzero(norms == 0.0)
    if zero.size:
        raise DataError(f"{name} row {zero[0]} has zero L2 norm")
    atoms = rows32.copy()
    needs = np.abs(norms - 1.0) > _UNIT_TOL
    if needs.any():
        scaled = rows32[needs].astype(np.float64) / norms[needs, None]
        atoms[needs] = scaled.astype(np.float32)
    return atoms, norms.astype(np.float32)


def build_dictionary(features, labels, class_count=None) -> ExemplarDictionary:
    """Build an exemplar dictionary from raw feature rows.

    Each row is L2-normalized into an atom; the pre-normalization norms
    are kept so reconstructions can be mapped back to the original
    feature scale. Row order is preserved.

    Parameters
    ----------
    features : (M, N) array_like
        One exemplar feature vector per row. Every row must be finite
        with nonzero norm.
    labels : (M,) array_like of int
        Class id per row. Every id in ``[0, class_count)`` must occur.
    class_count : int, optional
        Number of classes; defaults to ``max(labels) + 1``.
    """
    feats = as_matrix(features, "features", dtype=np.float32)
    if class_count is None:
        class_count = int(np.max(labels)) + 1
    lab = check_labels(labels, feats.shape[0], class_count, "labels")
    atoms, norms = _normalize_rows(feats, "features")
    return ExemplarDictionary(
        atoms=_freeze(atoms),
        labels=_freeze(lab),
        class_count=int(class_count),
        atom_norms=_freeze(norms),
    )


def append_atoms(dictionary, features, labels, counter=None) -> ExemplarDictionary:
    """Return a new dictionary with extra exemplars appended.

    Existing atoms are carried over bit-identically; only the new rows
    are normalized, so the arithmetic cost is O(P*N) for P new rows
    (the buffer copy is memory movement, not arithmetic). The class
    count may grow to ``max(labels) + 1``; the grown range must remain
    fully populated. Any Gramian materialized from the old dictionary
    does not apply to the result and must be rebuilt (operators check
    dictionary identity).
    """
    feats = as_matrix(features, "features", dtype=np.float32)
    p, width = feats.shape
    if width != dictionary.n:
        raise DataError(f"appended features have width {width}, dictionary has {dictionary.n}")
    new_class_count = max(dictionary.class_count, int(np.max(labels)) + 1)
    combined = np.concatenate([dictionary.labels, np.asarray(labels, dtype=np.int64)])
    lab = check_labels(combined, dictionary.m + p, new_class_count, "labels")
    new_atoms, new_norms = _normalize_rows(feats, "features")
    if counter is not None:
        counter.record("append", mul=2 * p * width, add=p * (width - 1))
    return ExemplarDictionary(
        atoms=_freeze(np.concatenate([dictionary.atoms, new_atoms])),
        labels=_freeze(lab),
        class_count=int(new_class_count),
        atom_norms=_freeze(np.concatenate([dictionary.atom_norms, new_norms])),
    )


class MaterializedOperator:
    """Inhibition backed by an explicit M x M co-linearity matrix."""

    backend = "materialized"

    def __init__(self, dictionary, gram, diag):
        self.dictionary = dictionary
        self.gram = _freeze(gram)
        self._diag = _freeze(diag)
        self._diag32 = _freeze(diag.astype(np.float32))

    @property
    def diag(self):
        return self._diag

    def apply(self, a, counter=None):
        """Off-diagonal inhibition ``sum_{m != i} G[i, m] a[m]``.

        Only the firing (nonzero) entries of ``a`` contribute, so the
        arithmetic cost is O(M * nnz).
        """
        a = as_vector(a, self.dictionary.m, "activations")
        idx = np.flatnonzero(a)
        if idx.size == 0:
            return np.zeros(self.dictionary.m, dtype=np.float64)
        active = a[idx].astype(np.float64)
        out = self.gram[:, idx] @ active
        out[idx] -= self._diag[idx] * active
        if counter is not None:
            m, k = self.dictionary.m, idx.size
            counter.record("inhibition", mul=m * k + k, add=m * (k - 1) + k)
        return out

    def apply_batch(self, acts):
        """Batched inhibition for (B, M) float32 activations."""
        out = acts @ self.gram
        out -= acts * self._diag32[None, :]
        return out


class MatrixFreeOperator:
    """Inhibition computed as ``atoms @ (atoms.T @ a)`` without forming G."""

    backend = "matrix_free"

    def __init__(self, dictionary):
        self.dictionary = dictionary
        atoms64 = dictionary.atoms.astype(np.float64)
        self._atoms64 = _freeze(atoms64)
        self._diag = _freeze(np.einsum("ij,ij->i", atoms64, atoms64))
        self._diag32 = _freeze(self._diag.astype(np.float32))

    @property
    def diag(self):
        return self._diag

    def apply(self, a, counter=None):
        a = as_vector(a, self.dictionary.m, "activations")
        idx = np.flatnonzero(a)
        if idx.size == 0:
            return np.zeros(self.dictionary.m, dtype=np.float64)
        active = a[idx].astype(np.float64)
        resid = self._atoms64[idx].T @ active
        out = self._atoms64 @ resid
        out[idx] -= self._diag[idx] * active
        if counter is not None:
            m, n, k = self.dictionary.m, self.dictionary.n, idx.size
            counter.record(
                "inhibition",
                mul=n * k + m * n + k,
                add=n * (k - 1) + m * (n - 1) + k,
            )
        return out

    def apply_batch(self, acts, density_cutoff=0.05):
        """Batched inhibition for (B, M) float32 activations.

        Uses a CSR product for the reconstruction half when the batch
        is sparse enough, otherwise a dense GEMM.
        """
        import scipy.sparse as sp

        atoms = self.dictionary.atoms
        nnz = np.count_nonzero(acts)
        if nnz < density_cutoff * acts.size:
            resid = sp.csr_matrix(acts) @ atoms
        else:
            resid = acts @ atoms
        out = resid @ atoms.T
        out -= acts * self._diag32[None, :]
        return out


def materialize_gramian(dictionary, budget_bytes=DEFAULT_GRAMIAN_BUDGET_BYTES):
    """Build the materialized inhibition operator for a dictionary.

    Entries are pairwise atom inner products accumulated in float64 and
    stored as float32; the result is exactly symmetric by construction.
    Raises when the M x M matrix would exceed ``budget_bytes``.
    """
    m = dictionary.m
    required = m * m * 4
    if required > budget_bytes:
        raise DataError(
            f"materialized Gramian needs {required} bytes, budget is {budget_bytes}; "
            "use the matrix_free backend instead"
        )
    atoms64 = dictionary.atoms.astype(np.float64)
    gram = np.empty((m, m), dtype=np.float32)
    block = max(1, int(2**24 / max(1, m)))
    for start in range(0, m, block):
        stop = min(m, start + block)
        gram[start:stop] = atoms64[start:stop] @ atoms64.T
    upper = np.triu_indices(m, k=1)
    gram[(upper[1], upper[0])] = gram[upper]
    diag = np.diagonal(gram).astype(np.float64).copy()
    return MaterializedOperator(dictionary, gram, diag)


def matrix_free_operator(dictionary):
    """Build the matrix-free inhibition operator for a dictionary."""
    return MatrixFreeOperator(dictionary)


def inhibition(operator, a, counter=None):
    """Lateral inhibition vector ``sum_{m != i} G[i, m] a[m]`` per neuron."""
    return operator.apply(a, counter=counter)


def resolve_operator(dictionary, backend="auto", budget_bytes=DEFAULT_GRAMIAN_BUDGET_BYTES):
    """Pick an inhibition backend: materialize when G fits the byte budget."""
    if backend == "materialized":
        return materialize_gramian(dictionary, budget_bytes)
    if backend == "matrix_free":
        return matrix_free_operator(dictionary)
    if backend == "auto":
        if dictionary.m * dictionary.m * 4 <= budget_bytes:
            return materialize_gramian(dictionary, budget_bytes)
        return matrix_free_operator(dictionary)
    raise DataError(f"unknown backend {backend!r}")


def check_operator(operator, dictionary):
    """Reject operators built for a different (e.g. pre-append) dictionary."""
    if operator.dictionary is not dictionary:
        raise DataError(
            "inhibition operator was built for a different dictionary; "
            "rebuild it after append_atoms"
        )
