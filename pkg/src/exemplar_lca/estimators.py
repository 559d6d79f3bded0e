"""Scikit-learn style estimators wrapping the coding pipeline.

``LcaSparseCoder`` is a transformer: fit stores the training rows as the
exemplar dictionary, transform returns sparse codes. The classifier
adds a decoder on top. Both follow the usual conventions (params stored
verbatim in __init__, fit returns self, get_params/set_params work, and
clones are cheap), so they compose with pipelines and searches.
"""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, ClassifierMixin, TransformerMixin
from sklearn.exceptions import NotFittedError
from sklearn.utils.validation import check_array

from . import decoders as _dec
from .datasets import prepare_inputs, split_dataset
from .dictionary import build_dictionary, resolve_operator
from .encoder import LcaConfig, encode_batch
from .validation import DataError


class LcaSparseCoder(TransformerMixin, BaseEstimator):
    """Sparse codes of inputs against a dictionary of training exemplars.

    Parameters mirror the dynamics config; ``max_atoms`` caps the
    dictionary size with a seeded (stratified when labels are given)
    subsample. ``input_norm``/``input_gain`` apply the documented input
    scaling before encoding ("l2" maps rows to gain * row / ||row||, or
    None to encode rows as given). ``transform`` returns a CSR matrix
    of shape (n_samples, n_atoms).
    """

    def __init__(
        self,
        threshold_lambda=2.0,
        leak_tau=100.0,
        steps=100,
        step_size=1.0,
        backend="auto",
        max_atoms=None,
        stratify=True,
        batch_size=256,
        input_norm="l2",
        input_gain=19.0,
        random_state=0,
    ):
        self.threshold_lambda = threshold_lambda
        self.leak_tau = leak_tau
        self.steps = steps
        self.step_size = step_size
        self.backend = backend
        self.max_atoms = max_atoms
        self.stratify = stratify
        self.batch_size = batch_size
        self.input_norm = input_norm
        self.input_gain = input_gain
        self.random_state = random_state

    def _lca_config(self):
        return LcaConfig(
            threshold_lambda=self.threshold_lambda,
            leak_tau=self.leak_tau,
            steps=self.steps,
            step_size=self.step_size,
            backend=self.backend,
        )

    def fit(self, X, y=None):
        X = check_array(X, dtype=np.float32)
        if y is None:
            labels = np.zeros(X.shape[0], dtype=np.int64)
        else:
            labels = np.asarray(y, dtype=np.int64)
        if self.max_atoms is not None and self.max_atoms < X.shape[0]:
            keep, _ = split_dataset(
                None, labels, self.max_atoms, self.random_state,
                stratified=self.stratify and y is not None,
            )
            X, labels = X[keep], labels[keep]
        self.dictionary_ = build_dictionary(X, labels)
        self.operator_ = resolve_operator(self.dictionary_, self.backend)
        self.n_features_in_ = self.dictionary_.n
        return self

    def _check_fitted(self):
        if not hasattr(self, "dictionary_"):
            raise NotFittedError("fit must be called before transform/predict")

    def _prepare(self, X):
        X = check_array(X, dtype=np.float32)
        if X.shape[1] != self.n_features_in_:
            raise DataError(
                f"X has {X.shape[1]} features, dictionary expects {self.n_features_in_}"
            )
        if self.input_norm is not None:
            X = prepare_inputs(X, self.input_norm, self.input_gain)
        return X

    def encode_codes(self, X):
        """Encode rows of X, yielding SparseCode objects batch by batch."""
        self._check_fitted()
        X = self._prepare(X)
        cfg = self._lca_config()
        for start in range(0, X.shape[0], self.batch_size):
            yield from encode_batch(
                self.dictionary_, X[start:start + self.batch_size], cfg, self.operator_
            )

    def transform(self, X):
        self._check_fitted()
        codes = list(self.encode_codes(X))
        return _dec.codes_to_matrix(codes, self.dictionary_.m)


class ExemplarLcaClassifier(ClassifierMixin, BaseEstimator):
    """Classification by decoding sparse codes over labeled exemplars.

    ``decoder`` picks the readout: "max_class_sum" (default),
    "max_activation", or "shallow_nn" (trains a softmax readout on the
    training codes at fit time). Abstaining codes (nothing fired)
    predict the first class; ``predict_with_abstain`` exposes the flag.
    """

    def __init__(
        self,
        decoder="max_class_sum",
        threshold_lambda=2.0,
        leak_tau=100.0,
        steps=100,
        step_size=1.0,
        backend="auto",
        max_atoms=None,
        stratify=True,
        batch_size=256,
        input_norm="l2",
        input_gain=19.0,
        random_state=0,
        nn_epochs=30,
        nn_learning_rate=1e-2,
        nn_batch_size=64,
        nn_seed=42,
    ):
        self.decoder = decoder
        self.threshold_lambda = threshold_lambda
        self.leak_tau = leak_tau
        self.steps = steps
        self.step_size = step_size
        self.backend = backend
        self.max_atoms = max_atoms
        self.stratify = stratify
        self.batch_size = batch_size
        self.input_norm = input_norm
        self.input_gain = input_gain
        self.random_state = random_state
        self.nn_epochs = nn_epochs
        self.nn_learning_rate = nn_learning_rate
        self.nn_batch_size = nn_batch_size
        self.nn_seed = nn_seed

    def _coder_params(self):
        return dict(
            threshold_lambda=self.threshold_lambda,
            leak_tau=self.leak_tau,
            steps=self.steps,
            step_size=self.step_size,
            backend=self.backend,
            max_atoms=self.max_atoms,
            stratify=self.stratify,
            batch_size=self.batch_size,
            input_norm=self.input_norm,
            input_gain=self.input_gain,
            random_state=self.random_state,
        )

    def fit(self, X, y):
        if self.decoder not in _dec.DECODER_KINDS:
            raise DataError(f"unknown decoder {self.decoder!r}")
        y = np.asarray(y)
        self.classes_, encoded = np.unique(y, return_inverse=True)
        self.coder_ = LcaSparseCoder(**self._coder_params()).fit(X, encoded)
        self.n_features_in_ = self.coder_.n_features_in_
        if self.decoder == _dec.SHALLOW_NN:
            codes = self.coder_.transform(X)
            self.model_ = _dec.train_shallow_nn(
                codes,
                encoded,
                class_count=self.classes_.shape[0],
                cfg=_dec.ShallowNnConfig(
                    epochs=self.nn_epochs,
                    learning_rate=self.nn_learning_rate,
                    batch_size=self.nn_batch_size,
                    seed=self.nn_seed,
                ),
            )
        return self

    def predict_with_abstain(self, X):
        """Predicted classes plus a mask of inputs whose code fired nothing."""
        if not hasattr(self, "coder_"):
            raise NotFittedError("fit must be called before predict")
        codes = self.coder_.transform(X)
        dictionary = self.coder_.dictionary_
        if self.decoder == _dec.MAX_ACTIVATION:
            pred, abstain = _dec.batch_max_activation(codes, dictionary)
        elif self.decoder == _dec.MAX_CLASS_SUM:
            pred, abstain = _dec.batch_max_class_sum(codes, dictionary)
        else:
            pred, abstain = _dec.batch_shallow_nn(codes, self.model_)
        return self.classes_[pred], abstain

    def predict(self, X):
        pred, _ = self.predict_with_abstain(X)
        return pred
