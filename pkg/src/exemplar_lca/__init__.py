"""Sparse-coding classification and reconstruction over exemplar dictionaries.

The pipeline: build a dictionary whose atoms are (features of) training
exemplars, encode inputs into sparse activation codes with
leaky-integrate-and-fire dynamics under lateral inhibition, then decode
codes into classes or reconstructions. Includes an analytical workload
model and scikit-learn style estimators.
"""

__version__ = "0.1.0"

from .dictionary import (
    ExemplarDictionary,
    append_atoms,
    build_dictionary,
    inhibition,
    materialize_gramian,
    matrix_free_operator,
    resolve_operator,
)
from .encoder import (
    LcaConfig,
    LcaState,
    SparseCode,
    drive,
    encode,
    encode_batch,
    energy,
    soft_threshold,
    step,
)
from .decoders import (
    ClassScores,
    ShallowNnConfig,
    ShallowNnModel,
    decode_max_activation,
    decode_max_class_sum,
    decode_shallow_nn,
    train_shallow_nn,
)
from .reconstruction import (
    QualityReport,
    dictionary_update_baseline,
    mse,
    psnr,
    quality_report,
    random_dictionary,
    reconstruct,
    ssim,
)
from .workload import (
    OpCounter,
    WorkloadEstimate,
    inference_flops,
    inference_flops_mean,
    measure_sparsity,
    training_flops,
)
from .formats import (
    FeatureMatrix,
    read_dictionary,
    read_feature_matrix,
    read_shallow_nn,
    write_dictionary,
    write_feature_matrix,
    write_shallow_nn,
)
from .datasets import pixels_to_features, split_dataset, synthetic_digits
from .runconfig import RunConfig, load_config
from .estimators import ExemplarLcaClassifier, LcaSparseCoder
from .validation import DataError, DivergenceError

__all__ = [
    "ExemplarDictionary",
    "build_dictionary",
    "append_atoms",
    "materialize_gramian",
    "matrix_free_operator",
    "resolve_operator",
    "inhibition",
    "LcaConfig",
    "LcaState",
    "SparseCode",
    "soft_threshold",
    "drive",
    "step",
    "encode",
    "encode_batch",
    "energy",
    "ClassScores",
    "ShallowNnConfig",
    "ShallowNnModel",
    "decode_max_activation",
    "decode_max_class_sum",
    "decode_shallow_nn",
    "train_shallow_nn",
    "QualityReport",
    "reconstruct",
    "mse",
    "psnr",
    "ssim",
    "quality_report",
    "dictionary_update_baseline",
    "random_dictionary",
    "WorkloadEstimate",
    "OpCounter",
    "inference_flops",
    "inference_flops_mean",
    "training_flops",
    "measure_sparsity",
    "FeatureMatrix",
    "read_dictionary",
    "write_dictionary",
    "read_feature_matrix",
    "write_feature_matrix",
    "read_shallow_nn",
    "write_shallow_nn",
    "split_dataset",
    "synthetic_digits",
    "pixels_to_features",
    "RunConfig",
    "load_config",
    "LcaSparseCoder",
    "ExemplarLcaClassifier",
    "DataError",
    "DivergenceError",
]
