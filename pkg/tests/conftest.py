import numpy as np
import pytest

import exemplar_lca as xl


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def small_dict():
    """Six atoms, four dims, three classes; deterministic values."""
    gen = np.random.default_rng(7)
    feats = gen.standard_normal((6, 4)).astype(np.float32)
    return xl.build_dictionary(feats, [0, 0, 1, 1, 2, 2], 3)


@pytest.fixture
def ortho_dict():
    return xl.build_dictionary(np.eye(4, dtype=np.float32), [0, 1, 2, 3], 4)


@pytest.fixture(scope="session")
def digit_corpus():
    """Small synthetic digit set shared by mid-scale tests."""
    images, labels = xl.synthetic_digits(1200, seed=77)
    return images, labels.astype(np.int64)


@pytest.fixture(scope="session")
def mnist_dir(tmp_path_factory):
    """MNIST-layout directory of IDX files with a small synthetic corpus."""
    from exemplar_lca import mnist

    root = tmp_path_factory.mktemp("idx")
    train_images, train_labels = xl.synthetic_digits(600, seed=21)
    test_images, test_labels = xl.synthetic_digits(120, seed=22)
    mnist.write_idx_images(root / "train-images-idx3-ubyte", train_images)
    mnist.write_idx_labels(root / "train-labels-idx1-ubyte", train_labels)
    mnist.write_idx_images(root / "t10k-images-idx3-ubyte", test_images)
    mnist.write_idx_labels(root / "t10k-labels-idx1-ubyte", test_labels)
    return root
