import math

import numpy as np
import pytest

import exemplar_lca as xl
from exemplar_lca.encoder import LcaConfig, encode
from exemplar_lca.reconstruction import export_pgm, export_ppm
from exemplar_lca.validation import DataError


class TestReconstruct:
    def test_one_hot_returns_rescaled_atom(self, rng):
        feats = rng.uniform(1, 9, size=(5, 6)).astype(np.float32)
        d = xl.build_dictionary(feats, np.arange(5), 5)
        for j in range(5):
            e = np.zeros(5)
            e[j] = 1.0
            np.testing.assert_allclose(
                xl.reconstruct(d, e), feats[j], rtol=1e-5, atol=1e-5
            )

    def test_zero_code_zero_image(self, small_dict):
        np.testing.assert_array_equal(xl.reconstruct(small_dict, np.zeros(6)), np.zeros(4))

    def test_orthonormal_self_input_converges(self, rng):
        basis, _ = np.linalg.qr(rng.standard_normal((6, 6)))
        d = xl.build_dictionary(basis.astype(np.float32), np.arange(6), 6)
        s = d.atoms[2].astype(np.float64)
        cfg = LcaConfig(threshold_lambda=1e-6, steps=1200)
        code = encode(d, s, cfg)
        recon = xl.reconstruct(d, code)
        assert xl.mse(s, recon) <= 1e-3

    def test_linearity_in_code(self, rng, small_dict):
        a = rng.standard_normal(6)
        for alpha in (0.0, 0.5, 2.0):
            np.testing.assert_allclose(
                xl.reconstruct(small_dict, alpha * a),
                alpha * xl.reconstruct(small_dict, a),
                atol=1e-12,
            )

    def test_length_mismatch(self, small_dict):
        with pytest.raises(DataError):
            xl.reconstruct(small_dict, np.zeros(5))


class TestMse:
    def test_identical_zero(self, rng):
        x = rng.uniform(0, 255, (28, 28))
        assert xl.mse(x, x) == 0.0

    def test_full_scale(self):
        x = np.zeros((4, 4))
        y = np.full((4, 4), 255.0)
        assert xl.mse(x, y) == pytest.approx(65025.0)

    def test_shape_mismatch(self):
        with pytest.raises(DataError):
            xl.mse(np.zeros((2, 2)), np.zeros((3, 2)))


class TestPsnr:
    def test_reference_pairs(self):
        assert xl.psnr(675.3) == pytest.approx(19.84, abs=0.01)
        assert xl.psnr(92.45) == pytest.approx(28.47, abs=0.01)

    def test_formula_consistency_with_mse(self):
        # mse of 92.45 corresponds to 28.47 dB at peak 255
        assert 10 * math.log10(255**2 / 92.45) == pytest.approx(28.47, abs=0.01)

    def test_full_scale_zero_db(self):
        assert xl.psnr(65025.0) == pytest.approx(0.0, abs=1e-12)

    def test_zero_error_is_infinite(self):
        assert xl.psnr(0.0) == math.inf
        assert xl.psnr(xl.mse(np.ones((3, 3)), np.ones((3, 3)))) == math.inf

    def test_negative_rejected(self):
        with pytest.raises(DataError):
            xl.psnr(-1.0)

    def test_strictly_decreasing_in_mse(self):
        values = [xl.psnr(v) for v in (1.0, 10.0, 100.0, 1000.0, 65025.0)]
        assert all(a > b for a, b in zip(values, values[1:]))


class TestSsim:
    def test_identical_images(self, rng):
        x = rng.uniform(0, 255, (28, 28))
        assert xl.ssim(x, x) == pytest.approx(1.0)

    def test_constant_black_vs_white_is_tiny(self):
        x = np.zeros((28, 28))
        y = np.full((28, 28), 255.0)
        value = xl.ssim(x, y)
        # closed form: C1 / (255^2 + C1) with C1 = (0.01 * 255)^2
        c1 = (0.01 * 255) ** 2
        assert value == pytest.approx(c1 / (255.0**2 + c1), abs=1e-9)
        assert value < 0.05

    def test_symmetry(self, rng):
        x = rng.uniform(0, 255, (28, 28))
        y = rng.uniform(0, 255, (28, 28))
        assert xl.ssim(x, y) == pytest.approx(xl.ssim(y, x), abs=1e-9)

    def test_upper_bound(self, rng):
        x = rng.uniform(0, 255, (28, 28))
        y = x + rng.normal(0, 5, x.shape)
        assert xl.ssim(x, y) <= 1.0

    def test_window_too_large_rejected(self):
        with pytest.raises(DataError, match="window"):
            xl.ssim(np.zeros((8, 8)), np.zeros((8, 8)), window=11)

    def test_even_window_rejected(self):
        with pytest.raises(DataError):
            xl.ssim(np.zeros((28, 28)), np.zeros((28, 28)), window=10)

    def test_rgb_channelwise(self, rng):
        x = rng.uniform(0, 255, (28, 28, 3))
        assert xl.ssim(x, x) == pytest.approx(1.0)


class TestQualityReport:
    def test_bundles_metrics(self, rng):
        x = rng.uniform(0, 255, (28, 28))
        y = np.clip(x + rng.normal(0, 10, x.shape), 0, 255)
        rep = xl.quality_report(x, y, iterations=100)
        assert rep.mse == pytest.approx(xl.mse(x, y))
        assert rep.psnr == pytest.approx(xl.psnr(rep.mse))
        assert rep.ssim == pytest.approx(xl.ssim(x, y))
        assert rep.iterations == 100


class TestDictionaryUpdateBaseline:
    def test_zero_code_no_change(self, small_dict, rng):
        out = xl.dictionary_update_baseline(
            small_dict, rng.standard_normal(4), np.zeros(6), eta=0.1
        )
        assert out is small_dict

    def test_exact_reconstruction_unchanged(self, ortho_dict):
        s = ortho_dict.atoms[1].astype(np.float64)
        a = np.array([0.0, 1.0, 0.0, 0.0])
        out = xl.dictionary_update_baseline(ortho_dict, s, a, eta=0.5)
        np.testing.assert_allclose(out.atoms, ortho_dict.atoms, atol=1e-7)

    def test_matches_hand_formula(self, rng):
        feats = rng.standard_normal((2, 4)).astype(np.float32)
        d = xl.build_dictionary(feats, [0, 1], 2)
        s = rng.standard_normal(4)
        a = np.array([0.8, -0.3])
        eta = 0.05
        atoms = d.atoms.astype(np.float64)
        resid = s - atoms.T @ a
        expected = atoms + eta * np.outer(a, resid)
        norms = np.linalg.norm(expected, axis=1)
        expected /= norms[:, None]
        out = xl.dictionary_update_baseline(d, s, a, eta)
        np.testing.assert_allclose(out.atoms, expected, atol=1e-9)
        np.testing.assert_allclose(out.atom_norms, norms, rtol=1e-6)
        np.testing.assert_array_equal(out.labels, d.labels)

    def test_untouched_atoms_bit_identical(self, rng, small_dict):
        a = np.zeros(6)
        a[2] = 0.4
        out = xl.dictionary_update_baseline(
            small_dict, rng.standard_normal(4), a, eta=0.1
        )
        keep = [0, 1, 3, 4, 5]
        np.testing.assert_array_equal(out.atoms[keep], small_dict.atoms[keep])
        np.testing.assert_array_equal(out.atom_norms[keep], small_dict.atom_norms[keep])

    def test_negative_eta_rejected(self, small_dict):
        with pytest.raises(DataError):
            xl.dictionary_update_baseline(small_dict, np.zeros(4), np.zeros(6), eta=0.0)


class TestRandomDictionary:
    def test_seeded_and_normalized(self):
        d1 = xl.random_dictionary(20, 8, seed=3)
        d2 = xl.random_dictionary(20, 8, seed=3)
        np.testing.assert_array_equal(d1.atoms, d2.atoms)
        norms = np.linalg.norm(d1.atoms.astype(np.float64), axis=1)
        assert np.abs(norms - 1).max() <= 1e-6

    def test_class_coverage(self):
        d = xl.random_dictionary(10, 4, seed=0, class_count=3)
        assert set(d.labels.tolist()) == {0, 1, 2}


class TestEnergyDecomposition:
    def test_energy_reconstruction_term_equals_scaled_mse(self, rng, small_dict):
        # raw image -> encoder space via v = c * s_raw; the reconstruction
        # term of the energy equals 0.5 * N * c^2 * mse(raw, recon / c)
        s_raw = rng.uniform(0, 255, size=4)
        c = 18.0 / np.linalg.norm(s_raw)
        v = c * s_raw
        a = rng.standard_normal(6) * (rng.random(6) < 0.5)
        lam = 2.0
        recon_unit = small_dict.atoms.astype(np.float64).T @ a
        lhs = xl.energy(small_dict, v, a, lam) - lam * np.abs(a).sum()
        rhs = 0.5 * 4 * c**2 * xl.mse(s_raw, recon_unit / c)
        assert lhs == pytest.approx(rhs, rel=1e-6)


class TestImageExport:
    def test_pgm_round_trip(self, tmp_path, rng):
        img = rng.uniform(-20, 280, size=(5, 7))
        path = tmp_path / "img.pgm"
        export_pgm(path, img)
        raw = path.read_bytes()
        assert raw.startswith(b"P5\n7 5\n255\n")
        payload = np.frombuffer(raw.split(b"255\n", 1)[1], dtype=np.uint8)
        expected = np.clip(np.rint(img), 0, 255).astype(np.uint8).ravel()
        np.testing.assert_array_equal(payload, expected)

    def test_ppm_header(self, tmp_path):
        img = np.zeros((4, 6, 3))
        path = tmp_path / "img.ppm"
        export_ppm(path, img)
        assert path.read_bytes().startswith(b"P6\n6 4\n255\n")

    def test_pgm_shape_check(self, tmp_path):
        with pytest.raises(DataError):
            export_pgm(tmp_path / "x.pgm", np.zeros((2, 2, 3)))
