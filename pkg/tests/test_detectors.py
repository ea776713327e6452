import itertools

import numpy as np
import pytest

from lrmimo.detectors import (
    DetectionOutput,
    extend_system,
    hard_slice,
    lr_detect,
    lr_detect_batch,
    ml_detect,
    ml_detect_batch,
    mmse_filter_direct,
    shift_scale_quantize,
    sic_detect,
    sic_detect_batch,
    zf_error_covariance,
    zf_filter,
)
from lrmimo.errors import BudgetExceededError, ValidationError
from lrmimo.modem import ConstellationSpec
from lrmimo.switched import identity_result, klr_select, klr_select_extended

from conftest import crandn

QPSK = ConstellationSpec(4)
QAM16 = ConstellationSpec(16)


def random_symbols(rng, spec, *shape):
    return spec.alphabet[rng.integers(0, spec.m, size=shape)]


class TestLinearFilters:
    def test_zf_left_inverse(self, rng):
        h = crandn(rng, 6, 4)
        assert np.linalg.norm(zf_filter(h) @ h - np.eye(4)) <= 1e-9

    def test_zf_error_covariance(self, rng):
        g = crandn(rng, 4, 6)
        c = zf_error_covariance(g, 0.3)
        assert np.allclose(c, c.conj().T)
        assert np.all(np.linalg.eigvalsh(c) >= -1e-12)
        assert np.allclose(zf_error_covariance(np.eye(4), 0.5), 0.5 * np.eye(4))
        with pytest.raises(ValidationError):
            zf_error_covariance(g, -1.0)

    def test_mmse_zero_noise_is_zf(self, rng):
        h = crandn(rng, 5, 4)
        assert np.allclose(mmse_filter_direct(h, 0.0), zf_filter(h))

    def test_mmse_push_through_identity(self, rng):
        # independent form: H^H (H H^H + sigma^2 I)^-1
        h = crandn(rng, 5, 4)
        s2 = 0.4
        alt = h.conj().T @ np.linalg.inv(h @ h.conj().T + s2 * np.eye(5))
        assert np.allclose(mmse_filter_direct(h, s2), alt)

    def test_mmse_equals_extended_zf(self, rng):
        h = crandn(rng, 4, 4)
        sigma = 0.7
        h_ext, _ = extend_system(h, np.zeros(4), sigma)
        assert np.allclose(
            mmse_filter_direct(h, sigma**2), zf_filter(h_ext)[:, :4]
        )

    def test_extend_system(self, rng):
        h = crandn(rng, 3, 2)
        y = crandn(rng, 3)
        h_ext, y_ext = extend_system(h, y, 0.2)
        assert h_ext.shape == (5, 2)
        assert np.allclose(h_ext[3:], 0.2 * np.eye(2))
        assert np.allclose(y_ext, np.concatenate([y, [0, 0]]))
        with pytest.raises(ValidationError):
            extend_system(h, crandn(rng, 4), 0.2)
        with pytest.raises(ValidationError):
            extend_system(h, y, -0.1)


class TestSic:
    def test_noise_free_integer_recovery(self, rng):
        for _ in range(50):
            n = int(rng.integers(2, 6))
            h = crandn(rng, n, n)
            z = (rng.integers(-4, 5, n) + 1j * rng.integers(-4, 5, n)).astype(
                complex
            )
            assert np.array_equal(sic_detect(h, h @ z), z)

    def test_matches_manual_back_substitution(self, rng):
        h = crandn(rng, 3, 3)
        y = crandn(rng, 3)
        # layer-peeling oracle built from projections instead of a stored QR
        z = np.zeros(3, dtype=complex)
        resid = y.copy()
        for i in (2, 1, 0):
            basis = h[:, :i]  # interference still to be resolved
            p = basis @ np.linalg.pinv(basis) if i else np.zeros((3, 3))
            eff = (np.eye(3) - p) @ h[:, i]
            est = eff.conj() @ ((np.eye(3) - p) @ resid) / (eff.conj() @ eff)
            z[i] = complex(np.round(est.real) + 1j * np.round(est.imag))
            resid = resid - h[:, i] * z[i]
        assert np.array_equal(sic_detect(h, y), z)

    def test_batch_consistency(self, rng):
        h = crandn(rng, 4, 4)
        ys = crandn(rng, 4, 9)
        zb = sic_detect_batch(h, ys)
        for j in range(9):
            assert np.array_equal(zb[:, j], sic_detect(h, ys[:, j]))


class TestQuantizeAndSlice:
    def test_quantize_identity_transform_fixes_constellation(self, rng):
        for spec in (QPSK, QAM16):
            x = random_symbols(rng, spec, 5)
            out = shift_scale_quantize(x, np.eye(5), spec)
            assert np.allclose(out, x)

    def test_quantize_snaps_to_shifted_lattice(self, rng):
        spec = QAM16
        v = 3.0 * crandn(rng, 6)
        out = shift_scale_quantize(v, np.eye(6), spec)
        frac = out / spec.a - 0.5 * (1 + 1j)
        assert np.allclose(frac.real, np.round(frac.real))
        assert np.allclose(frac.imag, np.round(frac.imag))
        # idempotent
        assert np.allclose(shift_scale_quantize(out, np.eye(6), spec), out)

    def test_quantize_respects_transform_offset(self, rng):
        # with U^-1 = 2I the shift is (1+j) per entry, so the lattice is
        # a*(Z[i] + (1+j)); a*(1+j) must be a fixed point while a*(1+j)/2 is not
        spec = QPSK
        u_inv = 2.0 * np.eye(2)
        pt = spec.a * np.array([1 + 1j, 1 + 1j])
        assert np.allclose(shift_scale_quantize(pt, u_inv, spec), pt)

    def test_slice_matches_nearest_alphabet(self, rng):
        for spec in (QPSK, QAM16):
            v = 2.0 * crandn(rng, 200)
            sliced = hard_slice(v, spec)
            for x, s in zip(v, sliced):
                dists = np.abs(spec.alphabet - x)
                assert abs(x - s) <= dists.min() + 1e-12

    def test_slice_clips(self):
        big = np.array([100.0 + 100.0j, -100.0 - 100.0j])
        out = hard_slice(big, QAM16)
        corner = 1.5 * QAM16.a
        assert np.allclose(out, [corner + corner * 1j, -corner - corner * 1j])

    def test_slice_midpoint_tie_to_lower_magnitude(self):
        assert hard_slice(np.array([0.0 + 0.0j]), QPSK)[0] == pytest.approx(
            -QPSK.a / 2 * (1 + 1j)
        )
        a = QAM16.a
        assert hard_slice(np.array([a + 0.0j]), QAM16)[0].real == pytest.approx(a / 2)
        assert hard_slice(np.array([-a + 0.0j]), QAM16)[0].real == pytest.approx(-a / 2)


def ml_oracle(y, h, spec):
    """Plain nested-loop exhaustive search (independent of ml_detect)."""
    best, bestx = None, None
    for combo in itertools.product(spec.alphabet, repeat=h.shape[1]):
        x = np.array(combo)
        c = float(np.linalg.norm(y - h @ x))
        if best is None or c < best - 1e-12:
            best, bestx = c, x
    return bestx


class TestMl:
    def test_noise_free_recovery(self, rng):
        for _ in range(20):
            h = crandn(rng, 3, 3)
            x = random_symbols(rng, QPSK, 3)
            out = ml_detect(h @ x, h, QPSK)
            assert isinstance(out, DetectionOutput)
            assert np.allclose(out.x_hat, x)

    def test_matches_loop_oracle(self, rng):
        for _ in range(15):
            h = crandn(rng, 3, 3)
            x = random_symbols(rng, QPSK, 3)
            y = h @ x + 0.4 * crandn(rng, 3)
            assert np.allclose(ml_detect(y, h, QPSK).x_hat, ml_oracle(y, h, QPSK))

    def test_matches_loop_oracle_16qam(self, rng):
        h = crandn(rng, 2, 2)
        y = crandn(rng, 2)
        assert np.allclose(ml_detect(y, h, QAM16).x_hat, ml_oracle(y, h, QAM16))

    def test_tie_breaks_lexicographic(self):
        out = ml_detect(np.zeros(2), np.eye(2), QPSK)
        assert np.allclose(out.x_hat, [QPSK.alphabet[0], QPSK.alphabet[0]])

    def test_candidate_cap(self, rng):
        with pytest.raises(BudgetExceededError):
            ml_detect(crandn(rng, 4), crandn(rng, 4, 4), QAM16, max_candidates=1000)

    def test_batch_consistency(self, rng):
        h = crandn(rng, 2, 2)
        ys = crandn(rng, 2, 7)
        xb = ml_detect_batch(ys, h, QAM16)
        for j in range(7):
            assert np.allclose(xb[:, j], ml_detect(ys[:, j], h, QAM16).x_hat)


class TestLrDetect:
    @pytest.mark.parametrize("kind", ["zf", "sic-zf"])
    def test_noise_free_exact_plain(self, rng, kind):
        for spec in (QPSK, QAM16):
            for _ in range(20):
                h = crandn(rng, 4, 4)
                klr = klr_select(h, 3, rng=rng)
                x = random_symbols(rng, spec, 4)
                out = lr_detect(h @ x, h, klr, kind, spec)
                assert np.allclose(out.x_hat, x)

    @pytest.mark.parametrize("kind", ["mmse", "sic-mmse"])
    def test_small_noise_extended(self, rng, kind):
        sigma = 0.05
        errs = 0
        for _ in range(20):
            h = crandn(rng, 4, 4)
            klr = klr_select_extended(h, sigma, 3, rng=rng)
            x = random_symbols(rng, QPSK, 4)
            y = h @ x + sigma * crandn(rng, 4)
            out = lr_detect(y, h, klr, kind, QPSK, sigma_n=sigma)
            errs += int(not np.allclose(out.x_hat, x))
        assert errs == 0

    def test_flavor_mismatch_rejected(self, rng):
        h = crandn(rng, 3, 3)
        plain = klr_select(h, 2, rng=rng)
        ext = klr_select_extended(h, 0.1, 2, rng=rng)
        y = crandn(rng, 3)
        with pytest.raises(ValidationError):
            lr_detect(y, h, plain, "mmse", QPSK)
        with pytest.raises(ValidationError):
            lr_detect(y, h, ext, "zf", QPSK)
        with pytest.raises(ValidationError):
            lr_detect(y, h, plain, "nope", QPSK)

    def test_identity_reduction_reproduces_conventional_zf(self, rng):
        h = crandn(rng, 4, 4)
        y = h @ random_symbols(rng, QAM16, 4) + 0.3 * crandn(rng, 4)
        out = lr_detect(y, h, identity_result(h), "zf", QAM16)
        assert np.allclose(out.x_hat, hard_slice(zf_filter(h) @ y, QAM16))

    def test_identity_reduction_reproduces_conventional_mmse(self, rng):
        sigma = 0.5
        h = crandn(rng, 4, 4)
        y = h @ random_symbols(rng, QPSK, 4) + sigma * crandn(rng, 4)
        out = lr_detect(
            y, h, identity_result(h, extended=True, sigma_n=sigma), "mmse", QPSK
        )
        conv = hard_slice(mmse_filter_direct(h, sigma**2) @ y, QPSK)
        assert np.allclose(out.x_hat, conv)

    def test_batch_consistency(self, rng):
        h = crandn(rng, 3, 3)
        klr = klr_select(h, 2, rng=rng)
        ys = h @ random_symbols(rng, QPSK, 3, 8) + 0.2 * crandn(rng, 3, 8)
        for kind in ("zf", "sic-zf"):
            xb = lr_detect_batch(ys, h, klr, kind, QPSK)
            for j in range(8):
                assert np.allclose(
                    xb[:, j], lr_detect(ys[:, j], h, klr, kind, QPSK).x_hat
                )
