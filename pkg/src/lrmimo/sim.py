"""Monte Carlo link-level BER harness.

Block fading: one channel per trial, static over the packet.  Per-trial RNG
streams are spawned from the master seed by trial index, so results are
independent of execution order and bitwise reproducible.  Noise and channel
realizations are shared across detectors, candidate counts, and SNR points
(common random numbers): the same unit-variance noise block is rescaled per
SNR point.
"""

import csv
import math
from dataclasses import dataclass

import numpy as np

from .detectors import (
    hard_slice,
    lr_detect_batch,
    ml_detect_batch,
    mmse_filter_direct,
    pseudoinverse,
)
from .errors import ValidationError
from .modem import ConstellationSpec, map_bits, unmap_symbols
from .reduction import ReducedBasis, ReductionParams, clll_reduce
from .switched import KlrResult, extend_channel, sample_permutations

DETECTORS = (
    "zf",
    "clr-zf",
    "klr-zf",
    "mmse",
    "clr-mmse",
    "klr-mmse",
    "clr-mmse-sic",
    "klr-mmse-sic",
    "ml",
)
_PLAIN_LR = {"clr-zf", "klr-zf"}
_EXT_LR = {"clr-mmse", "klr-mmse", "clr-mmse-sic", "klr-mmse-sic"}
_KLR = {"klr-zf", "klr-mmse", "klr-mmse-sic"}

CSV_HEADER = (
    "detector,k,snr_db,ebn0_db,trials,packet_len,bits_total,bit_errors,ber,sym_errors"
)


@dataclass(frozen=True)
class SimConfig:
    n_t: int
    n_r: int
    m: int
    snr_grid_db: tuple
    detectors: tuple
    k_candidates: tuple = (1,)
    trials: int = 1000
    packet_len: int = 100
    seed: int = 0
    delta: float = 0.75

    def __post_init__(self):
        if self.n_t < 1 or self.n_r < self.n_t:
            raise ValidationError("need 1 <= n_t <= n_r")
        if self.trials < 1 or self.packet_len < 1:
            raise ValidationError("trials and packet_len must be >= 1")
        if not self.snr_grid_db:
            raise ValidationError("empty SNR grid")
        for d in self.detectors:
            if d not in DETECTORS:
                raise ValidationError(f"unknown detector {d!r}")
        cap = min(math.factorial(self.n_t) - 1, 10)
        for k in self.k_candidates:
            if not (1 <= k <= cap):
                raise ValidationError(f"k={k} outside [1, {cap}]")
        ConstellationSpec(self.m)  # validates the modulation order
        ReductionParams(self.delta)  # validates delta


@dataclass(frozen=True)
class BerRecord:
    detector: str
    k: int
    snr_db: float
    ebn0_db: float
    trials: int
    packet_len: int
    bits_total: int
    bit_errors: int
    ber: float
    sym_errors: int


def gen_channel(n_r: int, n_t: int, rng: np.random.Generator) -> np.ndarray:
    """i.i.d. circularly symmetric complex Gaussian entries, unit variance."""
    if n_t > n_r:
        raise ValidationError("need n_t <= n_r")
    return (
        rng.standard_normal((n_r, n_t)) + 1j * rng.standard_normal((n_r, n_t))
    ) / np.sqrt(2.0)


def snr_config(snr_db: float, cfg: SimConfig) -> tuple[float, float]:
    """Noise variance and Eb/N0 for one SNR point.

    SNR = N_T sigma_x^2 / sigma_n^2 with unit symbol power, so
    sigma_n^2 = N_T / 10^(SNR/10); Eb/N0 = SNR * N_R / (N_T * log2(M)).
    """
    sigma_n2 = cfg.n_t / (10.0 ** (snr_db / 10.0))
    r_m = math.log2(cfg.m)
    ebn0_db = snr_db + 10.0 * math.log10(cfg.n_r / (cfg.n_t * r_m))
    return sigma_n2, ebn0_db


def _trial_rng(seed: int, trial: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(trial,)))


def _select_prefix(
    baseline: ReducedBasis, cands: list, perms, k: int
) -> KlrResult:
    """Switched selection restricted to the first k candidates."""
    odfs = tuple(c.odf_value for c in cands[:k])
    idx = int(np.argmin(odfs))
    if odfs[idx] < baseline.odf_value:
        return KlrResult(
            basis=cands[idx],
            perm=perms[idx],
            odf_selected=odfs[idx],
            odf_baseline=baseline.odf_value,
            candidate_odfs=odfs,
        )
    n = baseline.u.shape[0]
    return KlrResult(
        basis=baseline,
        perm=tuple(range(n)),
        odf_selected=baseline.odf_value,
        odf_baseline=baseline.odf_value,
        candidate_odfs=odfs,
    )


def _as_result(basis: ReducedBasis, extended: bool) -> KlrResult:
    n = basis.u.shape[0]
    return KlrResult(
        basis=basis,
        perm=tuple(range(n)),
        odf_selected=basis.odf_value,
        odf_baseline=basis.odf_value,
        candidate_odfs=(),
        extended=extended,
    )


def _with_extended(res: KlrResult) -> KlrResult:
    return KlrResult(
        basis=res.basis,
        perm=res.perm,
        odf_selected=res.odf_selected,
        odf_baseline=res.odf_baseline,
        candidate_odfs=res.candidate_odfs,
        extended=True,
    )


def run_sweep(cfg: SimConfig) -> list[BerRecord]:
    """Run the full Monte Carlo sweep and return one record per curve point."""
    spec = ConstellationSpec(cfg.m)
    params = ReductionParams(cfg.delta)
    bps = spec.bits_per_symbol
    needs_plain = bool(_PLAIN_LR & set(cfg.detectors))
    needs_ext = bool(_EXT_LR & set(cfg.detectors))
    needs_klr = bool(_KLR & set(cfg.detectors))
    kmax = max(cfg.k_candidates) if needs_klr else 0

    variants = []  # (detector, k) in output order
    for det in cfg.detectors:
        if det in _KLR:
            variants.extend((det, k) for k in cfg.k_candidates)
        else:
            variants.append((det, 0))

    errs = {
        (det, k, snr): [0, 0]  # bit errors, symbol errors
        for det, k in variants
        for snr in cfg.snr_grid_db
    }

    for trial in range(cfg.trials):
        rng = _trial_rng(cfg.seed, trial)
        h = gen_channel(cfg.n_r, cfg.n_t, rng)
        bits = rng.integers(0, 2, size=(cfg.packet_len, cfg.n_t, bps))
        x = map_bits(bits, spec).T  # (n_t, packet_len)
        noise_unit = (
            rng.standard_normal((cfg.n_r, cfg.packet_len))
            + 1j * rng.standard_normal((cfg.n_r, cfg.packet_len))
        ) / np.sqrt(2.0)
        perms = (
            sample_permutations(cfg.n_t, max(kmax, 1), rng).perms if needs_klr else ()
        )

        plain_sel: dict[int, KlrResult] = {}
        if needs_plain:
            baseline = clll_reduce(h, params)
            if "clr-zf" in cfg.detectors:
                plain_sel[0] = _as_result(baseline, extended=False)
            if "klr-zf" in cfg.detectors:
                cands = [clll_reduce(h[:, list(p)], params) for p in perms]
                for k in cfg.k_candidates:
                    plain_sel[k] = _select_prefix(baseline, cands, perms, k)

        for snr in cfg.snr_grid_db:
            sigma2, _ = snr_config(snr, cfg)
            y = h @ x + np.sqrt(sigma2) * noise_unit

            ext_sel: dict[int, KlrResult] = {}
            if needs_ext:
                h_ext = extend_channel(h, np.sqrt(sigma2))
                baseline_e = clll_reduce(h_ext, params)
                ext_sel[0] = _with_extended(_as_result(baseline_e, extended=False))
                if {"klr-mmse", "klr-mmse-sic"} & set(cfg.detectors):
                    cands_e = [clll_reduce(h_ext[:, list(p)], params) for p in perms]
                    for k in cfg.k_candidates:
                        ext_sel[k] = _with_extended(
                            _select_prefix(baseline_e, cands_e, perms, k)
                        )

            for det, k in variants:
                x_hat = _detect_packet(
                    det, k, y, h, sigma2, spec, plain_sel, ext_sel
                )
                bit_hat = unmap_symbols(x_hat.T, spec)
                e = errs[(det, k, snr)]
                e[0] += int(np.sum(bit_hat != bits))
                e[1] += int(np.sum(np.abs(x_hat - x) > spec.a / 4))

    records = []
    vectors = cfg.trials * cfg.packet_len
    bits_total = vectors * cfg.n_t * bps
    for det, k in variants:
        for snr in cfg.snr_grid_db:
            sigma2, ebn0 = snr_config(snr, cfg)
            be, se = errs[(det, k, snr)]
            records.append(
                BerRecord(
                    detector=det,
                    k=k,
                    snr_db=float(snr),
                    ebn0_db=ebn0,
                    trials=cfg.trials,
                    packet_len=cfg.packet_len,
                    bits_total=bits_total,
                    bit_errors=be,
                    ber=be / bits_total,
                    sym_errors=se,
                )
            )
    return records


def _detect_packet(det, k, y, h, sigma2, spec, plain_sel, ext_sel):
    if det == "zf":
        return hard_slice(pseudoinverse(h) @ y, spec)
    if det == "mmse":
        return hard_slice(mmse_filter_direct(h, sigma2) @ y, spec)
    if det == "ml":
        return ml_detect_batch(y, h, spec)
    if det == "clr-zf":
        return lr_detect_batch(y, h, plain_sel[0], "zf", spec)
    if det == "klr-zf":
        return lr_detect_batch(y, h, plain_sel[k], "zf", spec)
    if det == "clr-mmse":
        return lr_detect_batch(y, h, ext_sel[0], "mmse", spec)
    if det == "klr-mmse":
        return lr_detect_batch(y, h, ext_sel[k], "mmse", spec)
    if det == "clr-mmse-sic":
        return lr_detect_batch(y, h, ext_sel[0], "sic-mmse", spec)
    if det == "klr-mmse-sic":
        return lr_detect_batch(y, h, ext_sel[k], "sic-mmse", spec)
    raise ValidationError(f"unknown detector {det!r}")


# --- persistence ---------------------------------------------------------------

def write_records(records, path) -> None:
    """Write BER records as CSV with the canonical header."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(CSV_HEADER.split(","))
        for rec in records:
            writer.writerow(
                [
                    rec.detector,
                    rec.k,
                    repr(rec.snr_db),
                    repr(rec.ebn0_db),
                    rec.trials,
                    rec.packet_len,
                    rec.bits_total,
                    rec.bit_errors,
                    repr(rec.ber),
                    rec.sym_errors,
                ]
            )


def load_complex_matrix(path) -> np.ndarray:
    """Read a complex matrix from text: one row per line, entries like 1.5-0.5j."""
    rows = []
    with open(path) as fh:
        for line in fh:
            line = line.strip()
            if not line:
                continue
            try:
                rows.append([complex(tok.strip()) for tok in line.split(",")])
            except ValueError as exc:
                raise ValidationError(f"bad matrix entry in {path}: {exc}") from exc
    if not rows or any(len(r) != len(rows[0]) for r in rows):
        raise ValidationError("matrix file rows must be nonempty and equal length")
    return np.array(rows, dtype=np.complex128)


def format_complex_matrix(m: np.ndarray) -> str:
    return "\n".join(
        ",".join(f"{z.real:g}{z.imag:+g}j" for z in row) for row in np.asarray(m)
    )
