"""Square M-QAM constellations with Gray bit mapping.

The constellation is normalized to unit average symbol energy: with
a = sqrt(6/(M-1)) the per-dimension amplitude levels are
{+-a/2, +-3a/2, ..., +-(sqrt(M)-1)a/2}.  Bits map Gray-coded and
independently onto the I and Q level indices (I bits first, MSB first).
"""

from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .errors import ValidationError
from .linalg import as_vector


def _gray_encode(i):
    return i ^ (i >> 1)


def _gray_decode(g, nbits: int):
    b = np.asarray(g).copy()
    shift = 1
    while shift < nbits:
        b ^= b >> shift
        shift <<= 1
    return b


@dataclass(frozen=True)
class ConstellationSpec:
    """QAM order M (perfect square, power of 4) and derived normalization."""

    m: int

    def __post_init__(self):
        if self.m < 4:
            raise ValidationError(f"M must be 4, 16, 64, ... got {self.m}")
        side = int(round(self.m**0.5))
        if side * side != self.m or (side & (side - 1)) != 0:
            raise ValidationError(f"M must be 4, 16, 64, ... got {self.m}")

    @property
    def a(self) -> float:
        return float(np.sqrt(6.0 / (self.m - 1)))

    @property
    def side(self) -> int:
        return int(round(self.m**0.5))

    @property
    def bits_per_symbol(self) -> int:
        return int(round(np.log2(self.m)))

    @cached_property
    def levels(self) -> np.ndarray:
        idx = np.arange(self.side)
        return (2 * idx - (self.side - 1)) * (self.a / 2)

    @cached_property
    def alphabet(self) -> np.ndarray:
        """All M symbols indexed by their bit pattern read as an integer."""
        bps = self.bits_per_symbol
        half = bps // 2
        codes = np.arange(self.m)
        gi = _gray_decode(codes >> half, half)
        gq = _gray_decode(codes & ((1 << half) - 1), half)
        return self.levels[gi] + 1j * self.levels[gq]


def _bits_to_levels(bits: np.ndarray, spec: ConstellationSpec) -> np.ndarray:
    """bits shape (..., bits_per_symbol/2) -> amplitude levels."""
    half = spec.bits_per_symbol // 2
    weights = 1 << np.arange(half - 1, -1, -1)
    g = bits @ weights
    return spec.levels[_gray_decode(g, half)]


def _levels_to_bits(vals: np.ndarray, spec: ConstellationSpec) -> np.ndarray:
    """Amplitude levels -> Gray bits, shape (..., bits_per_symbol/2)."""
    half = spec.bits_per_symbol // 2
    idx = np.rint(vals / spec.a + (spec.side - 1) / 2).astype(np.int64)
    if np.any(idx < 0) or np.any(idx >= spec.side):
        raise ValidationError("value outside the constellation grid")
    if np.max(np.abs(vals - spec.levels[idx])) > 1e-6 * spec.a:
        raise ValidationError("value is not a constellation level")
    g = _gray_encode(idx)
    shifts = np.arange(half - 1, -1, -1)
    return (g[..., np.newaxis] >> shifts) & 1


def map_bits(bits: np.ndarray, spec: ConstellationSpec) -> np.ndarray:
    """Gray-map bit blocks to symbols; bits shape (..., bits_per_symbol)."""
    bits = np.asarray(bits)
    bps = spec.bits_per_symbol
    if bits.shape[-1] != bps:
        raise ValidationError(f"need {bps} bits per symbol, got {bits.shape[-1]}")
    half = bps // 2
    return _bits_to_levels(bits[..., :half], spec) + 1j * _bits_to_levels(
        bits[..., half:], spec
    )


def unmap_symbols(symbols: np.ndarray, spec: ConstellationSpec) -> np.ndarray:
    """Inverse of map_bits on exact constellation points."""
    symbols = np.asarray(symbols, dtype=np.complex128)
    bi = _levels_to_bits(symbols.real, spec)
    bq = _levels_to_bits(symbols.imag, spec)
    return np.concatenate([bi, bq], axis=-1)


def modulate(bits, spec: ConstellationSpec, n_t: int) -> np.ndarray:
    """Map n_t * log2(M) bits to a length-n_t symbol vector."""
    bits = np.asarray(bits).ravel()
    bps = spec.bits_per_symbol
    if bits.shape[0] != n_t * bps:
        raise ValidationError(
            f"need {n_t * bps} bits for {n_t} symbols, got {bits.shape[0]}"
        )
    return map_bits(bits.reshape(n_t, bps), spec)


def demodulate(symbols, spec: ConstellationSpec) -> np.ndarray:
    """Map constellation points back to bits; exact inverse of modulate."""
    symbols = as_vector(symbols)
    return unmap_symbols(symbols, spec).ravel()
