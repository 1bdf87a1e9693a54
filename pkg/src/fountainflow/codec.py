"""Systematic erasure codecs: a real random-linear codec over GF(256) and
an ideal counting codec for simulation.

A source block of ``block_size`` bytes is split into ``k`` symbols of
``symbol_size`` bytes (the last one zero-padded).  Encoded symbols are
addressed by an encoding symbol id (ESI):

* ESI < k: the symbol is the ESI-th source symbol verbatim (systematic).
* ESI >= k: the symbol is a dense random-linear combination of all k
  source symbols.  The combination coefficients are a pure function of
  (block_id, esi) — see :func:`repair_coefficients` — so encoder and
  decoder derive them independently.

Decoding succeeds exactly when the received coefficient rows reach rank
k.  Rank is tracked incrementally on every arrival; the payload solve is
deferred to completion, where it runs as one batched elimination against
the received systematic symbols (fast path: all-systematic reception is
a plain copy-out).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import gf256
from . import gf256
from .gf256 import gf_matmul

MASK64 = (1 << 64) - 1

# splitmix64 constants; the seeding recipe is part of the wire contract
# (documented in FORMAT.md) so independent implementations interoperate.
_GAMMA = 0x9E3779B97F4A7C15
_MIX1 = 0xBF58476D1CE4E5B9
_MIX2 = 0x94D049BB133111EB
_SEED_B = 0xD1B54A32D192ED03
_SEED_C = 0x8BB84B93962EACC9


class CodecError(Exception):
    """Base class for codec failures."""


class MalformedSymbolError(CodecError):
    """Symbol rejected: wrong payload size or inconsistent identifiers."""


def repair_coefficients(block_id: int, esi: int, k: int) -> np.ndarray:
    """Coefficient row for a repair symbol (esi >= k), length k.

    Bytes are drawn from splitmix64 seeded with
    ``(block_id * 0x9E3779B97F4A7C15 + esi * 0xD1B54A32D192ED03
    + 0x8BB84B93962EACC9) mod 2^64``, consuming each 64-bit output
    least-significant byte first.  An all-zero row (probability 256^-k)
    is patched by setting coefficient ``esi % k`` to 1 so every repair
    symbol carries information.
    """
    return repair_coefficient_rows(block_id, np.array([esi], dtype=np.uint64), k)[0]


if gf256.HAVE_NUMBA:
    from numba import njit

    @njit(cache=True, nogil=True)
    def _nb_coeff_rows(block_id, esis, k, out):
        gamma = np.uint64(_GAMMA)
        mix1 = np.uint64(_MIX1)
        mix2 = np.uint64(_MIX2)
        for r in range(esis.shape[0]):
            seed = (block_id * gamma
                    + esis[r] * np.uint64(_SEED_B)
                    + np.uint64(_SEED_C))
            i = 0
            word = np.uint64(1)
            any_nonzero = False
            while i < k:
                z = seed + word * gamma
                word += np.uint64(1)
                z = (z ^ (z >> np.uint64(30))) * mix1
                z = (z ^ (z >> np.uint64(27))) * mix2
                z = z ^ (z >> np.uint64(31))
                stop = min(8, k - i)
                for b in range(stop):
                    v = np.uint8((z >> np.uint64(8 * b)) & np.uint64(0xFF))
                    out[r, i + b] = v
                    if v:
                        any_nonzero = True
                i += stop
            if not any_nonzero:
                out[r, int(esis[r]) % k] = 1


def repair_coefficient_rows(block_id: int, esis: np.ndarray, k: int) -> np.ndarray:
    """Coefficient rows for many ESIs at once.

    splitmix64 output n is a stateless mix of seed + n*gamma, so whole
    rows are generated without sequential state.
    """
    if gf256.HAVE_NUMBA:
        out = np.empty((esis.shape[0], k), dtype=np.uint8)
        _nb_coeff_rows(np.uint64(block_id & MASK64), esis.astype(np.uint64),
                       k, out)
        return out
    n_words = -(-k // 8)
    with np.errstate(over="ignore"):
        seeds = (np.uint64(block_id) * np.uint64(_GAMMA)
                 + esis.astype(np.uint64) * np.uint64(_SEED_B)
                 + np.uint64(_SEED_C))
        states = (seeds[:, None]
                  + np.arange(1, n_words + 1, dtype=np.uint64)[None, :]
                  * np.uint64(_GAMMA))
        z = states
        z = (z ^ (z >> np.uint64(30))) * np.uint64(_MIX1)
        z = (z ^ (z >> np.uint64(27))) * np.uint64(_MIX2)
        z = z ^ (z >> np.uint64(31))
    rows = z.astype("<u8").view(np.uint8)[:, :k].copy()
    zero = ~rows.any(axis=1)
    if zero.any():
        for i in np.nonzero(zero)[0]:
            rows[i, int(esis[i]) % k] = 1
    return rows


@dataclass
class SourceBlock:
    """A block of application bytes split into fixed-size symbols."""

    block_id: int
    data: bytes
    symbol_size: int

    def __post_init__(self) -> None:
        if self.symbol_size < 1:
            raise ValueError("symbol_size must be >= 1")
        if len(self.data) < 1:
            raise ValueError("empty block")

    @property
    def k(self) -> int:
        return -(-len(self.data) // self.symbol_size)

    @property
    def block_size(self) -> int:
        return len(self.data)


@dataclass(frozen=True)
class EncodedSymbol:
    block_id: int
    esi: int
    payload: bytes


def _padded_matrix(data: bytes, k: int, symbol_size: int) -> np.ndarray:
    buf = np.zeros(k * symbol_size, dtype=np.uint8)
    buf[: len(data)] = np.frombuffer(data, dtype=np.uint8)
    return buf.reshape(k, symbol_size)


class BlockEncoder:
    """Generates any number of encoded symbols for one source block."""

    def __init__(self, block: SourceBlock):
        self.block_id = block.block_id
        self.symbol_size = block.symbol_size
        self.block_size = block.block_size
        self.k = block.k
        self._rows = _padded_matrix(block.data, self.k, self.symbol_size)
        self._repair_cache: dict[int, bytes] = {}

    def cached(self, esi: int) -> bool:
        return esi in self._repair_cache

    def precompute(self, esis) -> None:
        """Batch-encode the repair symbols in `esis` (one matrix product)."""
        todo = sorted(
            e for e in esis if e >= self.k and e not in self._repair_cache
        )
        if not todo:
            return
        coeffs = repair_coefficient_rows(
            self.block_id, np.array(todo, dtype=np.uint64), self.k)
        out = gf_matmul(coeffs, self._rows)
        for i, esi in enumerate(todo):
            self._repair_cache[esi] = out[i].tobytes()

    def symbol(self, esi: int) -> bytes:
        if esi < 0 or esi > 0xFFFFFFFF:
            raise ValueError(f"esi out of range: {esi}")
        if esi < self.k:
            return self._rows[esi].tobytes()
        cached = self._repair_cache.pop(esi, None)
        if cached is not None:
            return cached
        coeffs = repair_coefficients(self.block_id, esi, self.k)
        out = gf_matmul(coeffs[None, :], self._rows)
        return out[0].tobytes()


def encode_symbol(block: SourceBlock, esi: int) -> EncodedSymbol:
    """One-shot convenience around :class:`BlockEncoder`."""
    return EncodedSymbol(block.block_id, esi, BlockEncoder(block).symbol(esi))


class BlockDecoder:
    """Incremental-rank decoder for one block.

    Coefficient rows are eliminated on arrival (cheap: k bytes per row),
    so ``rank`` is exact after every add.  Payload elimination happens
    once, in :meth:`try_finish`, as a batched solve for the missing
    systematic symbols.
    """

    def __init__(self, block_id: int, k: int, symbol_size: int, block_size: int):
        if k < 1 or symbol_size < 1 or block_size < 1:
            raise ValueError("k, symbol_size, block_size must be >= 1")
        if -(-block_size // symbol_size) != k:
            raise ValueError("block_size / symbol_size inconsistent with k")
        self.block_id = block_id
        self.k = k
        self.symbol_size = symbol_size
        self.block_size = block_size
        self.rank = 0
        self.seen_esis: set[int] = set()
        self._sys: dict[int, np.ndarray] = {}       # esi -> payload row
        # raw repair rows, stored contiguously as they arrive
        self._rep_coeffs = np.empty((0, k), dtype=np.uint8)
        self._rep_payloads = np.empty((0, symbol_size), dtype=np.uint8)
        self._nrep = 0
        # echelon state for rank tracking (coefficient rows only):
        # systematic pivots as a column mask, repair pivots packed densely
        self._sys_mask = np.zeros(k, dtype=bool)
        self._piv_rows = np.empty((0, k), dtype=np.uint8)
        self._piv_cols = np.empty(0, dtype=np.int64)
        self._npiv = 0
        self._result: bytes | None = None

    @property
    def decoded(self) -> bool:
        return self.rank >= self.k

    def _grow_pivots(self) -> None:
        cap = max(8, 2 * len(self._piv_rows))
        rows = np.zeros((cap, self.k), dtype=np.uint8)
        cols = np.zeros(cap, dtype=np.int64)
        rows[: self._npiv] = self._piv_rows[: self._npiv]
        cols[: self._npiv] = self._piv_cols[: self._npiv]
        self._piv_rows, self._piv_cols = rows, cols

    def _store_repair(self, coeffs: np.ndarray, payload: np.ndarray) -> None:
        if self._nrep == len(self._rep_coeffs):
            cap = max(8, 2 * len(self._rep_coeffs))
            c = np.zeros((cap, self.k), dtype=np.uint8)
            p = np.zeros((cap, self.symbol_size), dtype=np.uint8)
            c[: self._nrep] = self._rep_coeffs[: self._nrep]
            p[: self._nrep] = self._rep_payloads[: self._nrep]
            self._rep_coeffs, self._rep_payloads = c, p
        self._rep_coeffs[self._nrep] = coeffs
        self._rep_payloads[self._nrep] = payload
        self._nrep += 1

    def _reduce(self, row: np.ndarray) -> int:
        """Reduce a coefficient row in place; returns its pivot column or -1.

        Elimination against systematic pivots is a column mask (unit
        rows); repair pivots are eliminated by the table kernel.  The
        two alternate until a fresh pivot emerges.
        """
        while True:
            row[self._sys_mask] = 0
            col = gf256.reduce_row(row, self._piv_rows, self._piv_cols, self._npiv)
            if col < 0:
                return -1
            if not self._sys_mask[col]:
                return col
            # pivot fell on a systematic column introduced after some
            # repair pivot rows; zero it and keep reducing

    def add(self, esi: int, payload: bytes) -> bool:
        """Add one received symbol; returns True if it increased rank.

        Duplicate ESIs are no-ops.  Payload length must equal
        symbol_size.
        """
        if len(payload) != self.symbol_size:
            raise MalformedSymbolError(
                f"payload length {len(payload)} != symbol_size {self.symbol_size}"
            )
        if esi in self.seen_esis:
            return False
        self.seen_esis.add(esi)
        if self.decoded:
            return False
        row_payload = np.frombuffer(payload, dtype=np.uint8)
        if esi < self.k:
            repair_pivot_here = (
                self._npiv > 0 and (self._piv_cols[: self._npiv] == esi).any()
            )
            if not repair_pivot_here:
                self._sys[esi] = row_payload
                self._sys_mask[esi] = True
                self.rank += 1
                return True
            # Column already pivoted by a repair row: fall through to the
            # generic path with a unit coefficient row (may be dependent).
            coeffs = np.zeros(self.k, dtype=np.uint8)
            coeffs[esi] = 1
        else:
            coeffs = repair_coefficients(self.block_id, esi, self.k)
        work = coeffs.copy()
        col = self._reduce(work)
        if col < 0:
            return False
        if self._npiv == len(self._piv_rows):
            self._grow_pivots()
        self._piv_rows[self._npiv] = work
        self._piv_cols[self._npiv] = col
        self._npiv += 1
        self._store_repair(coeffs, row_payload)
        self.rank += 1
        return True

    def try_finish(self) -> bytes | None:
        """Return the original block bytes once rank == k, else None."""
        if not self.decoded:
            return None
        if self._result is not None:
            return self._result
        out = np.empty((self.k, self.symbol_size), dtype=np.uint8)
        have = sorted(self._sys)
        missing = [i for i in range(self.k) if i not in self._sys]
        for i in have:
            out[i] = self._sys[i]
        if missing:
            solved = self._solve_missing(have, missing)
            for idx, col in enumerate(missing):
                out[col] = solved[idx]
        self._result = out.reshape(-1)[: self.block_size].tobytes()
        return self._result

    def _solve_missing(self, have: list[int], missing: list[int]) -> np.ndarray:
        # Pick a full-rank subset of repair rows restricted to the
        # missing columns, then solve the small dense system.
        m = len(missing)
        all_coeffs = self._rep_coeffs[: self._nrep]
        sub = np.ascontiguousarray(all_coeffs[:, missing])
        chosen = _independent_rows(sub, m)
        coeff_full = all_coeffs[chosen]
        payloads = self._rep_payloads[: self._nrep][chosen].copy()
        if have:
            have_rows = np.stack([self._sys[i] for i in have])
            payloads ^= gf_matmul(
                np.ascontiguousarray(coeff_full[:, have]), have_rows)
        a = np.ascontiguousarray(coeff_full[:, missing])
        if not gf256.solve_augmented(a, payloads):
            raise CodecError("singular system")
        return payloads


def _independent_rows(mat: np.ndarray, need: int) -> list[int]:
    """Indices of the first `need` linearly independent rows of mat."""
    width = mat.shape[1]
    pivots = np.zeros((need, width), dtype=np.uint8)
    pivcols = np.zeros(need, dtype=np.int64)
    npiv = 0
    chosen: list[int] = []
    for j in range(mat.shape[0]):
        row = mat[j].copy()
        col = gf256.reduce_row(row, pivots, pivcols, npiv)
        if col < 0:
            continue
        pivots[npiv] = row
        pivcols[npiv] = col
        npiv += 1
        chosen.append(j)
        if npiv == need:
            return chosen
    raise CodecError("rank bookkeeping out of sync with stored rows")


class IdealBlockEncoder:
    """Payload-free encoder: symbols carry no data, only identity."""

    def __init__(self, block_id: int, k: int, symbol_size: int, block_size: int):
        self.block_id = block_id
        self.k = k
        self.symbol_size = symbol_size
        self.block_size = block_size

    def cached(self, esi: int) -> bool:
        return True

    def precompute(self, esis) -> None:
        pass

    def symbol(self, esi: int) -> bytes:
        return b""


class IdealBlockDecoder:
    """Counting decoder: done exactly at k distinct ESIs."""

    def __init__(self, block_id: int, k: int, symbol_size: int, block_size: int):
        self.block_id = block_id
        self.k = k
        self.symbol_size = symbol_size
        self.block_size = block_size
        self.seen_esis: set[int] = set()

    @property
    def rank(self) -> int:
        return min(len(self.seen_esis), self.k)

    @property
    def decoded(self) -> bool:
        return len(self.seen_esis) >= self.k

    def add(self, esi: int, payload: bytes) -> bool:
        if esi in self.seen_esis:
            return False
        if self.decoded:
            self.seen_esis.add(esi)
            return False
        self.seen_esis.add(esi)
        return True

    def try_finish(self) -> bytes | None:
        if not self.decoded:
            return None
        return bytes(self.block_size)


@dataclass(frozen=True)
class RandomLinearCodec:
    """Factory for the real GF(256) encoder/decoder pair."""

    carries_data: bool = field(default=True, init=False)

    def make_encoder(self, block: SourceBlock) -> BlockEncoder:
        return BlockEncoder(block)

    def make_decoder(self, block_id: int, k: int, symbol_size: int,
                     block_size: int) -> BlockDecoder:
        return BlockDecoder(block_id, k, symbol_size, block_size)


@dataclass(frozen=True)
class IdealCodec:
    """Factory for the payload-free counting codec used by simulations."""

    carries_data: bool = field(default=False, init=False)

    def make_encoder(self, block: SourceBlock) -> IdealBlockEncoder:
        return IdealBlockEncoder(block.block_id, block.k, block.symbol_size,
                                 block.block_size)

    def make_encoder_meta(self, block_id: int, k: int, symbol_size: int,
                          block_size: int) -> IdealBlockEncoder:
        return IdealBlockEncoder(block_id, k, symbol_size, block_size)

    def make_decoder(self, block_id: int, k: int, symbol_size: int,
                     block_size: int) -> IdealBlockDecoder:
        return IdealBlockDecoder(block_id, k, symbol_size, block_size)


def ideal_codec(k: int | None = None) -> IdealCodec:
    """Codec whose decoder finishes exactly at k distinct symbols."""
    return IdealCodec()


# Operation-style aliases over the class API.
def decoder_add(state, sym: EncodedSymbol) -> bool:
    if sym.block_id != state.block_id:
        raise MalformedSymbolError(
            f"block id mismatch: {sym.block_id} != {state.block_id}"
        )
    return state.add(sym.esi, sym.payload)


def decoder_try_finish(state) -> bytes | None:
    return state.try_finish()
