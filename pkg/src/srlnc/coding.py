"""Sparse random linear coding over GF(q).

A source generation is ``K`` packets.  Every broadcast slot carries one coded
packet whose coding vector has independent coefficients drawn from the biased
law: zero with probability ``p``, and each of the ``q - 1`` nonzero values
with probability ``(1 - p) / (q - 1)``.  ``p = 1/q`` recovers the uniform
(classic) coefficient distribution; larger ``p`` makes the code sparser.

Receivers run online Gaussian elimination: ``DecoderState`` keeps a reduced
echelon basis of the coding vectors absorbed so far and reports whether each
new vector was innovative.  Payload encoding and decoding are provided for
round trips and demonstrations; statistical experiments track vectors only.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConfigError, NotDecodableError
from .gf import GF, get_field


@dataclass(frozen=True)
class CodeParams:
    """Static description of one coded generation.

    K: source packets per generation (at least 1, typically <= 64).
    q: field order, a power of two between 2 and 256.
    p: probability that a coding coefficient is zero, in [1/q, 1).
    n_hat: transmission budget in slots, strictly greater than K.
    """

    K: int
    q: int
    p: float
    n_hat: int

    def __post_init__(self):
        if not isinstance(self.K, int) or self.K < 1:
            raise ConfigError(f"K must be a positive integer, got {self.K!r}")
        get_field(self.q)  # validates q
        lo = 1.0 / self.q
        if not (lo <= self.p < 1.0):
            raise ConfigError(
                f"p={self.p} outside [{lo}, 1): below 1/q the coefficients are "
                "no longer sparse-biased, and p=1 would send only zero vectors"
            )
        if not isinstance(self.n_hat, int) or self.n_hat <= self.K:
            raise ConfigError(
                f"n_hat={self.n_hat!r} must be an integer above K={self.K}"
            )

    @property
    def field(self) -> GF:
        return get_field(self.q)


def sample_coding_vector(params: CodeParams, rng: np.random.Generator) -> np.ndarray:
    """Draw one length-K coding vector from the biased coefficient law.

    Two draws are consumed per call (a uniform block for the zero mask and an
    integer block for the nonzero values) so the stream layout does not depend
    on the outcome.
    """
    zero_mask = rng.random(params.K) < params.p
    values = rng.integers(1, params.q, size=params.K, dtype=np.uint8)
    return np.where(zero_mask, np.uint8(0), values)


def sample_coding_matrix(
    params: CodeParams, n: int, rng: np.random.Generator
) -> np.ndarray:
    """Draw ``n`` coding vectors at once; rows follow the same law as
    :func:`sample_coding_vector`."""
    zero_mask = rng.random((n, params.K)) < params.p
    values = rng.integers(1, params.q, size=(n, params.K), dtype=np.uint8)
    return np.where(zero_mask, np.uint8(0), values)


class DecoderState:
    """Online Gaussian elimination over GF(q).

    Maintains a reduced echelon basis of the innovative coding vectors seen so
    far: every basis row has a leading 1 at its pivot column and every pivot
    column is zero in all other rows.  For q = 2 rows are packed into machine
    integers (bit i = coordinate i) so an absorption is a handful of XORs; for
    larger fields rows are uint8 arrays and elimination goes through the
    field's multiplication table.

    The original (unreduced) vector of each innovative absorption is kept so
    payloads can be decoded later; dependent vectors leave the state unchanged.
    """

    def __init__(self, K: int, q: int):
        if not isinstance(K, int) or K < 1:
            raise ConfigError(f"K must be a positive integer, got {K!r}")
        self.K = K
        self.field = get_field(q)
        self.q = q
        self._packed = q == 2 and K <= 64  # bit-packed rows need one machine word
        self._pivot_rows: dict[int, int] = {}        # packed: pivot bit -> packed row
        self._rows: dict[int, np.ndarray] = {}       # generic: pivot index -> uint8 row
        self.originals: list[np.ndarray] = []

    @property
    def rank(self) -> int:
        return len(self._pivot_rows) if self._packed else len(self._rows)

    @property
    def defect(self) -> int:
        return self.K - self.rank

    def absorb(self, vector: np.ndarray) -> bool:
        """Fold one coding vector into the basis.

        Returns True when the vector was innovative (rank grew by one).  The
        vector is validated for length and element range; the state is left
        untouched for dependent vectors.
        """
        v = np.asarray(vector, dtype=np.uint8)
        if v.shape != (self.K,):
            raise ConfigError(f"expected a length-{self.K} vector, got shape {v.shape}")
        self.field.check_elements(v)
        if self.rank == self.K:
            return False
        if self._packed:
            grew = self._absorb_packed(int(np.bitwise_or.reduce(
                v.astype(np.uint64) << np.arange(self.K, dtype=np.uint64))))
        else:
            grew = self._absorb_row(v.copy())
        if grew:
            self.originals.append(v.copy())
        return grew

    def _absorb_packed(self, x: int) -> bool:
        rows = self._pivot_rows
        for piv, row in rows.items():
            if (x >> piv) & 1:
                x ^= row
        if x == 0:
            return False
        piv = (x & -x).bit_length() - 1
        for other_piv, row in rows.items():
            if (row >> piv) & 1:
                rows[other_piv] = row ^ x
        rows[piv] = x
        return True

    def _absorb_row(self, w: np.ndarray) -> bool:
        gf = self.field
        rows = self._rows
        for piv, row in rows.items():
            c = int(w[piv])
            if c:
                w ^= gf.mul_table[c, row]
        nz = np.nonzero(w)[0]
        if nz.size == 0:
            return False
        piv = int(nz[0])
        lead = int(w[piv])
        if lead != 1:
            w = gf.mul_table[gf.inv(lead), w]
        for other_piv, row in rows.items():
            c = int(row[piv])
            if c:
                rows[other_piv] = row ^ gf.mul_table[c, w]
        rows[piv] = w
        return True

    def basis_matrix(self) -> np.ndarray:
        """Current basis as a (rank, K) uint8 array, rows ordered by pivot."""
        out = np.zeros((self.rank, self.K), dtype=np.uint8)
        if self._packed:
            for i, piv in enumerate(sorted(self._pivot_rows)):
                packed = self._pivot_rows[piv]
                for j in range(self.K):
                    out[i, j] = (packed >> j) & 1
        else:
            for i, piv in enumerate(sorted(self._rows)):
                out[i] = self._rows[piv]
        return out


def encode_payload(gf: GF, sources, coding_vector: np.ndarray) -> np.ndarray:
    """Combine K equal-length source payload blocks with one coding vector.

    Payload entries are field symbols (values below q).  The exception is
    q = 2, where payload bytes may be arbitrary: coefficients are 0/1 and the
    combination is a plain XOR, which is GF(2)-linear bit by bit.
    """
    v = np.asarray(coding_vector, dtype=np.uint8)
    if len(sources) != v.shape[0]:
        raise ConfigError("one coefficient per source block is required")
    blocks = [np.asarray(s, dtype=np.uint8) for s in sources]
    length = blocks[0].shape[0]
    if any(b.shape != (length,) for b in blocks):
        raise ConfigError("source blocks must share one length")
    gf.check_elements(v)
    if gf.q > 2:
        for b in blocks:
            gf.check_elements(b)
    acc = np.zeros(length, dtype=np.uint8)
    for g, b in zip(v, blocks):
        g = int(g)
        if g == 0:
            continue
        acc ^= b if gf.q == 2 else gf.mul_table[g, b]
    return acc


def decode_payloads(state: DecoderState, payloads) -> list[np.ndarray]:
    """Recover the K source blocks from a full-rank decoder state.

    ``payloads`` must line up with ``state.originals``: one payload block per
    innovative absorption, in absorption order.  Raises NotDecodableError
    while the defect is positive.
    """
    if state.defect != 0:
        raise NotDecodableError(
            f"defect is {state.defect}; {state.defect} more innovative "
            "packets are needed before payloads can be recovered"
        )
    if len(payloads) != state.K:
        raise ConfigError(f"expected {state.K} payload blocks, got {len(payloads)}")
    gf = state.field
    G = np.stack([np.asarray(v, dtype=np.uint8) for v in state.originals])
    C = np.stack([np.asarray(c, dtype=np.uint8) for c in payloads])
    K = state.K

    # Gauss-Jordan on [G | C]; G is invertible because the originals were
    # innovative when absorbed.
    for col in range(K):
        pivot = next(r for r in range(col, K) if G[r, col])
        if pivot != col:
            G[[col, pivot]] = G[[pivot, col]]
            C[[col, pivot]] = C[[pivot, col]]
        lead = int(G[col, col])
        if lead != 1:
            G[col] = gf.mul_table[gf.inv(lead), G[col]]
            C[col] = gf.mul_table[gf.inv(lead), C[col]]
        for r in range(K):
            if r == col:
                continue
            c = int(G[r, col])
            if c:
                G[r] ^= gf.mul_table[c, G[col]]
                C[r] ^= C[col] if gf.q == 2 else gf.mul_table[c, C[col]]
    return [C[r] for r in range(K)]
