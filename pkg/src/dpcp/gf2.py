"""GF(2) vectors, Hadamard truth tables, and query-counted oracle access.

The encoding of a vector ``alpha`` is the full truth table of the linear
functional ``v -> alpha . v`` on {0,1}^n.  Table index convention: the
coordinate of vertex j is bit j of the integer index, vertex 0 least
significant.  A verifier never sees ``alpha``; it can only query the
(possibly corrupted) table through an :class:`OracleSession`, which counts
queries and random bits so protocol budgets can be certified.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Optional, Sequence, Tuple, Union

import numpy as np

from . import kernels, rng
from .errors import CapacityError, DimensionError, FormatError

MAX_DIM = 20
DEFAULT_ENUM_BUDGET = 1 << 24

MAGIC = b"DPCP"
FORMAT_VERSION = 1

PROTO_RAW = 0
PROTO_NONBIPARTITE = 1
PROTO_LEADER = 2
PROTO_SPAN = 3


class BitVec:
    """Immutable fixed-length vector over GF(2)."""

    __slots__ = ("_bits",)

    def __init__(self, bits: Iterable[int]):
        arr = np.asarray(list(bits) if not isinstance(bits, np.ndarray) else bits,
                         dtype=np.uint8)
        if arr.ndim != 1 or arr.size == 0:
            raise DimensionError("BitVec needs a non-empty 1-d bit sequence")
        if np.any(arr > 1):
            raise FormatError("BitVec entries must be 0 or 1")
        arr = arr.copy()
        arr.setflags(write=False)
        self._bits = arr

    @classmethod
    def from_int(cls, value: int, n: int) -> "BitVec":
        if value < 0 or value >> n:
            raise DimensionError(f"value {value} does not fit in {n} bits")
        return cls([(value >> j) & 1 for j in range(n)])

    @classmethod
    def zeros(cls, n: int) -> "BitVec":
        return cls([0] * n)

    @classmethod
    def ones(cls, n: int) -> "BitVec":
        return cls([1] * n)

    @classmethod
    def unit(cls, n: int, i: int) -> "BitVec":
        bits = [0] * n
        bits[i] = 1
        return cls(bits)

    @property
    def bits(self) -> np.ndarray:
        return self._bits

    def to_int(self) -> int:
        v = 0
        for j in range(self._bits.size):
            v |= int(self._bits[j]) << j
        return v

    def weight(self) -> int:
        return int(self._bits.sum())

    def __len__(self) -> int:
        return self._bits.size

    def __getitem__(self, j: int) -> int:
        return int(self._bits[j])

    def __xor__(self, other: "BitVec") -> "BitVec":
        if len(self) != len(other):
            raise DimensionError(f"length mismatch: {len(self)} vs {len(other)}")
        return BitVec(self._bits ^ other._bits)

    def __eq__(self, other) -> bool:
        return isinstance(other, BitVec) and np.array_equal(self._bits, other._bits)

    def __hash__(self) -> int:
        return hash((self._bits.size, self.to_int()))

    def __repr__(self) -> str:
        return f"BitVec({''.join(str(int(b)) for b in self._bits)})"


def inner_product(a: BitVec, b: BitVec) -> int:
    """Parity of the coordinate-wise product, i.e. a.b over GF(2)."""
    if len(a) != len(b):
        raise DimensionError(f"length mismatch: {len(a)} vs {len(b)}")
    return int(np.bitwise_xor.reduce(a.bits & b.bits))


class ProofTable:
    """Claimed truth table of one encoded vector: 2^dim bits."""

    __slots__ = ("_dim", "_bits")

    def __init__(self, dim: int, bits: Iterable[int]):
        if dim < 1:
            raise DimensionError("table dimension must be positive")
        arr = np.asarray(bits if isinstance(bits, np.ndarray) else list(bits),
                         dtype=np.uint8)
        if arr.size != (1 << dim):
            raise FormatError(f"table for dim {dim} needs {1 << dim} bits, got {arr.size}")
        if np.any(arr > 1):
            raise FormatError("table entries must be 0 or 1")
        arr = arr.copy()
        arr.setflags(write=False)
        self._dim = dim
        self._bits = arr

    @property
    def dim(self) -> int:
        return self._dim

    @property
    def size(self) -> int:
        return self._bits.size

    @property
    def bits(self) -> np.ndarray:
        return self._bits

    def __getitem__(self, k: int) -> int:
        return int(self._bits[k])

    def __eq__(self, other) -> bool:
        return (isinstance(other, ProofTable) and self._dim == other._dim
                and np.array_equal(self._bits, other._bits))

    def __hash__(self) -> int:
        return hash((self._dim, self._bits.tobytes()))

    def __repr__(self) -> str:
        return f"ProofTable(dim={self._dim})"


def hadamard_encode(alpha: BitVec, max_dim: int = MAX_DIM) -> ProofTable:
    """Encode alpha as the full truth table of v -> alpha.v."""
    n = len(alpha)
    if n > max_dim:
        raise CapacityError(f"dimension {n} exceeds the table budget ({max_dim})")
    return ProofTable(n, kernels.hadamard_table(alpha.bits))


class MultiProof:
    """Ordered sequence of equal-dimension proof tables."""

    __slots__ = ("_parts",)

    def __init__(self, parts: Sequence[ProofTable]):
        parts = tuple(parts)
        if not parts:
            raise FormatError("a proof needs at least one part")
        dim = parts[0].dim
        if any(p.dim != dim for p in parts):
            raise DimensionError("all proof parts must share one dimension")
        self._parts = parts

    @property
    def parts(self) -> Tuple[ProofTable, ...]:
        return self._parts

    @property
    def dim(self) -> int:
        return self._parts[0].dim

    @property
    def part_count(self) -> int:
        return len(self._parts)

    @property
    def total_bits(self) -> int:
        return len(self._parts) << self.dim

    def part(self, idx: int) -> ProofTable:
        return self._parts[idx]

    def flat_bits(self) -> np.ndarray:
        return np.concatenate([p.bits for p in self._parts])

    def stacked(self) -> np.ndarray:
        """Parts as a (part_count, 2^dim) uint8 array for the kernels."""
        return np.stack([p.bits for p in self._parts])

    @classmethod
    def from_flat(cls, dim: int, part_count: int, flat: np.ndarray) -> "MultiProof":
        size = 1 << dim
        if flat.size != part_count * size:
            raise FormatError("flat bit array does not match dim/part count")
        return cls([ProofTable(dim, flat[i * size:(i + 1) * size])
                    for i in range(part_count)])

    def __eq__(self, other) -> bool:
        return isinstance(other, MultiProof) and self._parts == other._parts

    def __repr__(self) -> str:
        return f"MultiProof(dim={self.dim}, parts={self.part_count})"


def serialize_proof(proof: MultiProof, protocol_id: int = PROTO_RAW) -> bytes:
    """Binary proof format.

    Header: magic ``DPCP``, version byte, protocol id byte, dim as u16 LE,
    part count as u16 LE.  Body: parts concatenated, bit-packed 8 table
    entries per byte, entry k at byte k//8 bit k%8.
    """
    if not 0 <= protocol_id < 256:
        raise FormatError("protocol id must fit one byte")
    header = (MAGIC + bytes([FORMAT_VERSION, protocol_id])
              + proof.dim.to_bytes(2, "little")
              + proof.part_count.to_bytes(2, "little"))
    body = b"".join(np.packbits(p.bits, bitorder="little").tobytes()
                    for p in proof.parts)
    return header + body


def deserialize_proof(data: bytes) -> Tuple[MultiProof, int]:
    """Parse the binary proof format; returns (proof, protocol_id)."""
    if len(data) < 10:
        raise FormatError("proof file too short for header")
    if data[:4] != MAGIC:
        raise FormatError("bad magic, not a proof file")
    if data[4] != FORMAT_VERSION:
        raise FormatError(f"unsupported format version {data[4]}")
    protocol_id = data[5]
    dim = int.from_bytes(data[6:8], "little")
    part_count = int.from_bytes(data[8:10], "little")
    if dim < 1 or dim > MAX_DIM:
        raise FormatError(f"dimension {dim} out of range")
    if part_count < 1:
        raise FormatError("part count must be at least 1")
    part_bytes = ((1 << dim) + 7) // 8
    expect = 10 + part_count * part_bytes
    if len(data) != expect:
        raise FormatError(f"malformed proof: expected {expect} bytes, got {len(data)}")
    parts = []
    for i in range(part_count):
        chunk = data[10 + i * part_bytes:10 + (i + 1) * part_bytes]
        bits = np.unpackbits(np.frombuffer(chunk, dtype=np.uint8),
                             bitorder="little")[: 1 << dim]
        parts.append(ProofTable(dim, bits))
    return MultiProof(parts), protocol_id


class OracleSession:
    """Query-counted, seeded access to one proof.

    Randomness is counter based: each draw site is labelled with
    ``(pass, kind, rep)`` and hashed together with the session seed, so two
    sessions over the same proof with the same seed produce identical
    transcripts.  Every table lookup bumps ``query_count`` by one and every
    random bit drawn bumps ``random_bits_used`` by one.
    """

    __slots__ = ("proof", "seed", "query_count", "random_bits_used",
                 "_pass", "trace")

    def __init__(self, proof: MultiProof, seed: int, record_trace: bool = False):
        self.proof = proof
        self.seed = seed & rng.MASK64
        self.query_count = 0
        self.random_bits_used = 0
        self._pass = 0
        self.trace: Optional[list] = [] if record_trace else None

    def begin_pass(self, pass_idx: int) -> None:
        self._pass = pass_idx

    def query(self, part: int, index: int) -> int:
        if not 0 <= part < self.proof.part_count:
            raise DimensionError(f"part {part} out of range")
        table = self.proof.part(part)
        if not 0 <= index < table.size:
            raise DimensionError(f"index {index} out of range for dim {table.dim}")
        self.query_count += 1
        value = table[index]
        if self.trace is not None:
            self.trace.append(("q", part, index, value))
        return value

    def draw_bits(self, kind: int, rep: int, nbits: int) -> int:
        if not 0 <= nbits <= 64:
            raise DimensionError("draws are limited to 64 bits")
        value = rng.draw_key(self.seed, self._pass, kind, rep) & ((1 << nbits) - 1)
        self.random_bits_used += nbits
        if self.trace is not None:
            self.trace.append(("r", self._pass, kind, rep, nbits, value))
        return value

    def draw_vec(self, kind: int, rep: int, n: int) -> BitVec:
        return BitVec.from_int(self.draw_bits(kind, rep, n), n)

    def draw_punctured(self, kind: int, rep: int, n: int, hole: int) -> int:
        """Uniform point of {0,1}^n with coordinate ``hole`` forced to zero.

        Costs n-1 random bits (nothing is drawn for the fixed coordinate).
        """
        raw = self.draw_bits(kind, rep, n - 1) if n > 1 else 0
        low = raw & ((1 << hole) - 1)
        return low | ((raw >> hole) << (hole + 1))


@dataclass(frozen=True)
class BlrTest:
    """Descriptor for the linearity test: independent repetitions, each
    drawing x, y uniformly and checking t(x) ^ t(y) == t(x ^ y)."""
    repetitions: int = 1


TestDescriptor = Union[BlrTest]


def blr_linearity_test(session: OracleSession, part: int, repetitions: int = 1) -> bool:
    """Run the linearity check; accepts iff every repetition passes.

    Consumes exactly 3 queries and 2n random bits per repetition.
    """
    n = session.proof.dim
    ok = True
    for j in range(repetitions):
        x = session.draw_bits(kernels.KIND_BLR_X, j, n)
        y = session.draw_bits(kernels.KIND_BLR_Y, j, n)
        if session.query(part, x) ^ session.query(part, y) != session.query(part, x ^ y):
            ok = False
    return ok


def self_corrected_query(session: OracleSession, part: int, v: BitVec,
                         kind: int = kernels.KIND_POINT, rep: int = 0) -> int:
    """Robust read of the encoded functional at a fixed point v.

    Draws a uniform mask r (n random bits) and returns
    ``table(v ^ r) ^ table(r)``: exactly 2 queries.  On a table at distance
    d from its nearest codeword this returns the codeword value at v with
    probability at least 1 - 2d.
    """
    n = session.proof.dim
    if len(v) != n:
        raise DimensionError(f"query point has length {len(v)}, proof dim is {n}")
    return self_corrected_query_int(session, part, v.to_int(), kind, rep)


def self_corrected_query_int(session: OracleSession, part: int, v: int,
                             kind: int = kernels.KIND_POINT, rep: int = 0) -> int:
    n = session.proof.dim
    r = session.draw_bits(kind, rep, n)
    return session.query(part, v ^ r) ^ session.query(part, r)


def exact_rejection_probability(table: ProofTable, test: TestDescriptor,
                                budget: int = DEFAULT_ENUM_BUDGET) -> Fraction:
    """Exact rejection probability of a test by full enumeration.

    For the linearity test the per-repetition randomness space is all
    (x, y) pairs, 4^dim points; k independent repetitions reject with
    probability 1 - (1 - p)^k.
    """
    if not isinstance(test, BlrTest):
        raise FormatError(f"unknown test descriptor: {test!r}")
    size = table.size
    if size * size > budget:
        raise CapacityError(
            f"randomness space {size * size} exceeds budget {budget}")
    fails = int(kernels.blr_fail_count(table.bits))
    p_rep = Fraction(fails, size * size)
    if test.repetitions == 1:
        return p_rep
    return 1 - (1 - p_rep) ** test.repetitions


def distance_to_nearest_linear(table: ProofTable,
                               max_dim: int = MAX_DIM) -> Tuple[Fraction, BitVec]:
    """Minimum normalized Hamming distance to any encoded vector.

    Ties break to the numerically smallest vector encoding.  Computed with
    a Walsh-Hadamard transform, so the 2^dim candidate sweep stays cheap.
    """
    if table.dim > max_dim:
        raise CapacityError(f"dimension {table.dim} exceeds budget ({max_dim})")
    dist, alpha = kernels.fwht_min_distance(table.bits)
    return Fraction(int(dist), table.size), BitVec.from_int(int(alpha), table.dim)


def corrected_wrong_count(table: ProofTable, v: int, want: int) -> int:
    """Number of masks r for which table(v^r) ^ table(r) != want.

    Exact helper behind the self-correction analyses: the ratio over 2^dim
    is the failure probability of one robust read at v.
    """
    ones = int(kernels.corrected_one_count(table.bits, v))
    return (table.size - ones) if want == 1 else ones
