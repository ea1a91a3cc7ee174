"""Shifted-XOR stream codec over GF(2).

A generation of equal-length raw bit streams is combined into coded
streams: each raw stream is prepended with a per-stream count of zero
bits (its shift) and the padded streams are XORed together.  Giving every
stream a distinct shift yields a triangular structure, so a receiver
holding enough raw/coded streams can recover the generation by solving a
binary linear system.

Bit streams are head-first: index 0 is the first transmitted bit.
Internally a stream is an ``int`` whose bit ``k`` holds stream index
``k``, which makes head-padding a left shift and combination a single
XOR.  Decoding runs Gaussian elimination over int bitsets and caches the
resulting solution operator per received-set shape, so repeated decodes
of the same shape cost only a handful of popcounts.
"""

from __future__ import annotations

import functools
import itertools
from dataclasses import dataclass
from typing import Iterable, Iterator, Sequence, Union

from .errors import ArityError, Inconsistent, LengthError, SearchExhausted, Unsolvable

#: Largest per-stream shift tried by the matrix search.
MAX_SEARCH_SHIFT = 16

#: Generation length at which delegated matrix searches are validated.
DEFAULT_SEARCH_LENGTH = 8


@dataclass(frozen=True)
class BitStream:
    """Immutable head-first sequence of bits.

    ``value`` packs the bits with sequence index ``k`` at integer bit
    ``k``; ``length`` may exceed the bit length of ``value`` (trailing
    zeros are implicit).
    """

    value: int
    length: int

    def __post_init__(self):
        if self.length < 0:
            raise LengthError(f"negative length {self.length}")
        if not 0 <= self.value < (1 << self.length):
            raise LengthError(f"value does not fit in {self.length} bits")

    @classmethod
    def from_text(cls, text: str) -> "BitStream":
        """Parse a head-first '0'/'1' string."""
        if any(c not in "01" for c in text):
            raise ValueError(f"not a bit string: {text!r}")
        return cls(int(text[::-1], 2) if text else 0, len(text))

    @classmethod
    def from_bits(cls, bits: Iterable[int]) -> "BitStream":
        value = 0
        n = 0
        for b in bits:
            if b not in (0, 1):
                raise ValueError(f"not a bit: {b!r}")
            value |= b << n
            n += 1
        return cls(value, n)

    @classmethod
    def zeros(cls, length: int) -> "BitStream":
        return cls(0, length)

    @classmethod
    def from_bytes(cls, data: bytes, bit_length: int) -> "BitStream":
        """Unpack bytes with the head bit in the MSB of byte 0."""
        if len(data) != (bit_length + 7) // 8:
            raise LengthError(
                f"{len(data)} bytes cannot hold exactly {bit_length} bits"
            )
        value = 0
        for k in range(bit_length):
            value |= ((data[k >> 3] >> (7 - (k & 7))) & 1) << k
        return cls(value, bit_length)

    def to_bytes(self) -> bytes:
        """Pack head bit into the MSB of byte 0, zero-padding the tail."""
        out = bytearray((self.length + 7) // 8)
        v = self.value
        k = 0
        while v:
            if v & 1:
                out[k >> 3] |= 1 << (7 - (k & 7))
            v >>= 1
            k += 1
        return bytes(out)

    @property
    def bits(self) -> tuple:
        return tuple((self.value >> k) & 1 for k in range(self.length))

    def __len__(self) -> int:
        return self.length

    def __iter__(self) -> Iterator[int]:
        return iter(self.bits)

    def __getitem__(self, k: int) -> int:
        if k < 0:
            k += self.length
        if not 0 <= k < self.length:
            raise IndexError(k)
        return (self.value >> k) & 1

    def __xor__(self, other: "BitStream") -> "BitStream":
        if self.length != other.length:
            raise LengthError("XOR requires equal lengths")
        return BitStream(self.value ^ other.value, self.length)

    def __str__(self) -> str:
        return "".join("01"[(self.value >> k) & 1] for k in range(self.length))


@dataclass(frozen=True)
class ShiftTuple:
    """Per-raw-stream counts of zero bits prepended before combining."""

    shifts: tuple

    def __post_init__(self):
        object.__setattr__(self, "shifts", tuple(int(s) for s in self.shifts))
        if not self.shifts:
            raise ArityError("empty shift tuple")
        if any(s < 0 for s in self.shifts):
            raise ValueError(f"negative shift in {self.shifts}")

    @property
    def arity(self) -> int:
        return len(self.shifts)

    @property
    def max_shift(self) -> int:
        return max(self.shifts)

    def __iter__(self) -> Iterator[int]:
        return iter(self.shifts)

    def __str__(self) -> str:
        return ",".join(str(s) for s in self.shifts)


@dataclass(frozen=True)
class Generation:
    """Equal-length raw streams encoded and broadcast together."""

    streams: tuple
    generation_id: int = 0

    def __post_init__(self):
        object.__setattr__(self, "streams", tuple(self.streams))
        if not self.streams:
            raise ValueError("generation needs at least one stream")
        lengths = {s.length for s in self.streams}
        if len(lengths) != 1:
            raise LengthError(f"mixed stream lengths {sorted(lengths)}")
        if self.streams[0].length < 1:
            raise LengthError("streams must be non-empty")
        if self.generation_id < 0:
            raise ValueError("generation_id must be non-negative")

    @classmethod
    def from_texts(cls, texts: Sequence[str], generation_id: int = 0) -> "Generation":
        return cls(tuple(BitStream.from_text(t) for t in texts), generation_id)

    @property
    def d_raw(self) -> int:
        return len(self.streams)

    @property
    def length(self) -> int:
        return self.streams[0].length


@dataclass(frozen=True)
class CodedStream:
    """One coded stream: the combined payload plus the tuple that made it."""

    payload: BitStream
    shift_tuple: ShiftTuple
    coded_index: int = 1

    def __post_init__(self):
        if self.coded_index < 1:
            raise ValueError("coded_index is 1-based")
        if self.payload.length < self.shift_tuple.max_shift + 1:
            raise LengthError("payload shorter than the largest shift allows")


@dataclass(frozen=True)
class RawItem:
    """A received raw stream, identified by its 1-based stream index."""

    stream_index: int
    payload: BitStream

    def __post_init__(self):
        if self.stream_index < 1:
            raise ValueError("stream_index is 1-based")


@dataclass(frozen=True)
class CodedItem:
    """A received coded stream, identified by its shift tuple."""

    shift_tuple: ShiftTuple
    payload: BitStream


ReceivedItem = Union[RawItem, CodedItem]


@dataclass(frozen=True)
class ReceivedSet:
    """The items available to a decoder; duplicates are rejected."""

    items: tuple

    def __post_init__(self):
        object.__setattr__(self, "items", tuple(self.items))
        raw_idx = [it.stream_index for it in self.items if isinstance(it, RawItem)]
        tuples = [it.shift_tuple for it in self.items if isinstance(it, CodedItem)]
        if len(raw_idx) != len(set(raw_idx)):
            raise ValueError("duplicate raw stream index")
        if len(tuples) != len(set(tuples)):
            raise ValueError("duplicate shift tuple")

    @property
    def raw_items(self) -> list:
        return sorted(
            (it for it in self.items if isinstance(it, RawItem)),
            key=lambda it: it.stream_index,
        )

    @property
    def coded_items(self) -> list:
        return sorted(
            (it for it in self.items if isinstance(it, CodedItem)),
            key=lambda it: it.shift_tuple.shifts,
        )


def shift_pad(x: BitStream, r: int, out_len: int) -> BitStream:
    """Prepend ``r`` zero bits to ``x`` and zero-pad the tail to ``out_len``."""
    if r < 0:
        raise LengthError(f"negative shift {r}")
    if out_len < r + x.length:
        raise LengthError(f"out_len {out_len} < shift {r} + length {x.length}")
    return BitStream(x.value << r, out_len)


def encode(gen: Generation, shift_tuple: ShiftTuple, coded_index: int = 1) -> CodedStream:
    """Combine a generation into one coded stream.

    The payload is the bitwise XOR of every raw stream prepended with its
    shift, with length ``L + max(shifts)``.
    """
    if shift_tuple.arity != gen.d_raw:
        raise ArityError(
            f"tuple arity {shift_tuple.arity} != raw stream count {gen.d_raw}"
        )
    value = 0
    for stream, r in zip(gen.streams, shift_tuple.shifts):
        value ^= stream.value << r
    payload = BitStream(value, gen.length + shift_tuple.max_shift)
    return CodedStream(payload, shift_tuple, coded_index)


class _Solver:
    """Cached GF(2) solution operator for one received-set shape.

    ``masks[c]`` selects the received bits whose parity equals unknown
    ``c`` (valid only when ``full_rank``).
    """

    __slots__ = ("n_unknowns", "rank", "full_rank", "masks")

    def __init__(self, n_unknowns: int, rank: int, masks: tuple):
        self.n_unknowns = n_unknowns
        self.rank = rank
        self.full_rank = rank == n_unknowns
        self.masks = masks


@functools.lru_cache(maxsize=None)
def _solver(raws: tuple, tuples: tuple, d_raw: int, length: int) -> _Solver:
    """Build the elimination for sorted raw indices plus sorted tuples."""
    if length < 1:
        raise LengthError(f"length must be >= 1, got {length}")
    for j in raws:
        if not 1 <= j <= d_raw:
            raise ValueError(f"raw stream index {j} outside 1..{d_raw}")
    for t in tuples:
        if t.arity != d_raw:
            raise ArityError(f"tuple arity {t.arity} != d_raw {d_raw}")

    ncols = d_raw * length
    amask = (1 << ncols) - 1
    rows = []
    offset = 0
    for j in raws:
        base = (j - 1) * length
        for k in range(length):
            rows.append((1 << (base + k)) | (1 << (ncols + offset + k)))
        offset += length
    for t in tuples:
        for m in range(length + t.max_shift):
            a = 0
            for idx, r in enumerate(t.shifts):
                k = m - r
                if 0 <= k < length:
                    a |= 1 << (idx * length + k)
            rows.append(a | (1 << (ncols + offset + m)))
        offset += length + t.max_shift

    # Forward elimination: pivot on the lowest set unknown bit of each row.
    pivots = {}
    for row in rows:
        cur = row
        low = cur & amask
        while low:
            c = (low & -low).bit_length() - 1
            p = pivots.get(c)
            if p is None:
                pivots[c] = cur
                break
            cur ^= p
            low = cur & amask

    rank = len(pivots)
    if rank < ncols:
        return _Solver(ncols, rank, ())

    # Full back-substitution: each pivot row keeps only its own unknown.
    for c in sorted(pivots, reverse=True):
        row = pivots[c]
        rest = (row & amask) ^ (1 << c)
        while rest:
            c2 = (rest & -rest).bit_length() - 1
            row ^= pivots[c2]
            rest = (row & amask) ^ (1 << c)
        pivots[c] = row
    masks = tuple(pivots[c] >> ncols for c in range(ncols))
    return _Solver(ncols, rank, masks)


def _canonical_kinds(raw_indices, shift_tuples):
    raws = tuple(sorted(set(raw_indices)))
    tuples = tuple(sorted(set(shift_tuples), key=lambda t: t.shifts))
    return raws, tuples


def decodable(
    raw_indices: Iterable[int],
    shift_tuples: Iterable[ShiftTuple],
    d_raw: int,
    length: int,
) -> bool:
    """True iff the given item kinds pin down every bit of the generation.

    A raw item contributes identity equations for its stream; a coded item
    contributes one equation per payload bit.  The answer depends on the
    generation length, so it is checked (and cached) per ``length``.
    """
    raws, tuples = _canonical_kinds(raw_indices, shift_tuples)
    return _solver(raws, tuples, d_raw, length).full_rank


def decode(
    received: ReceivedSet,
    d_raw: int,
    length: int,
    generation_id: int = 0,
) -> Generation:
    """Recover the unique generation consistent with every received item.

    Raises :class:`Unsolvable` when the items leave any bit undetermined
    and :class:`Inconsistent` when no generation matches them all.
    """
    raw_items = received.raw_items
    coded_items = received.coded_items
    for it in raw_items:
        if not 1 <= it.stream_index <= d_raw:
            raise ValueError(f"raw stream index {it.stream_index} outside 1..{d_raw}")
        if it.payload.length != length:
            raise LengthError(
                f"raw payload length {it.payload.length} != generation length {length}"
            )
    for it in coded_items:
        want = length + it.shift_tuple.max_shift
        if it.payload.length != want:
            raise LengthError(
                f"coded payload length {it.payload.length} != expected {want}"
            )

    raws = tuple(it.stream_index for it in raw_items)
    tuples = tuple(it.shift_tuple for it in coded_items)
    solver = _solver(raws, tuples, d_raw, length)
    if not solver.full_rank:
        raise Unsolvable(
            f"rank {solver.rank} < {solver.n_unknowns} unknowns for {len(received.items)} items"
        )

    y = 0
    offset = 0
    for it in raw_items:
        y |= it.payload.value << offset
        offset += length
    for it in coded_items:
        y |= it.payload.value << offset
        offset += length + it.shift_tuple.max_shift

    masks = solver.masks
    streams = []
    for j in range(d_raw):
        base = j * length
        v = 0
        for k in range(length):
            v |= ((masks[base + k] & y).bit_count() & 1) << k
        streams.append(BitStream(v, length))

    # Re-derive every received payload from the solution; a mismatch means
    # the system had no solution at all.
    for it in raw_items:
        if streams[it.stream_index - 1].value != it.payload.value:
            raise Inconsistent(f"raw stream {it.stream_index} contradicts solution")
    for it in coded_items:
        v = 0
        for j, r in enumerate(it.shift_tuple.shifts):
            v ^= streams[j].value << r
        if v != it.payload.value:
            raise Inconsistent(f"coded stream {it.shift_tuple} contradicts solution")

    return Generation(tuple(streams), generation_id)


_BUILTIN_MATRICES = {
    2: ((0, 1), (0, 2)),
    3: ((0, 1, 2), (0, 2, 1), (0, 3, 5)),
}


def default_shift_matrix(
    d_raw: int,
    n_coded: int,
    search_length: int = DEFAULT_SEARCH_LENGTH,
) -> list:
    """Return the standard shift matrix for ``n_coded`` coded streams.

    The two- and three-stream matrices are fixed; other shapes fall back
    to :func:`search_shift_matrix` validated at ``search_length``.
    """
    if d_raw < 2:
        raise ValueError(f"d_raw must be >= 2, got {d_raw}")
    if n_coded < 1:
        raise ValueError(f"n_coded must be >= 1, got {n_coded}")
    builtin = _BUILTIN_MATRICES.get(d_raw)
    if builtin is not None and n_coded <= len(builtin):
        return [ShiftTuple(s) for s in builtin[:n_coded]]
    return search_shift_matrix(d_raw, n_coded, search_length)


def _subset_checks_pass(chosen, new, d_raw, length):
    """Check every raw/tuple combination that involves the new tuple."""
    m = len(chosen) + 1
    for k in range(d_raw + 1):
        need = d_raw - k
        if need < 1 or need > m:
            continue
        for raw_combo in itertools.combinations(range(1, d_raw + 1), k):
            for tup_combo in itertools.combinations(chosen, need - 1):
                if not decodable(raw_combo, tup_combo + (new,), d_raw, length):
                    return False
    return True


def search_shift_matrix(
    d_raw: int,
    n_coded: int,
    length: int,
    max_shift: int = MAX_SEARCH_SHIFT,
) -> list:
    """First-fit search for a shift matrix usable at generation length ``length``.

    Candidate tuples fix the first shift at 0 and use pairwise-distinct
    shifts (the triangular structure needs a distinct zero-pad count per
    stream).  Matrices are explored in lexicographic order of their
    flattened shift sequence; a matrix is accepted when, for every k, any
    k raw streams plus any ``d_raw - k`` of its tuples are decodable at
    ``length``.
    """
    if d_raw < 2:
        raise ValueError(f"d_raw must be >= 2, got {d_raw}")
    if n_coded < 1:
        raise ValueError(f"n_coded must be >= 1, got {n_coded}")
    if length < 1:
        raise LengthError(f"length must be >= 1, got {length}")

    candidates = [
        ShiftTuple((0,) + rest)
        for rest in itertools.product(range(1, max_shift + 1), repeat=d_raw - 1)
        if len(set(rest)) == d_raw - 1
    ]

    def extend(chosen, start):
        for i in range(start, len(candidates)):
            t = candidates[i]
            if not _subset_checks_pass(chosen, t, d_raw, length):
                continue
            picked = chosen + (t,)
            if len(picked) == n_coded:
                return picked
            deeper = extend(picked, i + 1)
            if deeper is not None:
                return deeper
        return None

    found = extend((), 0)
    if found is None:
        raise SearchExhausted(
            f"no {n_coded}-tuple matrix for {d_raw} streams within shift {max_shift}"
        )
    return list(found)
