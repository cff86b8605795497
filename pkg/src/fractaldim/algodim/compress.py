"""Bit-level sliding-window compressor used as the complexity proxy.

A code word describes one or more bit segments (a single string, or a pair
for joint and conditional complexity).  Layout::

    mode:3  len(seg_1):32 ... len(seg_k):32  body

    mode 0      raw: the segments verbatim
    mode 1..4   stride t = mode: each segment is split into its t tracks
                seg[0::t], ..., seg[t-1::t]; all tracks of all segments are
                concatenated and coded as one token stream
    mode 5      separate (k >= 2 only): no length fields; each segment
                follows as its own complete single-segment code word

Token stream, read until the announced total length is produced::

    0 gamma(run) <run literal bits>
    1 gamma(offset) gamma(length)      copy from `offset` bits back;
                                       overlapping copies are allowed

gamma is the Elias-gamma code of a positive integer.  The encoder tries
every mode and keeps the shortest, so

    klen(s) <= len(s) + HEADER_OVERHEAD              (raw mode)
    klen_joint(p, q) <= klen(p) + klen(q) + JOIN_OVERHEAD   (separate mode)

hold exactly.  ``klen`` is the length of a decodable code word, so it is an
upper bound on Kolmogorov complexity up to the size of the decoder.
"""

from __future__ import annotations

from functools import lru_cache
from typing import Sequence

import numpy as np

MODE_BITS = 3
LENGTH_BITS = 32
HEADER_OVERHEAD = MODE_BITS + LENGTH_BITS
JOIN_OVERHEAD = MODE_BITS
MAX_STRIDE = 4
MODE_RAW = 0
MODE_SEPARATE = 5
SEED_BITS = 20  # shortest match the index can find
MAX_CANDIDATES = 16
ENCODER_VERSION = "swgamma-1"


def gamma_len(n: int) -> int:
    return 2 * (n.bit_length() - 1) + 1


def gamma_code(n: int) -> str:
    if n < 1:
        raise ValueError("gamma code needs n >= 1")
    b = format(n, "b")
    return "0" * (len(b) - 1) + b


def _to_array(bits: str) -> np.ndarray:
    if not bits:
        return np.zeros(0, dtype=np.uint8)
    a = np.frombuffer(bits.encode("ascii"), dtype=np.uint8) - 48
    if a.max() > 1:
        raise ValueError("bit strings may only contain '0' and '1'")
    return a


def _tracks(seg: np.ndarray, t: int) -> np.ndarray:
    if t == 1:
        return seg
    return np.concatenate([seg[j::t] for j in range(t)])


def _untracks(buf: np.ndarray, n: int, t: int) -> np.ndarray:
    out = np.zeros(n, dtype=np.uint8)
    pos = 0
    for j in range(t):
        k = len(range(j, n, t))
        out[j::t] = buf[pos : pos + k]
        pos += k
    return out


def _tokenize(arr: np.ndarray, start: int = 0) -> list[tuple]:
    """Greedy parse of arr[start:], with arr[:start] available as history.

    Returns tokens ("L", position, run) and ("C", offset, length).
    """
    n = len(arr)
    tokens: list[tuple] = []
    if n - start <= 0:
        return tokens
    m = n - SEED_BITS + 1
    if m <= 1:
        return [("L", start, n - start)]
    weights = np.left_shift(np.int64(1), np.arange(SEED_BITS - 1, -1, -1, dtype=np.int64))
    keys = np.lib.stride_tricks.sliding_window_view(arr, SEED_BITS).astype(np.int64) @ weights
    order = np.lexsort((np.arange(m), keys))
    sk = keys[order]
    new_group = np.ones(m, dtype=bool)
    new_group[1:] = sk[1:] != sk[:-1]
    group_start = np.maximum.accumulate(np.where(new_group, np.arange(m), 0))
    rank = np.empty(m, dtype=np.int64)
    rank[order] = np.arange(m)
    gstart = group_start[rank]
    seen = np.flatnonzero(rank > gstart)
    seen = seen[seen >= start]

    lit = start
    i = start
    while True:
        k = np.searchsorted(seen, i)
        if k >= len(seen):
            break
        j = int(seen[k])
        best_gain, best = 0, None
        lo = max(int(gstart[j]), int(rank[j]) - MAX_CANDIDATES)
        for c in order[lo : rank[j]][::-1]:
            c = int(c)
            length = _match_len(arr, c, j, n)
            off = j - c
            gain = length - (1 + gamma_len(off) + gamma_len(length))
            if gain > best_gain:
                best_gain, best = gain, (off, length)
        if best is None:
            i = j + 1
            continue
        if j > lit:
            tokens.append(("L", lit, j - lit))
        tokens.append(("C", best[0], best[1]))
        i = lit = j + best[1]
    if n > lit:
        tokens.append(("L", lit, n - lit))
    return tokens


def _match_len(arr: np.ndarray, c: int, j: int, n: int) -> int:
    length = 0
    w = 64
    while j + length < n:
        w = min(w, n - j - length)
        neq = np.flatnonzero(arr[c + length : c + length + w] != arr[j + length : j + length + w])
        if len(neq):
            return length + int(neq[0])
        length += w
        w *= 2
    return length


def _token_cost(tokens: list[tuple]) -> int:
    total = 0
    for kind, a, b in tokens:
        if kind == "L":
            total += 1 + gamma_len(b) + b
        else:
            total += 1 + gamma_len(a) + gamma_len(b)
    return total


def _stride_buffer(segs: Sequence[np.ndarray], t: int) -> np.ndarray:
    if not segs:
        return np.zeros(0, dtype=np.uint8)
    return np.concatenate([_tracks(s, t) for s in segs])


def _plan(segs: tuple[np.ndarray, ...]) -> tuple[int, int, list]:
    """Best (cost, mode, payload) for the given segments."""
    k = len(segs)
    head = MODE_BITS + LENGTH_BITS * k
    best = (head + sum(len(s) for s in segs), MODE_RAW, None)
    for t in range(1, MAX_STRIDE + 1):
        tokens = _tokenize(_stride_buffer(segs, t))
        cost = head + _token_cost(tokens)
        if cost < best[0]:
            best = (cost, t, tokens)
    if k >= 2:
        cost = MODE_BITS + sum(_klen_arrays((s,)) for s in segs)
        if cost < best[0]:
            best = (cost, MODE_SEPARATE, None)
    return best


def _klen_arrays(segs: tuple[np.ndarray, ...]) -> int:
    return _plan(segs)[0]


@lru_cache(maxsize=8192)
def klen_segments(segs: tuple[str, ...]) -> int:
    return _klen_arrays(tuple(_to_array(s) for s in segs))


def klen(bits: str) -> int:
    """Code length in bits of the shortest code word this coder finds."""
    return klen_segments((bits,))


def klen_joint(*segments: str) -> int:
    return klen_segments(tuple(segments))


def cond_klen(p: str, q: str) -> int:
    """Proxy for K(p | q): klen_joint(q, p) - klen(q), clamped at zero."""
    return max(0, klen_joint(q, p) - klen(q))


def mutual_info(p: str, q: str) -> int:
    """Proxy for I(p : q) = K(p) - K(p | q); may be slightly negative."""
    return klen(p) - cond_klen(p, q)


def mutual_info_clamped(p: str, q: str) -> int:
    return max(0, mutual_info(p, q))


@lru_cache(maxsize=8192)
def cond_klen_primed(p: str, q: str) -> int:
    """Conditional code length with the window pre-loaded with q.

    Second route to K(p | q): only the code for p is charged, and copies
    may reach back into q.  The layout is mode:3 len(p):32 body, with the
    same stride transform applied to q and p.
    """
    pa, qa = _to_array(p), _to_array(q)
    best = HEADER_OVERHEAD + len(pa)
    for t in range(1, MAX_STRIDE + 1):
        buf = np.concatenate([_tracks(qa, t), _tracks(pa, t)])
        cost = HEADER_OVERHEAD + _token_cost(_tokenize(buf, len(qa)))
        best = min(best, cost)
    return best


# --- explicit encoder/decoder --------------------------------------------


def _emit_tokens(buf: np.ndarray, tokens: list[tuple]) -> list[str]:
    out = []
    for kind, a, b in tokens:
        if kind == "L":
            out.append("0" + gamma_code(b) + "".join("01"[v] for v in buf[a : a + b]))
        else:
            out.append("1" + gamma_code(a) + gamma_code(b))
    return out


def compress(*segments: str) -> str:
    """Code word for one or more bit strings; len(compress(s)) == klen(s)."""
    if not segments:
        raise ValueError("need at least one segment")
    arrays = tuple(_to_array(s) for s in segments)
    for s in arrays:
        if len(s) >= 1 << LENGTH_BITS:
            raise ValueError("segment too long for the length field")
    cost, mode, tokens = _plan(arrays)
    parts = [format(mode, f"0{MODE_BITS}b")]
    if mode == MODE_SEPARATE:
        parts.extend(compress(s) for s in segments)
    else:
        parts.extend(format(len(s), f"0{LENGTH_BITS}b") for s in arrays)
        if mode == MODE_RAW:
            parts.extend(segments)
        else:
            parts.extend(_emit_tokens(_stride_buffer(arrays, mode), tokens))
    code = "".join(parts)
    assert len(code) == cost
    return code


class _Reader:
    def __init__(self, code: str, pos: int = 0):
        self.code = code
        self.pos = pos

    def take(self, k: int) -> str:
        if self.pos + k > len(self.code):
            raise ValueError("truncated code word")
        s = self.code[self.pos : self.pos + k]
        self.pos += k
        return s

    def gamma(self) -> int:
        zeros = 0
        while self.take(1) == "0":
            zeros += 1
        return int("1" + self.take(zeros), 2) if zeros else 1


def _decode(reader: _Reader, k: int) -> list[str]:
    mode = int(reader.take(MODE_BITS), 2)
    if mode == MODE_SEPARATE:
        if k < 2:
            raise ValueError("separate mode needs several segments")
        return [_decode(reader, 1)[0] for _ in range(k)]
    lengths = [int(reader.take(LENGTH_BITS), 2) for _ in range(k)]
    if mode == MODE_RAW:
        return [reader.take(n) for n in lengths]
    if not 1 <= mode <= MAX_STRIDE:
        raise ValueError(f"unknown mode {mode}")
    total = sum(lengths)
    buf: list[str] = []
    while len(buf) < total:
        if reader.take(1) == "0":
            buf.extend(reader.take(reader.gamma()))
        else:
            off, length = reader.gamma(), reader.gamma()
            if off > len(buf):
                raise ValueError("copy reaches before the start")
            src = len(buf) - off
            for m in range(length):
                buf.append(buf[src + m])
    if len(buf) != total:
        raise ValueError("token stream overruns the announced length")
    arr = np.frombuffer("".join(buf).encode("ascii"), dtype=np.uint8) - 48 if total else np.zeros(0, np.uint8)
    out, pos = [], 0
    for n in lengths:
        tr = arr[pos : pos + n]
        pos += n
        seg = _untracks(tr, n, mode) if mode > 1 else tr
        out.append("".join("01"[v] for v in seg))
    return out


def decompress(code: str, segments: int = 1) -> list[str]:
    reader = _Reader(code)
    out = _decode(reader, segments)
    if reader.pos != len(code):
        raise ValueError("trailing bits after code word")
    return out
