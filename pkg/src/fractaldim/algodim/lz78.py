"""Classical LZ78 bit coder, kept as an alternative complexity backend.

Each phrase is the longest previously seen phrase plus one new bit.  The
phrase reference is sent as Elias-gamma of its backward distance in the
phrase table (1 = the most recent phrase, table size + 1 = the empty root),
followed by the extension bit.  A final phrase that ends exactly on an
existing entry is sent without extension bit.  Layout::

    flag:1  len:32  body          flag 0 = raw bits, 1 = phrase stream

LZ78 cannot reuse a long earlier block in one step (phrases grow by a
single bit), so on s || s it still pays about |s| / log|s| phrases for the
second copy.  The sliding-window coder in ``compress`` is the default.
"""

from __future__ import annotations

from functools import lru_cache

from .compress import gamma_len

LZ78_HEADER = 33


def _parse(bits: str, trie: dict | None = None, count: int = 0) -> tuple[int, dict, int]:
    """Cost in bits of the phrase stream for ``bits``, continuing a primed table."""
    if trie is None:
        trie = {}
    cost = 0
    node = 0  # 0 is the root; phrases are numbered 1..count
    for b in bits:
        key = (node, b)
        nxt = trie.get(key)
        if nxt is not None:
            node = nxt
            continue
        cost += gamma_len(count - node + 1) + 1
        count += 1
        trie[key] = count
        node = 0
    if node:
        cost += gamma_len(count - node + 1)
    return cost, trie, count


@lru_cache(maxsize=4096)
def lz78_klen(bits: str) -> int:
    return LZ78_HEADER + min(len(bits), _parse(bits)[0])


@lru_cache(maxsize=4096)
def lz78_cond_klen_primed(p: str, q: str) -> int:
    """Cost of p with the phrase table built from q beforehand."""
    _, trie, count = _parse(q)
    return LZ78_HEADER + min(len(p), _parse(p, trie, count)[0])


def lz78_compress(bits: str) -> str:
    """Explicit code word; its length equals lz78_klen(bits)."""
    head = format(len(bits), "032b")
    cost = _parse(bits)[0]
    if cost >= len(bits):
        return "0" + head + bits
    out = ["1", head]
    trie: dict = {}
    count = 0
    node = 0
    for b in bits:
        nxt = trie.get((node, b))
        if nxt is not None:
            node = nxt
            continue
        out.append(_gamma(count - node + 1) + b)
        count += 1
        trie[(node, b)] = count
        node = 0
    if node:
        out.append(_gamma(count - node + 1))
    return "".join(out)


def _gamma(n: int) -> str:
    s = format(n, "b")
    return "0" * (len(s) - 1) + s


def lz78_decompress(code: str) -> str:
    n = int(code[1:33], 2)
    if code[0] == "0":
        return code[33 : 33 + n]
    pos = 33
    phrases = [""]
    out: list[str] = []
    total = 0
    while total < n:
        zeros = 0
        while code[pos] == "0":
            zeros += 1
            pos += 1
        dist = int(code[pos : pos + zeros + 1], 2)
        pos += zeros + 1
        base = phrases[len(phrases) - dist]
        if total + len(base) == n:
            out.append(base)
            total = n
            break
        phrase = base + code[pos]
        pos += 1
        phrases.append(phrase)
        out.append(phrase)
        total += len(phrase)
    return "".join(out)
