"""Measured constants for the complexity proxy, kept in a versioned file.

The slack budget of the chain-rule check is sigma(r) = c0 + c1 * sqrt(r)
bits.  c0 is twice the single-stream header (one header for each side of
an inequality); c1 is the smallest value that lets every chain-rule
residual on the canonical corpus pass.  Both are re-measured by
``calibrate()``, which is deterministic, so the shipped file can be
regenerated byte for byte.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path

from ..io import atomic_write_text
from .compress import ENCODER_VERSION, HEADER_OVERHEAD, JOIN_OVERHEAD, klen
from .encoding import encode
from .estimates import chain_rule_residuals, dyadic_point, periodic_point, prng_point

CALIBRATION_VERSION = 1
DEFAULT_PATH = Path(__file__).resolve().parent.parent / "data" / "calibration.txt"
CORPUS_PRECISIONS = (512, 1024, 2048, 4096)
CORPUS_BITS = 4096
_KEYS = (
    "version",
    "encoder",
    "header_overhead",
    "join_overhead",
    "c0",
    "c1",
    "klen_zero_ratio",
    "klen_prng_ratio",
    "corpus",
    "precisions",
)


class CalibrationError(RuntimeError):
    pass


@dataclass(frozen=True)
class Calibration:
    header_overhead: int
    join_overhead: int
    c0: float
    c1: float
    klen_zero_ratio: float
    klen_prng_ratio: float
    version: int = CALIBRATION_VERSION
    encoder: str = ENCODER_VERSION
    corpus: str = "zero,prng1,prng2,periodic"
    precisions: tuple[int, ...] = CORPUS_PRECISIONS

    def to_text(self) -> str:
        lines = ["# complexity-proxy calibration; regenerate with `fractaldim calibrate`"]
        for key in _KEYS:
            val = getattr(self, key)
            if isinstance(val, tuple):
                val = ",".join(str(v) for v in val)
            elif isinstance(val, float):
                val = repr(val)
            lines.append(f"{key} = {val}")
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str) -> "Calibration":
        kv = {}
        for line in text.splitlines():
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            key, sep, val = line.partition("=")
            if not sep:
                raise CalibrationError(f"malformed calibration line: {line!r}")
            kv[key.strip()] = val.strip()
        missing = [k for k in _KEYS if k not in kv]
        if missing:
            raise CalibrationError(f"calibration file lacks {', '.join(missing)}")
        if int(kv["version"]) != CALIBRATION_VERSION or kv["encoder"] != ENCODER_VERSION:
            raise CalibrationError(
                f"calibration version {kv['version']}/{kv['encoder']} does not match "
                f"{CALIBRATION_VERSION}/{ENCODER_VERSION}; run `fractaldim calibrate`"
            )
        return cls(
            header_overhead=int(kv["header_overhead"]),
            join_overhead=int(kv["join_overhead"]),
            c0=float(kv["c0"]),
            c1=float(kv["c1"]),
            klen_zero_ratio=float(kv["klen_zero_ratio"]),
            klen_prng_ratio=float(kv["klen_prng_ratio"]),
            version=int(kv["version"]),
            encoder=kv["encoder"],
            corpus=kv["corpus"],
            precisions=tuple(int(v) for v in kv["precisions"].split(",")),
        )


def canonical_corpus(precision: int = CORPUS_BITS) -> dict:
    return {
        "zero": dyadic_point([0], precision),
        "prng1": prng_point(1, 1, precision),
        "prng2": prng_point(2, 1, precision),
        "periodic": periodic_point("0110", 1, precision),
    }


def calibrate() -> Calibration:
    """Measure the overheads and slack constants on the canonical corpus."""
    corpus = canonical_corpus()
    zero_ratio = klen("0" * CORPUS_BITS) / CORPUS_BITS
    prng_ratio = klen(encode(corpus["prng1"], CORPUS_BITS).bits) / CORPUS_BITS
    c0 = 2.0 * HEADER_OVERHEAD
    provisional = Calibration(HEADER_OVERHEAD, JOIN_OVERHEAD, 0.0, 0.0, zero_ratio, prng_ratio)
    c1 = 0.0
    for x in corpus.values():
        for y in corpus.values():
            for r in CORPUS_PRECISIONS:
                res = chain_rule_residuals(x, y, r, provisional)
                defect = max(0.0, -min(res.residuals) * r - c0)
                c1 = max(c1, defect / math.sqrt(r))
    c1 = math.ceil(c1 * 1e4) / 1e4
    return Calibration(HEADER_OVERHEAD, JOIN_OVERHEAD, c0, c1, zero_ratio, prng_ratio)


def write_calibration(path=DEFAULT_PATH) -> Calibration:
    cal = calibrate()
    atomic_write_text(path, cal.to_text())
    return cal


def load_calibration(path=None) -> Calibration:
    path = Path(path) if path is not None else DEFAULT_PATH
    if not path.exists():
        raise CalibrationError(f"calibration file {path} not found; run `fractaldim calibrate` first")
    return Calibration.from_text(path.read_text(encoding="utf-8"))
