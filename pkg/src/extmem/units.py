"""Parsing and formatting of human-readable units.

Canonical units everywhere in the package: bytes (int), nanoseconds (int),
requests/second and bytes/second (float). Input accepts suffixed strings:
"4KiB", "2kB", "16us", "93.75MIOPS", "24000MB/s".
Binary prefixes (KiB/MiB/GiB) are powers of 1024; decimal ones (kB/MB/GB)
are powers of 1000, matching link-bandwidth conventions where MB/s = 1e6 B/s.
"""

from __future__ import annotations

import re

from .errors import DataError

_BYTE_SUFFIXES = {
    "": 1,
    "b": 1,
    "kib": 1024,
    "mib": 1024**2,
    "gib": 1024**3,
    "kb": 1000,
    "mb": 1000**2,
    "gb": 1000**3,
}

_TIME_SUFFIXES_NS = {
    "ns": 1.0,
    "us": 1e3,
    "µs": 1e3,
    "ms": 1e6,
    "s": 1e9,
}

_RATE_SUFFIXES = {
    "iops": 1.0,
    "kiops": 1e3,
    "miops": 1e6,
    "giops": 1e9,
    "/s": 1.0,
}

_BW_SUFFIXES = {
    "b/s": 1.0,
    "kb/s": 1e3,
    "mb/s": 1e6,
    "gb/s": 1e9,
    "kib/s": 1024.0,
    "mib/s": 1024.0**2,
    "gib/s": 1024.0**3,
}

_NUM_RE = re.compile(r"^\s*([0-9]+(?:\.[0-9]+)?(?:[eE][+-]?[0-9]+)?)\s*(.*?)\s*$")


def _split(text: str) -> tuple[float, str]:
    m = _NUM_RE.match(text)
    if not m:
        raise DataError(f"cannot parse quantity: {text!r}")
    return float(m.group(1)), m.group(2).lower()


def parse_bytes(text: str | int) -> int:
    """Parse a byte count; bare numbers are bytes."""
    if isinstance(text, int):
        return text
    value, suffix = _split(text)
    if suffix not in _BYTE_SUFFIXES:
        raise DataError(f"unknown byte suffix {suffix!r} in {text!r}")
    result = value * _BYTE_SUFFIXES[suffix]
    if result != int(result):
        raise DataError(f"byte quantity {text!r} is not a whole number of bytes")
    return int(result)


def parse_duration_ns(text: str | int) -> int:
    """Parse a duration; bare numbers are nanoseconds."""
    if isinstance(text, int):
        return text
    value, suffix = _split(text)
    if suffix == "":
        suffix = "ns"
    if suffix not in _TIME_SUFFIXES_NS:
        raise DataError(f"unknown time suffix {suffix!r} in {text!r}")
    return int(round(value * _TIME_SUFFIXES_NS[suffix]))


def parse_rate(text: str | float) -> float:
    """Parse a request rate; bare numbers are requests/second."""
    if isinstance(text, (int, float)):
        return float(text)
    value, suffix = _split(text)
    if suffix == "":
        return value
    if suffix not in _RATE_SUFFIXES:
        raise DataError(f"unknown rate suffix {suffix!r} in {text!r}")
    return value * _RATE_SUFFIXES[suffix]


def parse_bandwidth(text: str | float) -> float:
    """Parse a bandwidth; bare numbers are bytes/second."""
    if isinstance(text, (int, float)):
        return float(text)
    value, suffix = _split(text)
    if suffix == "":
        return value
    if suffix not in _BW_SUFFIXES:
        raise DataError(f"unknown bandwidth suffix {suffix!r} in {text!r}")
    return value * _BW_SUFFIXES[suffix]


def parse_int_list(text: str, parser=int) -> list:
    """Parse a comma-separated list with an element parser."""
    items = [w.strip() for w in text.split(",") if w.strip()]
    if not items:
        raise DataError(f"empty list: {text!r}")
    return [parser(w) for w in items]
