"""Key-value text format helpers shared by the attack and statistics files."""

from __future__ import annotations


class ParseError(ValueError):
    """Malformed input file; carries the path and 1-based line number."""

    def __init__(self, path, line: int, message: str):
        super().__init__(f"{path}:{line}: {message}")
        self.path = path
        self.line = line


def fmt(x: float) -> str:
    """Format a float with 12 significant digits and a lowercase exponent."""
    return format(float(x), ".12g")


def read_kv_lines(path) -> list[tuple[int, str, str]]:
    """Read ``key=value`` lines; blank lines and '#' comments are skipped."""
    entries = []
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            if "=" not in line:
                raise ParseError(path, lineno, f"expected key=value, got {line!r}")
            key, _, value = line.partition("=")
            key = key.strip()
            value = value.strip()
            if not key:
                raise ParseError(path, lineno, "empty key")
            entries.append((lineno, key, value))
    return entries


def parse_float(path, lineno: int, key: str, value: str) -> float:
    try:
        x = float(value)
    except ValueError:
        raise ParseError(path, lineno, f"{key}: invalid number {value!r}") from None
    if x != x or x in (float("inf"), float("-inf")):
        raise ParseError(path, lineno, f"{key}: non-finite value {value!r}")
    return x


def parse_int(path, lineno: int, key: str, value: str) -> int:
    try:
        return int(value)
    except ValueError:
        raise ParseError(path, lineno, f"{key}: invalid integer {value!r}") from None
