"""Reverse-reconciliation key-rate lower bound from observable statistics.

The asymptotic Devetak-Winter rate S(B|E) - H(B|A) is bounded from below by

    r >= h(p00 + p01) - k0 - k2 - k1 h(lambda)

with k1 = p00 + p11, k2 = p01 + p10, k0 = h(k1) and

    lambda = 1/2 + sqrt((p00 - p11)^2 + 4 B^2) / (2 (p00 + p11)),

where B lower-bounds the overlap alpha beta |<e00|e11>| of Eve's fragments on
matching key bits:

    B = 1 - p_e_minus - p0_plus - p1_plus - sqrt(p01 p10).

For a depolarizing reverse channel with parameter q everything collapses to
the closed form f(b, q) implemented in depolarizing_bound().
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from . import fileio
from .attacks import ObservedStatistics, _check_bias
from .fileio import ParseError
from .qmath import binary_entropy, shannon_entropy


def _clip01(x: float) -> float:
    return min(max(x, 0.0), 1.0)


@dataclass(frozen=True)
class KeyRateReport:
    """Key-rate bound plus the intermediate quantities that produce it.

    ``abort`` is set when the raw overlap bound B is non-positive (channel
    too noisy); the bound is then the diagnostic value computed with B = 0.
    ``lam`` is None in the degenerate case k1 = 0, whose h(lambda) term has
    zero weight.
    """

    bound: float
    B_lower: float
    B_clamped: bool
    lam: float | None
    k0: float
    k1: float
    k2: float
    h_A: float
    abort: bool


def bound_B(stats: ObservedStatistics) -> tuple[float, bool]:
    """Observable lower bound on alpha beta |<e00|e11>|.

    The raw value is capped at sqrt(p00 p11), the Cauchy-Schwarz ceiling that
    keeps lambda <= 1; the flag reports whether the cap was applied.  A
    non-positive raw value is returned as is, abort semantics are the
    caller's job.
    """
    raw = (
        1.0
        - stats.p_e_minus
        - stats.p0_plus
        - stats.p1_plus
        - math.sqrt(max(stats.p01, 0.0) * max(stats.p10, 0.0))
    )
    ceiling = math.sqrt(max(stats.p00, 0.0) * max(stats.p11, 0.0))
    if raw > ceiling:
        return ceiling, True
    return raw, False


def lambda_from(p00: float, p11: float, B: float) -> float:
    """Larger eigenvalue bound of Eve's state on matching key bits.

    lambda = 1/2 + sqrt((p00-p11)^2 + 4 B^2) / (2 (p00+p11)), clamped to
    [1/2, 1].
    """
    if B < 0:
        raise ValueError(f"B must be non-negative, got {B!r}")
    total = p00 + p11
    if total <= 0:
        raise ValueError("lambda is undefined when p00 + p11 = 0")
    lam = 0.5 + math.sqrt((p00 - p11) ** 2 + 4.0 * B * B) / (2.0 * total)
    return min(max(lam, 0.5), 1.0)


def key_rate_bound(stats: ObservedStatistics) -> KeyRateReport:
    """Evaluate the key-rate lower bound for one set of statistics."""
    B, clamped = bound_B(stats)
    # clamping only applies from above, so B <= 0 can only be the raw value
    abort = not clamped and B <= 0.0
    k1 = _clip01(stats.p00 + stats.p11)
    k2 = _clip01(stats.p01 + stats.p10)
    k0 = binary_entropy(k1)
    h_a = binary_entropy(_clip01(stats.p00 + stats.p01))
    if k1 == 0.0:
        lam = None
        h_lambda = 0.0
    else:
        lam = lambda_from(stats.p00, stats.p11, max(B, 0.0))
        h_lambda = binary_entropy(lam)
    bound = h_a - k0 - k2 - k1 * h_lambda
    return KeyRateReport(
        bound=bound, B_lower=B, B_clamped=clamped, lam=lam,
        k0=k0, k1=k1, k2=k2, h_A=h_a, abort=abort,
    )


def entropy_terms(stats: ObservedStatistics) -> tuple[float, float]:
    """(S of the four-outcome key distribution, H(B|A)) for diagnostics."""
    s_bme = shannon_entropy([stats.p00, stats.p01, stats.p10, stats.p11])
    h_b_given_a = s_bme - binary_entropy(_clip01(stats.p00 + stats.p01))
    return s_bme, h_b_given_a


# ---------------------------------------------------------------------------
# depolarizing reverse channel: closed forms and threshold search


def _check_depolarizing_args(b: float, q: float) -> tuple[float, float]:
    b = _check_bias(b)
    q = float(q)
    if not 0.0 <= q <= 1.0 or q != q:
        raise ValueError(f"depolarizing parameter must lie in [0, 1], got {q!r}")
    return b, q


def depolarizing_stats(b: float, q: float) -> ObservedStatistics:
    """Exact statistics when the reverse channel depolarizes with parameter q."""
    b, q = _check_depolarizing_args(b, q)
    root = math.sqrt(max(0.0, 1.0 - 4.0 * b * b))
    return ObservedStatistics(
        bias=b,
        p00=(0.5 + b) * (1.0 - 0.5 * q),
        p01=(0.5 - b) * 0.5 * q,
        p10=(0.5 + b) * 0.5 * q,
        p11=(0.5 - b) * (1.0 - 0.5 * q),
        p_e_minus=0.5 + 0.5 * (q - 1.0) * root,
        p0_plus=0.5 * (0.5 + b),
        p1_plus=0.5 * (0.5 - b),
    )


def depolarizing_bound(b: float, q: float) -> float:
    """f(b, q) = h(1/2 + b - b q) - h(1 - q/2) - q/2 - (1 - q/2) h(lambda).

    Here B = (1/2 - 3q/4) sqrt(1 - 4 b^2) and
    lambda = 1/2 + sqrt(b^2 (2-q)^2 + 4 B^2) / (2 - q); a negative B is
    replaced by 0, matching the abort diagnostics of key_rate_bound.
    """
    b, q = _check_depolarizing_args(b, q)
    root = math.sqrt(max(0.0, 1.0 - 4.0 * b * b))
    big_b = max(0.0, (0.5 - 0.75 * q) * root)
    lam = min(1.0, 0.5 + math.sqrt(b * b * (2.0 - q) ** 2 + 4.0 * big_b * big_b) / (2.0 - q))
    return (
        binary_entropy(_clip01(0.5 + b - b * q))
        - binary_entropy(_clip01(1.0 - 0.5 * q))
        - 0.5 * q
        - (1.0 - 0.5 * q) * binary_entropy(lam)
    )


def x_error_from_bias(b: float) -> float:
    """Forward-channel X error rate 1/2 - sqrt(1/4 - b^2) caused by the bias."""
    b = _check_bias(b)
    return 0.5 - math.sqrt(max(0.0, 0.25 - b * b))


def _bisect(f, lo: float, hi: float, tol: float) -> float:
    """Shrink a bracket with f(lo) > 0 >= f(hi) until it is narrower than tol."""
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if f(mid) > 0.0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def _positive_boundary(f, lo: float, hi: float, coarse: float, tol: float) -> float | None:
    """First zero crossing of f on [lo, hi], located by a coarse scan then bisection.

    Assumes f(lo) > 0; returns None when f never drops to 0 on the grid.
    """
    x = lo
    while x < hi:
        nxt = min(x + coarse, hi)
        if f(nxt) <= 0.0:
            return _bisect(f, x, nxt, tol)
        x = nxt
    return None


def threshold_q(b: float, tol: float = 1e-4) -> float | None:
    """Noise threshold: the q* below which f(b, .) stays positive.

    Returns None when f(b, 0) <= 0.  The search runs on (0, 2/3), the region
    where the overlap bound B can be positive.
    """
    if tol <= 0:
        raise ValueError(f"tol must be positive, got {tol!r}")
    f = lambda q: depolarizing_bound(b, q)
    if f(0.0) <= 0.0:
        return None
    return _positive_boundary(f, 0.0, 2.0 / 3.0, coarse=0.01, tol=tol)


def threshold_b(q: float, tol: float = 1e-4) -> float | None:
    """Bias boundary: the largest b* with f(b, q) > 0 for 0 <= b < b*.

    Returns None when f(0, q) <= 0.  The bound is even in b (B and lambda
    depend on b^2 and h(1/2 + b(1-q)) is symmetric), so the same magnitude
    applies to negative bias; the symmetry is exercised in tests rather than
    assumed here.  The search includes the endpoint b = 1/2, where
    f(1/2, q) = -q/2 and in particular f(1/2, 0) = 0: for q = 0 the bound
    h(1/2 + b) is positive on the whole open interval and the reported
    boundary is 1/2.
    """
    if tol <= 0:
        raise ValueError(f"tol must be positive, got {tol!r}")
    f = lambda b: depolarizing_bound(b, q)
    if f(0.0) <= 0.0:
        return None
    return _positive_boundary(f, 0.0, 0.5, coarse=0.01, tol=tol)


# ---------------------------------------------------------------------------
# statistics file and report formatting

_STATS_KEYS = ("b", "p00", "p01", "p10", "p11", "p_e_minus", "p0_plus", "p1_plus")


def load_statistics(path) -> ObservedStatistics:
    """Read a key-value statistics file and validate its invariants."""
    entries = fileio.read_kv_lines(path)
    seen: dict[str, float] = {}
    for lineno, key, value in entries:
        if key not in _STATS_KEYS:
            raise ParseError(path, lineno, f"unknown key {key!r}")
        if key in seen:
            raise ParseError(path, lineno, f"duplicate key {key!r}")
        seen[key] = fileio.parse_float(path, lineno, key, value)
    missing = [key for key in _STATS_KEYS if key not in seen]
    if missing:
        raise ParseError(path, 0, f"missing keys: {', '.join(missing)}")
    kwargs = {("bias" if key == "b" else key): seen[key] for key in _STATS_KEYS}
    return ObservedStatistics(**kwargs)


def save_statistics(stats: ObservedStatistics, path) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        for key in _STATS_KEYS:
            value = stats.bias if key == "b" else getattr(stats, key)
            fh.write(f"{key}={value:.17g}\n")


def format_report(report: KeyRateReport) -> str:
    """Fixed key-value rendering of a report, 12 significant digits."""
    lines = [
        f"bound={fileio.fmt(report.bound)}",
        f"B={fileio.fmt(report.B_lower)}",
        f"lambda={'none' if report.lam is None else fileio.fmt(report.lam)}",
        f"k0={fileio.fmt(report.k0)}",
        f"k1={fileio.fmt(report.k1)}",
        f"k2={fileio.fmt(report.k2)}",
        f"abort={'true' if report.abort else 'false'}",
        f"clamped={'true' if report.B_clamped else 'false'}",
    ]
    return "\n".join(lines)
