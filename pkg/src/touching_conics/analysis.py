"""Critical points and endpoint limits of the radius functions.

A critical point of the governing radius function is exactly where the
normal bundle of the corresponding rational curve degenerates from
O(1)+O(1) to O+O(2), so the counting done here carries all the geometric
content consumed by the classifier.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Callable

from .config import DEFAULT_TOL, Tolerances
from .errors import (
    DomainError,
    InputError,
    PreconditionError,
    UnclassifiableLimitError,
    UnstableScanError,
)
from .resolution import HKind, LinearForm, ResolutionChoice, all_resolutions, h_function
from .surface import Interval, SurfaceParams, f_value, intervals


@dataclass(frozen=True)
class ScanConfig:
    grid: int = 1200
    tol: float = DEFAULT_TOL.critical_bisect
    deriv_step: float = DEFAULT_TOL.deriv_step
    max_doublings: int = 2


@dataclass(frozen=True)
class CriticalPoint:
    location: float
    derivative_residual: float


@dataclass(frozen=True)
class CriticalReport:
    interval: tuple[float, float]
    count: int
    points: tuple[CriticalPoint, ...]
    grid_used: int

    @property
    def locations(self) -> tuple[float, ...]:
        return tuple(p.location for p in self.points)


class LimitKind(enum.Enum):
    ZERO = "Zero"
    FINITE = "Finite"
    INFINITY = "Infinity"


@dataclass(frozen=True)
class LimitClass:
    kind: LimitKind
    value: float | None = None

    def reciprocal_matches(self, other: "LimitClass", rel: float = 1e-3) -> bool:
        """Class-level reciprocity: Zero pairs with Infinity and vice versa;
        two finite limits must be reciprocal values."""
        if self.kind is LimitKind.ZERO:
            return other.kind is LimitKind.INFINITY
        if self.kind is LimitKind.INFINITY:
            return other.kind is LimitKind.ZERO
        if other.kind is not LimitKind.FINITE:
            return False
        assert self.value is not None and other.value is not None
        if self.value == 0.0 or other.value == 0.0:
            return False
        return abs(self.value * other.value - 1.0) <= rel


class NormalBundleVerdict(enum.Enum):
    BALANCED = "O(1)+O(1)"
    DEGENERATE = "O+O(2)"


class FamilyLabel(enum.Enum):
    GEN_PLUS = "GenPlus"
    GEN_MINUS = "GenMinus"
    SP_PLUS = "SpPlus"
    SP_MINUS = "SpMinus"
    ORBIT = "Orbit"


_FAMILY_TO_KIND = {
    FamilyLabel.GEN_PLUS: HKind.H0,
    FamilyLabel.GEN_MINUS: HKind.H0,
    FamilyLabel.SP_PLUS: HKind.H1,
    FamilyLabel.SP_MINUS: HKind.H3,
    FamilyLabel.ORBIT: HKind.H2,
}


# ---------------------------------------------------------------------------
# generic scanning machinery


def _tan_nodes(lo: float, hi: float, n: int) -> list[float]:
    """Interior nodes of (lo, hi), uniform in the arctangent compactification
    with geometric stacks near both ends."""
    t_lo = math.atan(lo) if math.isfinite(lo) else -0.5 * math.pi
    t_hi = math.atan(hi) if math.isfinite(hi) else 0.5 * math.pi
    span = t_hi - t_lo
    ts = [t_lo + span * (k + 1) / (n + 1) for k in range(n)]
    tail = span / (n + 1)
    for k in range(1, 41):
        tail *= 0.5
        if tail < 1e-14 * max(1.0, abs(t_lo), abs(t_hi)):
            break
        ts.append(t_lo + tail)
        ts.append(t_hi - tail)
    ts = sorted(set(ts))
    return [math.tan(t) for t in ts if t_lo < t < t_hi]


def _central_diff(h: Callable[[float], float], x: float, step_scale: float) -> float:
    d = step_scale * (1.0 + abs(x))
    return (h(x + d) - h(x - d)) / (2.0 * d)


def _scan_once(
    h: Callable[[float], float],
    lo: float,
    hi: float,
    n: int,
    cfg: ScanConfig,
) -> list[CriticalPoint]:
    xs = _tan_nodes(lo, hi, n)
    vals = []
    nodes = []
    for x in xs:
        try:
            v = h(x)
        except (DomainError, ValueError, OverflowError, ZeroDivisionError):
            continue
        if math.isfinite(v):
            nodes.append(x)
            vals.append(v)
    if len(nodes) < 3:
        raise InputError("fewer than 3 valid grid points in the scan interval")

    found: list[CriticalPoint] = []
    slopes = [vals[i + 1] - vals[i] for i in range(len(vals) - 1)]
    last_sign = 0
    last_idx = -1
    for i, s in enumerate(slopes):
        if s == 0.0:
            # exact float ties straddle flat extrema; the sign tracker below
            # still sees the change across the tie
            continue
        sign = 1 if s > 0.0 else -1
        if last_sign != 0 and sign != last_sign:
            a, b = nodes[last_idx], nodes[i + 1]
            pt = _refine_bracket(h, a, b, cfg)
            if pt is not None:
                if not found or abs(pt.location - found[-1].location) > 100.0 * cfg.tol * (
                    1.0 + abs(pt.location)
                ):
                    found.append(pt)
        last_sign, last_idx = sign, i
    return found


def _refine_bracket(h, a: float, b: float, cfg: ScanConfig) -> CriticalPoint | None:
    ga = _central_diff(h, a, cfg.deriv_step)
    gb = _central_diff(h, b, cfg.deriv_step)
    if not (math.isfinite(ga) and math.isfinite(gb)) or (ga > 0.0) == (gb > 0.0):
        return None
    while (b - a) > cfg.tol * (1.0 + abs(a) + abs(b)):
        mid = 0.5 * (a + b)
        gm = _central_diff(h, mid, cfg.deriv_step)
        if gm == 0.0:
            a = b = mid
            break
        if (gm > 0.0) == (ga > 0.0):
            a, ga = mid, gm
        else:
            b, gb = mid, gm
    loc = 0.5 * (a + b)
    return CriticalPoint(location=loc, derivative_residual=abs(_central_diff(h, loc, cfg.deriv_step)))


def critical_points(
    h: Callable[[float], float],
    interval: tuple[float, float],
    cfg: ScanConfig = ScanConfig(),
) -> CriticalReport:
    """Bracketed sign changes of the numerical derivative on an open interval.

    The interval is compactified through arctangent so unbounded ends get a
    genuine asymptotic tail.  The count must be stable under grid doubling;
    if it keeps changing the scan aborts rather than report a guess.
    """
    lo, hi = interval
    if not lo < hi:
        raise InputError(f"empty interval {interval}")
    n = cfg.grid
    prev = _scan_once(h, lo, hi, n, cfg)
    for _ in range(cfg.max_doublings):
        cur = _scan_once(h, lo, hi, 2 * n, cfg)
        if len(cur) == len(prev):
            return CriticalReport(interval=interval, count=len(cur), points=tuple(cur), grid_used=2 * n)
        prev, n = cur, 2 * n
    raise UnstableScanError(f"critical-point count on {interval} unstable under refinement")


def endpoint_limit(
    h: Callable[[float], float],
    endpoint: float,
    side: str,
    cfg: Tolerances = DEFAULT_TOL,
) -> LimitClass:
    """One-sided limit classified from a geometric approach ladder.

    Finite endpoints are approached at distances 10^-1 .. 10^-10; infinite
    ones at radii 10^1 .. 10^10 (the square-root rates that occur here need
    the extra decades to clear the thresholds).  Zero and Infinity demand a
    monotone trend over the last four decades; a finite limit must have
    stabilized; anything else raises rather than guesses.
    """
    if side not in ("left", "right"):
        raise InputError("side must be 'left' or 'right'")
    sign = 1.0 if side == "right" else -1.0
    xs = []
    if math.isfinite(endpoint):
        xs = [endpoint + sign * 10.0 ** (-k) for k in range(1, 11)]
    else:
        direction = 1.0 if endpoint > 0 else -1.0
        xs = [direction * 10.0**k for k in range(1, 11)]
    vals = []
    for x in xs:
        try:
            v = h(x)
        except (DomainError, ValueError, OverflowError, ZeroDivisionError):
            continue
        if math.isfinite(v):
            vals.append(v)
    if len(vals) < 6:
        raise UnclassifiableLimitError("not enough valid samples on the approach ladder")
    tail = vals[-5:]
    decreasing = all(tail[i + 1] < tail[i] for i in range(4))
    increasing = all(tail[i + 1] > tail[i] for i in range(4))
    if decreasing and abs(tail[-1]) < cfg.limit_low:
        return LimitClass(LimitKind.ZERO)
    if increasing and tail[-1] > cfg.limit_high:
        return LimitClass(LimitKind.INFINITY)
    if abs(tail[-1] - tail[-2]) <= 1e-3 * (1.0 + abs(tail[-1])):
        value = tail[-1]
        d1, d2 = tail[-1] - tail[-2], tail[-2] - tail[-3]
        if d2 != 0.0:
            ratio = d1 / d2
            if 0.0 < abs(ratio) < 0.9:
                value = tail[-1] + d1 * ratio / (1.0 - ratio)
        return LimitClass(LimitKind.FINITE, value)
    raise UnclassifiableLimitError(
        f"no monotone trend toward a class at {endpoint} ({side}); last values {tail}"
    )


# ---------------------------------------------------------------------------
# the radius-function tables


def h_handle(
    kind: HKind, choice: ResolutionChoice, params: SurfaceParams
) -> Callable[[float], float]:
    return lambda lam: h_function(kind, choice, params, lam)


def _pair_key(choice: ResolutionChoice) -> frozenset:
    return frozenset((choice.ell1, choice.ell2))


def _triple_key(choice: ResolutionChoice) -> frozenset:
    return frozenset(choice.forms())


def _choice_for_ell1(ell1: LinearForm) -> ResolutionChoice:
    rest = [f for f in LinearForm if f is not ell1]
    return ResolutionChoice(ell1, rest[0], rest[1])


def _choice_for_pair(pair: frozenset) -> ResolutionChoice:
    a, b = sorted(pair, key=lambda f: f.value)
    rest = [f for f in LinearForm if f not in pair]
    return ResolutionChoice(a, b, rest[0])


def _choice_for_triple(triple: frozenset) -> ResolutionChoice:
    a, b, c = sorted(triple, key=lambda f: f.value)
    return ResolutionChoice(a, b, c)


class HScanCache:
    """Memoizes critical-point counts and endpoint limits of the radius
    functions, keyed by the data they actually depend on (h1: first form;
    h2: unordered pair; h3: unordered triple)."""

    def __init__(self, params: SurfaceParams, scan: ScanConfig = ScanConfig(), cfg: Tolerances = DEFAULT_TOL):
        self.params = params
        self.scan = scan
        self.cfg = cfg
        self.partition = intervals(params)
        self._counts: dict = {}
        self._limits: dict = {}

    def _handle(self, kind: HKind, key) -> Callable[[float], float]:
        if kind is HKind.H0:
            choice = all_resolutions()[0]
        elif kind is HKind.H1:
            choice = _choice_for_ell1(key)
        elif kind is HKind.H2:
            choice = _choice_for_pair(key)
        else:
            choice = _choice_for_triple(key)
        return h_handle(kind, choice, self.params)

    def scan_interval(self, which: Interval) -> tuple[float, float]:
        lo, hi = self.partition.bounds(which)
        excl = self.cfg.lambda0_exclusion
        lam0 = self.partition.lambda0
        if which is Interval.I4MINUS:
            hi = lam0 - excl
        elif which is Interval.I4PLUS:
            lo = lam0 + excl
        return (lo, hi)

    def count(self, kind: HKind, key, which: Interval) -> CriticalReport:
        k = (kind, key, which)
        if k not in self._counts:
            self._counts[k] = critical_points(self._handle(kind, key), self.scan_interval(which), self.scan)
        return self._counts[k]

    def count_i4_full(self, kind: HKind, key) -> CriticalReport:
        """Scan of all of (b/a, infinity) for functions smooth through the
        double root (h2)."""
        k = (kind, key, "I4full")
        if k not in self._counts:
            lo = self.partition.bounds(Interval.I4MINUS)[0]
            self._counts[k] = critical_points(self._handle(kind, key), (lo, math.inf), self.scan)
        return self._counts[k]

    def limit(self, kind: HKind, key, endpoint: float, side: str) -> LimitClass:
        k = (kind, key, endpoint, side)
        if k not in self._limits:
            self._limits[k] = endpoint_limit(self._handle(kind, key), endpoint, side, self.cfg)
        return self._limits[k]


@dataclass(frozen=True)
class TableRow:
    function: str
    choice: str
    check: str
    expected: str
    computed: str
    passed: bool


@dataclass(frozen=True)
class HTableReport:
    rows: tuple[TableRow, ...]

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.rows)

    def failures(self) -> list[TableRow]:
        return [r for r in self.rows if not r.passed]


# expected critical-point counts (interval I1, I3) per first form, and the
# stated endpoint behavior of h1
_H1_TABLE: dict[LinearForm, tuple[int, int, tuple]] = {
    LinearForm.X1: (0, 1, (("-inf", None, LimitKind.INFINITY), (-1.0, "left", LimitKind.ZERO))),
    LinearForm.X0: (1, 0, ((0.0, "right", LimitKind.INFINITY), ("b/a", "left", LimitKind.ZERO))),
    LinearForm.X0_PLUS_X1: (0, 1, (("-inf", None, LimitKind.ZERO), (-1.0, "left", LimitKind.INFINITY))),
    LinearForm.AX0_MINUS_BX1: (1, 0, ((0.0, "right", LimitKind.ZERO), ("b/a", "left", LimitKind.INFINITY))),
}

# per unordered triple {l1, l2, l3}, keyed by the missing form
_H3_TABLE: dict[LinearForm, tuple[int, int, tuple]] = {
    LinearForm.X1: (0, 1, (("-inf", None, LimitKind.ZERO), (-1.0, "left", LimitKind.INFINITY))),
    LinearForm.X0: (1, 0, ((0.0, "right", LimitKind.ZERO), ("b/a", "left", LimitKind.INFINITY))),
    LinearForm.X0_PLUS_X1: (0, 1, (("-inf", None, LimitKind.INFINITY), (-1.0, "left", LimitKind.ZERO))),
    LinearForm.AX0_MINUS_BX1: (1, 0, ((0.0, "right", LimitKind.INFINITY), ("b/a", "left", LimitKind.ZERO))),
}

# per unordered pair {l1, l2}: counts on (I2, I4) and the stated limits
_H2_TABLE: list[tuple[frozenset, int, int, tuple]] = [
    (
        frozenset((LinearForm.X0, LinearForm.X1)),
        0,
        0,
        ((-1.0, "right", LimitKind.ZERO), (0.0, "left", LimitKind.INFINITY), ("b/a", "right", LimitKind.ZERO), ("+inf", None, LimitKind.INFINITY)),
    ),
    (
        frozenset((LinearForm.X0_PLUS_X1, LinearForm.AX0_MINUS_BX1)),
        0,
        0,
        ((-1.0, "right", LimitKind.INFINITY), (0.0, "left", LimitKind.ZERO), ("b/a", "right", LimitKind.INFINITY), ("+inf", None, LimitKind.ZERO)),
    ),
    (
        frozenset((LinearForm.X1, LinearForm.X0_PLUS_X1)),
        0,
        0,
        ((-1.0, "right", LimitKind.INFINITY), (0.0, "left", LimitKind.ZERO), ("b/a", "right", LimitKind.ZERO), ("+inf", None, LimitKind.INFINITY)),
    ),
    (
        frozenset((LinearForm.X0, LinearForm.AX0_MINUS_BX1)),
        0,
        0,
        ((-1.0, "right", LimitKind.ZERO), (0.0, "left", LimitKind.INFINITY), ("b/a", "right", LimitKind.INFINITY)),
    ),
    (frozenset((LinearForm.X0, LinearForm.X0_PLUS_X1)), 1, 1, ()),
    (frozenset((LinearForm.X1, LinearForm.AX0_MINUS_BX1)), 1, 1, ()),
]


def _edge(cache: HScanCache, token, params: SurfaceParams) -> float:
    if token == "-inf":
        return -math.inf
    if token == "+inf":
        return math.inf
    if token == "b/a":
        return params.b / params.a
    return float(token)


def _pair_label(key: frozenset) -> str:
    return "{" + ",".join(sorted(f.value for f in key)) + "}"


def verify_h_tables(
    params: SurfaceParams,
    scan: ScanConfig = ScanConfig(),
    cfg: Tolerances = DEFAULT_TOL,
) -> HTableReport:
    """Recompute every critical-point count and endpoint limit the
    classification relies on, and compare with the expected tables."""
    cache = HScanCache(params, scan, cfg)
    rows: list[TableRow] = []

    def count_row(fn: str, label: str, kind: HKind, key, which: Interval, expected: int, i4_full: bool = False):
        rep = cache.count_i4_full(kind, key) if i4_full else cache.count(kind, key, which)
        name = "I4" if i4_full else which.value
        rows.append(
            TableRow(fn, label, f"count on {name}", str(expected), str(rep.count), rep.count == expected)
        )

    def limit_row(fn: str, label: str, kind: HKind, key, token, side, expected: LimitKind):
        edge = _edge(cache, token, params)
        use_side = side if side else ("right" if edge > 0 else "left")
        got = cache.limit(kind, key, edge, use_side)
        rows.append(
            TableRow(
                fn,
                label,
                f"limit at {token} ({use_side})",
                expected.value,
                got.kind.value,
                got.kind is expected,
            )
        )

    count_row("h0", "-", HKind.H0, None, Interval.I2, 1)
    count_row("h0", "-", HKind.H0, None, Interval.I4MINUS, 0)
    count_row("h0", "-", HKind.H0, None, Interval.I4PLUS, 0)
    limit_row("h0", "-", HKind.H0, None, -1.0, "right", LimitKind.INFINITY)
    limit_row("h0", "-", HKind.H0, None, 0.0, "left", LimitKind.INFINITY)

    for ell1, (c1, c3, limits) in _H1_TABLE.items():
        label = ell1.value
        count_row("h1", label, HKind.H1, ell1, Interval.I1, c1)
        count_row("h1", label, HKind.H1, ell1, Interval.I3, c3)
        for token, side, expected in limits:
            limit_row("h1", label, HKind.H1, ell1, token, side, expected)

    for missing, (c1, c3, limits) in _H3_TABLE.items():
        triple = frozenset(f for f in LinearForm if f is not missing)
        label = _pair_label(triple)
        count_row("h3", label, HKind.H3, triple, Interval.I1, c1)
        count_row("h3", label, HKind.H3, triple, Interval.I3, c3)
        for token, side, expected in limits:
            limit_row("h3", label, HKind.H3, triple, token, side, expected)

    for pair, c2, c4, limits in _H2_TABLE:
        label = _pair_label(pair)
        count_row("h2", label, HKind.H2, pair, Interval.I2, c2)
        count_row("h2", label, HKind.H2, pair, Interval.I2, c4, i4_full=True)
        for token, side, expected in limits:
            limit_row("h2", label, HKind.H2, pair, token, side, expected)

    return HTableReport(rows=tuple(rows))


# ---------------------------------------------------------------------------
# normal-bundle verdicts and the broken-pairing utility


def normal_bundle_at(
    kind: FamilyLabel,
    choice: ResolutionChoice,
    params: SurfaceParams,
    lam: float,
    scan: ScanConfig = ScanConfig(),
    cfg: Tolerances = DEFAULT_TOL,
    match_tol: float = 1e-6,
    cache: HScanCache | None = None,
) -> NormalBundleVerdict:
    """Degenerate exactly when lam sits at a critical point of the governing
    radius function; Balanced otherwise."""
    hkind = _FAMILY_TO_KIND[kind]
    cache = cache or HScanCache(params, scan, cfg)
    part = cache.partition
    f = f_value(params, lam)
    if hkind in (HKind.H0, HKind.H2) and f <= 0.0:
        raise DomainError(f"family {kind.value} lives where f > 0; f({lam}) = {f:.3e}")
    if hkind in (HKind.H1, HKind.H3) and f >= 0.0:
        raise DomainError(f"family {kind.value} lives where f < 0; f({lam}) = {f:.3e}")
    if hkind is HKind.H0:
        key = None
    elif hkind is HKind.H1:
        key = choice.ell1
    elif hkind is HKind.H2:
        key = _pair_key(choice)
    else:
        key = _triple_key(choice)

    candidates: list[Interval] = []
    for which in Interval:
        lo, hi = part.bounds(which)
        if lo < lam < hi:
            candidates.append(which)
    if not candidates:
        raise DomainError(f"lam={lam} sits on an interval boundary")
    which = candidates[0]
    if hkind is HKind.H2 and which in (Interval.I4MINUS, Interval.I4PLUS):
        rep = cache.count_i4_full(hkind, key)
    else:
        rep = cache.count(hkind, key, which)
    for pt in rep.points:
        if abs(lam - pt.location) <= match_tol * (1.0 + abs(lam)):
            return NormalBundleVerdict.DEGENERATE
    return NormalBundleVerdict.BALANCED


def h0_critical_on_i2(params: SurfaceParams, scan: ScanConfig = ScanConfig()) -> float:
    """The unique degeneration location of the generic family inside I2."""
    rep = critical_points(
        h_handle(HKind.H0, all_resolutions()[0], params), (-1.0, 0.0), scan
    )
    if rep.count != 1:
        raise PreconditionError(f"expected a unique critical point on I2, found {rep.count}")
    return rep.points[0].location


def h0_pairing(
    params: SurfaceParams,
    lam: float,
    scan: ScanConfig = ScanConfig(),
    tol: float = 1e-12,
) -> float:
    """The partner plane of a broken fibration: for non-critical lam in I2,
    the unique mu on the other side of the critical point with equal h0.

    Bisection of h0(mu) - h0(lam) between the critical point (where the
    difference is negative, the critical point being the minimum) and the
    blow-up endpoint (where it is positive)."""
    if not -1.0 < lam < 0.0:
        raise DomainError(f"pairing is defined for lam in I2, got {lam}")
    crit = h0_critical_on_i2(params, scan)
    if abs(lam - crit) <= 1e-9:
        raise DomainError("lam is the critical plane; no partner exists")
    h = h_handle(HKind.H0, all_resolutions()[0], params)
    target = h(lam)

    # h0 - target is negative at the critical plane (the minimum) and grows
    # without bound toward the end of I2 on the far side of the critical point
    x_in = crit
    x_out = 0.0 if lam < crit else -1.0
    for _ in range(200):
        mid = 0.5 * (x_in + x_out)
        g = h(mid) - target
        if abs(x_in - x_out) <= tol * (1.0 + abs(mid)):
            return mid
        if g < 0.0:
            x_in = mid
        else:
            x_out = mid
    return 0.5 * (x_in + x_out)


# ---------------------------------------------------------------------------
# the radial profile of the line correspondence at the ordinary double point


def k_profile(r: float) -> float:
    """k(r) = r / (1 + sqrt(1 + r^2)), the radial profile of the
    correspondence between real lines through the double point and the
    exceptional curve."""
    return r / (1.0 + math.sqrt(1.0 + r * r))


@dataclass(frozen=True)
class PsiReport:
    k_at_zero: float
    monotone: bool
    sup_value: float
    sup_below_one: bool
    limit_ok: bool
    boundary_derivative: float

    @property
    def passed(self) -> bool:
        return (
            self.k_at_zero == 0.0
            and self.monotone
            and self.sup_below_one
            and self.limit_ok
            and abs(self.boundary_derivative) > 0.1
        )


def psi_check(samples: int = 1000) -> PsiReport:
    """Monotonicity and boundary behavior of the radial profile.

    Strict increase on a log-spaced grid, k(0) = 0, values capped below 1
    with k(10^6) within 1e-5 of it, and a nonvanishing derivative of k(1/s)
    at s = 0 (numerically, the one-sided difference quotient)."""
    if samples < 10:
        raise InputError("need at least 10 samples")
    rs = [10.0 ** (-6.0 + 12.0 * i / (samples - 1)) for i in range(samples)]
    ks = [k_profile(r) for r in rs]
    monotone = all(ks[i + 1] > ks[i] for i in range(len(ks) - 1))
    sup_value = ks[-1]
    s = 1e-8
    boundary = (k_profile(1.0 / s) - 1.0) / s
    return PsiReport(
        k_at_zero=k_profile(0.0),
        monotone=monotone,
        sup_value=sup_value,
        sup_below_one=all(k < 1.0 for k in ks),
        limit_ok=k_profile(1e6) > 1.0 - 1e-5,
        boundary_derivative=boundary,
    )
