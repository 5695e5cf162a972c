"""Cycle algebra: parity-word cycle values, rational cycles of 3x+d maps,
the circuit-cycle Diophantine equation, and cycle-length lower bounds from
the continued fraction of log2 3.

A parity word w of length n with m ones determines the affine composite
T_w(x) = (3^m x + B) / 2^n, whose unique fixed point
x = B / (2^n - 3^m) is the only candidate cycle value along w.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Optional

import numpy as np

from .cf import FRAC_BITS, log2_3_fixed, log2_with_reciprocal_fixed
from .maps import CycleRecord, MapSpec, three_x_plus_d


def word_offset(parity: str) -> tuple[int, int]:
    """(m, B) for the affine composite along the 0/1 word."""
    B = 0
    m = 0
    for j, bit in enumerate(parity):
        if bit == "1":
            B = 3 * B + (1 << j)
            m += 1
        elif bit != "0":
            raise ValueError("parity word must be over {0,1}")
    return m, B


def cycle_value(parity: str) -> Fraction:
    """The unique rational fixed point of the composite along the word."""
    if not parity:
        raise ValueError("parity word must be nonempty")
    n = len(parity)
    m, B = word_offset(parity)
    den = (1 << n) - 3**m
    # den = 0 would need 2^n = 3^m, impossible for n >= 1
    return Fraction(B, den)


def replay_word(parity: str, x: Fraction | int, d: int = 1) -> Fraction:
    """Apply the 3x+d composite along the word (d=1 gives plain T)."""
    v = Fraction(x)
    for bit in parity:
        v = (3 * v + d) / 2 if bit == "1" else v / 2
    return v


def _necklace_words(n: int) -> Iterable[tuple[int, ...]]:
    """Binary necklaces of length n (lexicographically least rotations),
    by the standard FKM generation."""
    w = [0] * (n + 1)

    def gen(t: int, p: int):
        if t > n:
            if n % p == 0:
                yield tuple(w[1:n + 1])
        else:
            w[t] = w[t - p]
            yield from gen(t + 1, p)
            for v in range(w[t - p] + 1, 2):
                w[t] = v
                yield from gen(t + 1, t)

    yield from gen(1, 1)


@dataclass
class RationalCycleReport:
    d: int
    max_period: int
    cycles: list[CycleRecord]

    def to_dict(self) -> dict:
        return {
            "schema": "collatzlab/rational-cycles-v1",
            "d": self.d,
            "max_period": self.max_period,
            "cycles": [
                {"min": c.min_element, "period": c.period, "elements": list(c.elements)}
                for c in self.cycles
            ],
        }


def rational_cycles_3xd(d: int, max_period: int) -> RationalCycleReport:
    """All positive integer cycles of the (3x+d)/2-or-x/2 map with period at
    most max_period and elements coprime to d, by exact evaluation of the
    cycle value over parity necklaces followed by replay verification.

    These are in bijection with rational cycles x/d of the 3x+1 map.
    """
    if d < 1 or d % 2 == 0 or d % 3 == 0:
        raise ValueError("d must be odd, positive, and coprime to 3 (d = +/-1 mod 6)")
    if max_period > 40:
        raise ValueError("necklace enumeration capped at period 40")
    from math import gcd

    found: dict[tuple[int, ...], CycleRecord] = {}
    for period in range(1, max_period + 1):
        for word in _necklace_words(period):
            m = sum(word)
            if m == 0:
                continue
            parity = "".join(map(str, word))
            mm, B = word_offset(parity)
            den = (1 << period) - 3**mm
            num = d * B
            if den == 0 or num % den:
                continue
            x = num // den
            if x <= 0 or gcd(x, d) != 1:
                continue
            # replay exactly; reject words that are not the true parities
            orbit = [x]
            v = x
            ok = True
            for bit in parity:
                if (v & 1) != int(bit):
                    ok = False
                    break
                v = (3 * v + d) // 2 if v & 1 else v // 2
                orbit.append(v)
            if not ok or orbit[-1] != x:
                continue
            core = orbit[:-1]
            if len(set(core)) != len(core):
                continue  # repeated traversal of a shorter cycle
            i = core.index(min(core))
            canon = tuple(core[i:] + core[:i])
            found.setdefault(canon, CycleRecord(canon, f"3x+d:{d}"))
    cycles = sorted(found.values(), key=lambda c: (c.period, c.min_element))
    for c in cycles:
        assert c.verify(three_x_plus_d(d))
    return RationalCycleReport(d, max_period, cycles)


# ---------------------------------------------------------------------------
# circuit-cycle Diophantine equation


@dataclass
class CircuitSolution:
    k: int
    l: int
    h: int

    def to_tuple(self) -> tuple[int, int, int]:
        return (self.k, self.l, self.h)


def circuit_solutions(
    k_max: int,
    l_max: int,
    h_range: tuple[int, int] = (-(10**9), 10**9),
) -> list[CircuitSolution]:
    """Integer solutions of (2^(k+l) - 3^k) * h = 2^l - 1 inside the box.

    k >= 1 counts odd steps, l >= 0 even steps; a solution describes a
    single odd-run/even-run circuit that closes into a cycle.
    """
    if k_max > 200 or l_max > 200:
        raise ValueError("exponent bounds capped at 200")
    out = []
    h_lo, h_hi = h_range
    for k in range(1, k_max + 1):
        for l in range(0, l_max + 1):
            den = (1 << (k + l)) - 3**k
            num = (1 << l) - 1
            if den == 0:
                continue
            if num % den:
                continue
            h = num // den
            if h_lo <= h <= h_hi:
                out.append(CircuitSolution(k, l, h))
    return out


# ---------------------------------------------------------------------------
# cycle-length lower bounds


def best_packed_min_element(n: int, p: int) -> Fraction:
    """Largest possible minimal element of a positive cycle with n odd steps
    and period p: the halving schedule c_i = floor(i*p/n) (the balanced
    packing) maximizes the minimal element, whose exact value is
    sum_i 3^(n-1-i) 2^(c_i) / (2^p - 3^n).

    Exact; intended for moderate n (the certified interval variant below
    scales to n in the tens of millions).
    """
    den = (1 << p) - 3**n
    if den <= 0:
        raise ValueError("need 2^p > 3^n")
    S = 0
    pw = 3 ** (n - 1)
    for i in range(n):
        S += pw << ((i * p) // n)
        if i < n - 1:
            pw //= 3
    return Fraction(S, den)


def _packed_sum_bounds(n: int, p: int, work_bits: int) -> tuple[int, int]:
    """Certified integer bounds (lo, hi) with
    lo <= S / 3^(n-1) * 2^work_bits <= hi for the balanced-packing sum S.

    Evaluated by the descending Horner recursion Q_k = 1 + (2^(d_k)/3) *
    Q_(k+1) in fixed point with directed rounding.  The halving schedule is
    a Sturmian word, so runs of 64 steps take at most 65 distinct shapes;
    each shape is composed once into an exact affine map and the main loop
    applies one map per 64-step block.
    """
    if n * p >= (1 << 62):  # pragma: no cover - beyond desk scale
        raise ValueError("packing schedule exceeds the index guard")
    one = 1 << work_bits
    lo = hi = one  # Q_(n-1) = 1
    ks = np.arange(n, dtype=np.int64)
    steps = np.diff((ks * p) // n)[::-1].astype(np.int8)  # d values, descending
    block = 64
    head = len(steps) % block
    for d in steps[:head].tolist():
        lo = (lo << d) // 3 + one
        hi = -((-(hi << d)) // 3) + one
    body = steps[head:].reshape(-1, block)
    # exact affine composite per distinct block: Q -> (Q << D) / 3^64 + B
    pow3b = 3**block
    comps: dict[bytes, tuple[int, int, int]] = {}
    for key in {row.tobytes() for row in body}:
        ds = np.frombuffer(key, dtype=np.int8)
        D = 0
        B = Fraction(0)
        for d in ds.tolist():
            D += int(d)
            B = B * Fraction(1 << int(d), 3) + 1
        scaled = B * one
        b_lo = scaled.numerator // scaled.denominator
        comps[key] = (D, b_lo, b_lo + 1)
    for row in body:
        D, b_lo, b_hi = comps[row.tobytes()]
        lo = (lo << D) // pow3b + b_lo
        hi = -((-(hi << D)) // pow3b) + b_hi
    return lo, hi


def packed_bound_exceeds(n: int, p: int, D: int) -> bool:
    """Certified decision of best_packed_min_element(n, p) > D.

    Every term of the packed sum is within a factor of two of 3^(n-1) (the
    halving staircase stays within one unit of the line i*p/n, whose slope
    is at least log2 3), so M sits between n/(6 delta) and n/delta with
    delta = p - n log2 3.  That log-domain bracket settles pairs far from
    the threshold without touching huge integers; straddles fall through to
    a directed-rounding interval evaluation of the sum itself, and small n
    to the exact rational value.
    """
    if n < 1 or p < 1:
        raise ValueError("need positive n, p")
    if n <= 50_000:
        if 3**n >= (1 << p):
            return False
        return best_packed_min_element(n, p) > Fraction(D)
    lo3, hi3 = log2_3_fixed(FRAC_BITS)
    scale = 1 << FRAC_BITS
    d_lo = p * scale - n * hi3          # lower bound on delta, scaled
    d_hi = p * scale - n * lo3
    if d_lo <= 0:
        # p <= n log2 3 within certification: no positive cycle value at all
        return False if 3**n >= (1 << p) else packed_bound_exceeds_exact(n, p, D)
    if d_hi < scale:  # delta < 1: bracket constants below are valid
        if 6 * D * d_hi < n * scale:
            return True               # M > n/(6 delta) > D
        if D * d_lo >= n * scale:
            return False              # M <= n/delta <= D
    return packed_bound_exceeds_exact(n, p, D)


def packed_bound_exceeds_exact(n: int, p: int, D: int) -> bool:
    """Interval/exact tail of packed_bound_exceeds (big pows happen here)."""
    p3 = 3 ** (n - 1)
    E = (1 << p) - 3 * p3
    if E <= 0:
        return False
    if n <= 50_000:
        return best_packed_min_element(n, p) > Fraction(D)
    work = 320
    target = D * E
    while work <= 1280:
        lo, hi = _packed_sum_bounds(n, p, work)
        t = target << work
        if p3 * lo > t:
            return True
        if p3 * hi < t:
            return False
        work *= 2
    raise ArithmeticError("packed-bound interval failed to separate")


@dataclass
class CycleBoundReport:
    verification_bound: int            # D: conjecture assumed checked below D
    min_odd_terms: Optional[int]
    min_period: Optional[int]
    feasible_periods: list[int]        # window-criterion periods <= cutoff
    period_cutoff: int
    scanned_odd_terms: int
    window_constants_hex: dict = field(default_factory=dict)
    boundary_exact_checks: int = 0
    packing_rejections: list[tuple[int, int]] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "schema": "collatzlab/cycle-bound-v1",
            "verified_below": str(self.verification_bound),
            "min_odd_terms": self.min_odd_terms,
            "min_period": self.min_period,
            "feasible_periods_below_cutoff": self.feasible_periods[:64],
            "feasible_period_count": len(self.feasible_periods),
            "period_cutoff": self.period_cutoff,
            "window_constants": self.window_constants_hex,
            "boundary_exact_checks": self.boundary_exact_checks,
            "packing_rejections": self.packing_rejections,
        }


def _feasible_exact(n: int, p: int, d: int) -> bool:
    """Exact test of n*log2(3) < p < n*log2(3 + 1/d) by integer powers."""
    if not (3**n < (1 << p)):
        return False
    return (1 << p) * d**n < (3 * d + 1) ** n


def cycle_length_lower_bound(
    verification_bound: int,
    period_cutoff: int = 10**9,
    first_only: bool = False,
) -> CycleBoundReport:
    """Feasible periods of a hypothetical positive cycle, given plain
    verification of the conjecture below verification_bound.

    A cycle with n odd terms, all elements above D, and total period p
    forces n*log2(3) < p < n*log2(3 + 1/D), so p is feasible only when that
    window contains an integer (this is the feasible_periods list).  For the
    minimum itself the sharper packing criterion applies: a cycle also needs
    best_packed_min_element(n, p) > D, which prunes window-feasible pairs
    whose best possible minimal element is still inside the verified range.

    Windows are scanned with a wrap-around 64-bit fixed-point prefilter (a
    certified superset), candidates are settled against 192-bit directed
    bounds, and boundary straddles fall back to exact power comparisons.
    """
    D = verification_bound
    if D < 2:
        raise ValueError("verification bound must be >= 2")
    from math import gcd

    lo3, hi3 = log2_3_fixed(FRAC_BITS)
    loD, hiD = log2_with_reciprocal_fixed(D, FRAC_BITS)
    scale = 1 << FRAC_BITS
    # fractional 64-bit limb of log2 3 and a ceiling on the window width
    theta64 = (lo3 >> (FRAC_BITS - 64)) & ((1 << 64) - 1)
    delta = hiD - lo3
    delta64 = (delta >> (FRAC_BITS - 64)) + 2
    n_cap = (period_cutoff * scale) // lo3 + 2

    feasible: list[tuple[int, int]] = []
    rejections: list[tuple[int, int]] = []
    packed_memo: dict[tuple[int, int], bool] = {}
    min_pair: Optional[tuple[int, int]] = None
    exact_checks = 0
    block = 1 << 24
    t64 = np.uint64(theta64)
    d64 = np.uint64(delta64 + 3)

    def window_feasible(nn: int) -> Optional[int]:
        nonlocal exact_checks
        nL, nH = nn * lo3, nn * hi3
        p = nL // scale + 1
        top_lo = nn * loD
        if p * scale > nH and p * scale < top_lo:
            return int(p)
        if nL // scale != nH // scale or (top_lo <= p * scale <= nn * hiD):
            exact_checks += 1
            for cand in (int(p) - 1, int(p)):
                if cand >= 1 and _feasible_exact(nn, cand, D):
                    return cand
        return None

    def packed_ok(nn: int, p: int) -> bool:
        g = gcd(nn, p)
        key = (nn // g, p // g)  # equal minimal elements along repeated words
        if key not in packed_memo:
            packed_memo[key] = packed_bound_exceeds(*key, D)
        return packed_memo[key]

    base = 1
    while base <= n_cap:
        hi = int(min(base + block - 1, n_cap))
        n = np.arange(base, hi + 1, dtype=np.uint64)
        r = n * t64                      # wraps: fractional part in 2^-64 units
        sel = np.invert(r) < n * d64 + np.uint64(8)
        for nn in n[sel].tolist():
            p = window_feasible(nn)
            if p is None:
                continue
            feasible.append((nn, p))
            if min_pair is None:
                if packed_ok(nn, p):
                    min_pair = (nn, p)
                else:
                    rejections.append((nn, p))
        if first_only and min_pair is not None:
            break
        base = hi + 1

    feasible.sort()
    periods = sorted({p for _, p in feasible if p <= period_cutoff})
    report = CycleBoundReport(
        verification_bound=D,
        min_odd_terms=min_pair[0] if min_pair else None,
        min_period=min_pair[1] if min_pair else None,
        feasible_periods=periods,
        period_cutoff=period_cutoff,
        scanned_odd_terms=int(min(n_cap, 1 << 62)),
        window_constants_hex={
            "log2_3": hex(lo3),
            "log2_3_plus_1_over_D": hex(loD),
            "frac_bits": FRAC_BITS,
        },
        boundary_exact_checks=exact_checks,
        packing_rejections=rejections,
    )
    return report


def linear_combination_witness(
    periods: Iterable[int],
    generators: tuple[int, int, int],
    require_middle: bool = True,
) -> list[int]:
    """Periods not expressible as A*g0 + B*g1 + C*g2 with nonnegative A, B,
    C, B >= 1 when require_middle, and A*C = 0.  Empty list means all pass.
    """
    g0, g1, g2 = generators
    periods = sorted(set(periods))
    if not periods:
        return []
    top = periods[-1]
    reachable = set()
    b = 1 if require_middle else 0
    while b * g1 <= top:
        base = b * g1
        if b >= 1 or not require_middle:
            a = 0
            while base + a * g0 <= top:
                reachable.add(base + a * g0)
                a += 1
            c = 0
            while base + c * g2 <= top:
                reachable.add(base + c * g2)
                c += 1
        b += 1
    return [p for p in periods if p not in reachable]
