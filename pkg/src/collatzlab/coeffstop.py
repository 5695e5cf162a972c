"""Coefficient stopping time and verification that it equals the stopping time.

After k steps the T iteration acts affinely: T^k(n) = coeff * n + offset
with coeff = 3^a / 2^k (a = odd steps so far).  The coefficient stopping
time of n is the first k with coeff < 1; it never exceeds the stopping
time, and the conjecture that the two always agree is checked here by the
classical route: a disagreement at (a, k) forces n <= B / (2^k - 3^a) for
an additive term B built from a prefix-dominating parity word, so maximal
B values over all dangerous exponent pairs produce a finite search bound
that a direct sweep then clears.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

import numpy as np

from .cf import cf_log2_3
from .stats import t_step_int

DEFAULT_K_CAP = 4000


@dataclass
class CoeffStopRecord:
    n: int
    k: Optional[int]                  # coefficient stopping time; None if unresolved
    odd_steps: Optional[int]
    coeff: Optional[Fraction]         # 3^a / 2^k at k
    offset: Optional[Fraction]        # exact additive term at k
    stopping_time: Optional[int]      # for comparison

    @property
    def resolved(self) -> bool:
        return self.k is not None

    def to_dict(self) -> dict:
        return {
            "schema": "collatzlab/coeffstop-v1",
            "n": str(self.n),
            "kappa": self.k,
            "odd_steps": self.odd_steps,
            "alpha": None if self.coeff is None else str(self.coeff),
            "beta": None if self.offset is None else str(self.offset),
            "sigma": self.stopping_time,
        }


def coeff_stop_record(n: int, step_limit: int = 10**5) -> CoeffStopRecord:
    """Exact coefficient stopping time of n with the affine identity asserted."""
    if n < 2:
        raise ValueError("n must be >= 2")
    x = n
    a = 0
    B = 0
    k = None
    a_at_k = B_at_k = 0
    sigma = None
    for j in range(1, step_limit + 1):
        if x & 1:
            B = 3 * B + (1 << (j - 1))
            a += 1
            x = (3 * x + 1) // 2
        else:
            x //= 2
        if k is None and 3**a < (1 << j):
            k, a_at_k, B_at_k = j, a, B
        if sigma is None and x < n:
            sigma = j
        if k is not None and sigma is not None:
            break
    if k is None:
        return CoeffStopRecord(n, None, None, None, None, sigma)
    coeff = Fraction(3**a_at_k, 1 << k)
    offset = Fraction(B_at_k, 1 << k)
    # affine identity at k: T^k(n) = coeff * n + offset, exactly
    y = n
    for _ in range(k):
        y = t_step_int(y)
    assert coeff * n + offset == y, "affine identity failed"
    return CoeffStopRecord(n, k, a_at_k, coeff, offset, sigma)


@dataclass
class DangerousPair:
    odd_steps: int            # a
    k: int                    # = ceil(a * log2 3)
    gap: str                  # 2^k - 3^a as a string (may be huge)
    max_offset_numerator: str
    counterexample_bound: int
    inequality_chain: str

    def to_dict(self) -> dict:
        return {
            "a": self.odd_steps,
            "k": self.k,
            "bound": self.counterexample_bound,
            "chain": self.inequality_chain,
        }


@dataclass
class CoeffStopReport:
    k_max: int
    verified: bool
    search_bound: int
    pairs: list[DangerousPair]
    counterexamples: list[int]
    swept: int
    convergent_denominators: list[int] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "schema": "collatzlab/coeffstop-verify-v1",
            "k_max": self.k_max,
            "verified": self.verified,
            "search_bound": self.search_bound,
            "pairs_examined": [p.to_dict() for p in self.pairs],
            "counterexamples": [str(c) for c in self.counterexamples],
            "swept": self.swept,
            "critical_denominators": self.convergent_denominators,
        }


def _dominating_offset_maxima(k_max: int) -> list[tuple[int, int, int]]:
    """For every first-crossing pair (a, k <= k_max), the exact maximum of
    the additive term B over parity words whose prefixes all keep the
    coefficient at or above 1.

    Returns (a, k, B_max) triples.  A word first crosses at k only via an
    even step, so the DP harvests even-step children that would violate
    prefix domination.
    """
    pow3 = [1]
    while len(pow3) < k_max + 4:
        pow3.append(pow3[-1] * 3)
    out: list[tuple[int, int, int]] = []
    cur: dict[int, int] = {0: 0}
    for j in range(k_max):
        nxt: dict[int, int] = {}
        for a, B in cur.items():
            # odd step: coefficient gains a factor 3/2, never crosses
            B2 = 3 * B + (1 << j)
            prev = nxt.get(a + 1, -1)
            if B2 > prev:
                nxt[a + 1] = B2
            # even step: crossing happens exactly when 3^a < 2^(j+1)
            if pow3[a] < (1 << (j + 1)):
                out.append((a, j + 1, B))
            else:
                if B > nxt.get(a, -1):
                    nxt[a] = B
        cur = nxt
    return out


def verify_coefficient_conjecture(
    k_max: int,
    k_cap: int = DEFAULT_K_CAP,
    verified_conjecture_bound: Optional[int] = None,
) -> CoeffStopReport:
    """Certify that the coefficient stopping time equals the stopping time
    for every n whose coefficient stopping time is at most k_max.

    Any counterexample with crossing pair (a, k) satisfies
    n * (2^k - 3^a) <= B <= B_max(a, k), so sweeping all n up to the
    largest such bound settles the conjecture below k_max.  The bound for
    every examined pair and the exact inequality chain are reported.
    verified_conjecture_bound, when given, must dominate the search bound
    (it documents how far plain 3x+1 verification is assumed).
    """
    if k_max < 1:
        raise ValueError("k_max must be >= 1")
    if k_max > k_cap:
        raise ValueError(f"k_max exceeds configured cap {k_cap}")
    triples = _dominating_offset_maxima(k_max)
    pairs: list[DangerousPair] = []
    bound = 0
    for a, k, B in triples:
        den = (1 << k) - 3**a
        nb = B // den
        pairs.append(
            DangerousPair(
                odd_steps=a,
                k=k,
                gap=str(den),
                max_offset_numerator=str(B),
                counterexample_bound=nb,
                inequality_chain=(
                    f"n*(2^{k} - 3^{a}) <= B_max = {B} with 2^{k} - 3^{a} = {den}, "
                    f"so n <= {nb}"
                ),
            )
        )
        bound = max(bound, nb)
    pairs.sort(key=lambda p: -p.counterexample_bound)
    if verified_conjecture_bound is not None and bound > verified_conjecture_bound:
        raise ValueError(
            "search bound exceeds the stated verified-conjecture bound; "
            "raise it or lower k_max"
        )
    counterexamples = _sweep_for_disagreement(bound, k_max)
    # dangerous pairs should track convergent/intermediate denominators of
    # the continued fraction of log2 3; record the catalogue for the report
    cf = cf_log2_3(min(24, 20))
    dens = [q for _, q in cf.convergents_with_intermediates() if q <= max(
        (p.odd_steps for p in pairs[:16]), default=1)]
    return CoeffStopReport(
        k_max=k_max,
        verified=not counterexamples,
        search_bound=bound,
        pairs=pairs[:64],
        counterexamples=counterexamples,
        swept=bound,
        convergent_denominators=dens,
    )


def _sweep_for_disagreement(n_max: int, k_max: int) -> list[int]:
    """All n <= n_max whose coefficient stopping time is <= k_max but whose
    stopping time differs (vectorized; exact int64-safe comparisons)."""
    if n_max < 2:
        return []
    # first k with 2^k > 3^a, as a lookup
    kmin = []
    p3 = 1
    while p3.bit_length() <= 400:
        kmin.append(p3.bit_length())
        p3 *= 3
    kmin = np.array(kmin, dtype=np.int64)

    bad: list[int] = []
    block = 1 << 20
    guard = (1 << 62) // 3
    for lo in range(2, n_max + 1, block):
        hi = min(lo + block - 1, n_max)
        n = np.arange(lo, hi + 1, dtype=np.int64)
        v = n.copy()
        a = np.zeros(len(n), dtype=np.int64)
        kappa = np.zeros(len(n), dtype=np.int64)
        idx = np.arange(len(n))
        j = 0
        while len(idx):
            j += 1
            odd = (v & 1).astype(bool)
            a[idx[odd]] += 1
            v = np.where(odd, 3 * v + 1, v) >> 1
            crossed = (kappa[idx] == 0) & (kmin[a[idx]] <= j)
            kappa[idx[crossed]] = j
            dropped = v < n[idx]
            if dropped.any():
                di = idx[dropped]
                # sigma = j here; disagreement iff kappa was set earlier
                bad.extend(int(x) for x in n[di[(kappa[di] != 0) & (kappa[di] < j)
                                               & (kappa[di] <= k_max)]])
                keep = ~dropped
                idx, v = idx[keep], v[keep]
            if len(v) and v.max() > guard:  # pragma: no cover - tiny n only
                raise OverflowError("coefficient sweep exceeded int64 guard")
            if j > 10**5:  # pragma: no cover
                raise RuntimeError("coefficient sweep did not terminate")
    return sorted(bad)


def residue_class_structure(k: int) -> bool:
    """Check that the coefficient stopping time with value j <= k is
    constant on residue classes mod 2^k (tested by shifting by 2^k)."""
    m = 1 << k
    for n in range(2, m + 2):
        r1 = coeff_stop_record(n)
        if r1.k is not None and r1.k <= k:
            r2 = coeff_stop_record(n + m)
            if r2.k != r1.k:
                return False
    return True
