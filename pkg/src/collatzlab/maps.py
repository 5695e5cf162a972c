"""Iterable integer maps: a residue-affine DSL plus named special forms,
with a trajectory engine and exact cycle detection.

Residues always use mathematical mod (0 <= r < d), so maps act on negative
integers the way the cycle catalogue expects ({-1}, {-5,-7,-10} and the
-17 cycle of the 3x+1 function are ordinary orbits here).
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from fractions import Fraction
from math import gcd, isqrt
from typing import Iterable, Optional, Union


class MapError(ValueError):
    pass


class MapSyntaxError(MapError):
    """DSL syntax problem; carries the offending position."""

    def __init__(self, message: str, position: int):
        super().__init__(f"{message} (at position {position})")
        self.position = position


class MapDomainError(MapError):
    """Raised when a map is applied outside its domain; carries the iterate."""

    def __init__(self, message: str, value: int):
        super().__init__(f"{message}: {value}")
        self.value = value


@dataclass(frozen=True)
class Branch:
    """One residue branch x -> (num*x + add) / den with exact divisibility."""

    num: int
    add: int
    den: int

    def coeffs(self) -> tuple[Fraction, Fraction]:
        return Fraction(self.num, self.den), Fraction(self.add, self.den)


@dataclass(frozen=True)
class ResidueAffineMap:
    """x -> a_i x + b_i on the residue class x = i (mod modulus)."""

    modulus: int
    branches: tuple[Branch, ...]
    label: str = ""
    domain: Optional[tuple[int, int]] = None  # inclusive bounds, None = all of Z

    def __post_init__(self):
        if self.modulus < 2:
            raise MapError("modulus must be >= 2")
        if len(self.branches) != self.modulus:
            raise MapError("need exactly one branch per residue")
        for i, br in enumerate(self.branches):
            if br.den <= 0:
                raise MapError(f"residue {i}: denominator must be positive")
            a, b = br.coeffs()
            if Fraction(a.denominator * 1, 1) and self.modulus % a.denominator != 0:
                raise MapError(
                    f"integrality violation on residue {i}: "
                    f"denominator of {a} does not divide d={self.modulus}"
                )
            if (a * i + b).denominator != 1:
                raise MapError(
                    f"integrality violation on residue {i}: "
                    f"{a}*{i} + {b} is not an integer"
                )

    def in_domain(self, x: int) -> bool:
        return self.domain is None or (self.domain[0] <= x <= self.domain[1])

    def step(self, x: int) -> int:
        if not self.in_domain(x):
            raise MapDomainError(f"{self.label or 'map'} is undefined here", x)
        br = self.branches[x % self.modulus]
        return (br.num * x + br.add) // br.den

    def multiplier_divisor_form(self) -> tuple[int, list[int], list[int]]:
        """Rewrite as T(x) = (m_i x - r_i) / d with the map's own modulus as d."""
        d = self.modulus
        ms, rs = [], []
        for br in self.branches:
            a, b = br.coeffs()
            m = a * d
            r = -b * d
            if m.denominator != 1 or r.denominator != 1:
                raise MapError("branch does not fit the (m_i x - r_i)/d form")
            ms.append(int(m))
            rs.append(int(r))
        return d, ms, rs


@dataclass(frozen=True)
class CeilingMap:
    """Odd x -> ceil(beta*x), even x -> x/2, on x >= 1.

    beta is exact: a Fraction, sqrt(k) for integer k, or a decimal string
    with explicit precision (the ceiling is certified against the implied
    interval and refusal is an error rather than a silent rounding).
    """

    kind: str  # "rational" | "sqrt" | "decimal"
    num: int = 0
    den: int = 1
    sqrt_of: int = 0
    digits: str = ""
    label: str = ""

    def in_domain(self, x: int) -> bool:
        return x >= 1

    def _ceil_mul(self, x: int) -> int:
        if self.kind == "rational":
            return -((-self.num * x) // self.den)
        if self.kind == "sqrt":
            s = isqrt(self.sqrt_of * x * x)
            return s if s * s == self.sqrt_of * x * x else s + 1
        # decimal string with fixed precision: certified interval ceiling
        digits = self.digits
        point = digits.index(".") if "." in digits else len(digits)
        scale = 10 ** (len(digits) - point - 1) if "." in digits else 1
        mant = int(digits.replace(".", ""))
        lo, hi = mant * x, (mant + 1) * x
        clo, chi = -((-lo) // scale), -((-hi) // scale)
        if clo != chi:
            raise MapDomainError(
                f"beta precision insufficient to certify ceil(beta*x)", x
            )
        return clo

    def step(self, x: int) -> int:
        if x < 1:
            raise MapDomainError("ceiling map defined on x >= 1", x)
        if x % 2 == 0:
            return x // 2
        return self._ceil_mul(x)


@dataclass(frozen=True)
class FloorSqrt3Map:
    """x -> x/3 when 3 | x, else floor(x*sqrt(3)); defined on x >= 1."""

    label: str = "teriele"

    def in_domain(self, x: int) -> bool:
        return x >= 1

    def step(self, x: int) -> int:
        if x < 1:
            raise MapDomainError("floor-sqrt3 map defined on x >= 1", x)
        if x % 3 == 0:
            return x // 3
        return isqrt(3 * x * x)


MapSpec = Union[ResidueAffineMap, CeilingMap, FloorSqrt3Map]


# ---------------------------------------------------------------------------
# named map constructors


def _affine(modulus: int, rows: Iterable[tuple[Fraction, Fraction]], label: str,
            domain=None) -> ResidueAffineMap:
    branches = []
    for a, b in rows:
        den = a.denominator * b.denominator // gcd(a.denominator, b.denominator)
        branches.append(Branch(int(a * den), int(b * den), den))
    return ResidueAffineMap(modulus, tuple(branches), label, domain)


F = Fraction


def t_map() -> ResidueAffineMap:
    return _affine(2, [(F(1, 2), F(0)), (F(3, 2), F(1, 2))], "T")


def c_map() -> ResidueAffineMap:
    return _affine(2, [(F(1, 2), F(0)), (F(3), F(1))], "C")


def three_x_plus_d(d: int) -> ResidueAffineMap:
    if d < 1 or d % 2 == 0:
        raise MapError("3x+d requires odd d >= 1")
    return _affine(2, [(F(1, 2), F(0)), (F(3, 2), F(d, 2))], f"3x+d:{d}")


def qx_plus_one(q: int) -> ResidueAffineMap:
    if q < 3 or q % 2 == 0:
        raise MapError("qx+1 requires odd q >= 3")
    return _affine(2, [(F(1, 2), F(0)), (F(q, 2), F(1, 2))], f"qx+1:{q}")


def hasse_map(d: int, m: int, rs: list[int]) -> ResidueAffineMap:
    if d < 2:
        raise MapError("hasse map requires d >= 2")
    if gcd(m, d) != 1:
        raise MapError("hasse map requires gcd(m, d) = 1")
    if len(rs) != d - 1:
        raise MapError(f"hasse map needs {d - 1} offsets r_1..r_{d-1}")
    for j, r in enumerate(rs, start=1):
        if (m * j + r) % d != 0:
            raise MapError(f"hasse offset r_{j}={r} must satisfy r_j = -m*j (mod d)")
    rows = [(F(1, d), F(0))]
    rows += [(F(m, d), F(r, d)) for r in rs]
    return _affine(d, rows, f"hasse:{d},{m}")


def wiggin_map(D: int) -> ResidueAffineMap:
    if D < 2:
        raise MapError("wiggin map requires D >= 2")
    rows = [(F(1, D), F(0))]
    rows += [(F(D + 1), F(-j)) for j in range(1, D - 1)]
    rows += [(F(D + 1), F(1))]
    return _affine(D, rows, f"wiggin:{D}")


def collatz_permutation() -> ResidueAffineMap:
    # the original 1932 permutation: 3n -> 2n, 3n-1 -> 4n-1, 3n-2 -> 4n-3
    return _affine(
        3,
        [(F(2, 3), F(0)), (F(4, 3), F(-1, 3)), (F(4, 3), F(1, 3))],
        "collatz-perm",
    )


def atkin_permutation() -> ResidueAffineMap:
    # 3n -> 4n+3, 3n+1 -> 2n, 3n+2 -> 4n+1
    return _affine(
        3,
        [(F(4, 3), F(3)), (F(2, 3), F(-2, 3)), (F(4, 3), F(-5, 3))],
        "atkin-perm",
    )


def feix_mod3_map() -> ResidueAffineMap:
    return _affine(
        3,
        [(F(1, 3), F(0)), (F(2, 3), F(1, 3)), (F(7, 3), F(1, 3))],
        "feix3",
    )


def mahler_map() -> ResidueAffineMap:
    # 3x/2 on evens, (3x+1)/2 on odds; drives the Z-number criterion
    return _affine(2, [(F(3, 2), F(0)), (F(3, 2), F(1, 2))], "mahler")


def queneau_spiral(n: int) -> ResidueAffineMap:
    if n < 1:
        raise MapError("queneau spiral requires n >= 1")
    return _affine(
        2,
        [(F(1, 2), F(0)), (F(-1, 2), F(2 * n + 1, 2))],
        f"queneau:{n}",
        domain=(1, n),
    )


def beta_map(spec: str) -> CeilingMap:
    spec = spec.strip()
    if spec.startswith("sqrt:"):
        k = int(spec[5:])
        if k < 2:
            raise MapError("beta sqrt argument must be >= 2")
        return CeilingMap(kind="sqrt", sqrt_of=k, label=f"beta:sqrt:{k}")
    if "." in spec:
        if not re.fullmatch(r"\d+\.\d+", spec):
            raise MapError(f"bad decimal beta: {spec!r}")
        return CeilingMap(kind="decimal", digits=spec, label=f"beta:{spec}")
    frac = Fraction(spec)
    if frac <= 1:
        raise MapError("beta must exceed 1")
    return CeilingMap(
        kind="rational", num=frac.numerator, den=frac.denominator,
        label=f"beta:{spec}",
    )


# ---------------------------------------------------------------------------
# DSL parser

_BRANCH_RE = re.compile(
    r"""^\s*
    (?:
        \(\s*(?P<pcoef>-?\d+(?:/\d+)?)?\s*\*?\s*x\s*
           (?:(?P<psign>[+-])\s*(?P<pconst>\d+(?:/\d+)?))?\s*\)
        \s*/\s*(?P<pden>\d+)
      |
        (?P<coef>-?\d+(?:/\d+)?)?\s*\*?\s*x\s*
        (?:(?P<sign>[+-])\s*(?P<const>\d+(?:/\d+)?))?\s*
        (?:/\s*(?P<den>\d+))?
    )\s*$""",
    re.VERBOSE,
)


def _parse_expr(text: str, offset: int) -> tuple[Fraction, Fraction]:
    m = _BRANCH_RE.match(text)
    if not m:
        raise MapSyntaxError(f"cannot parse branch expression {text.strip()!r}", offset)
    if m.group("pden") is not None:
        coef = Fraction(m.group("pcoef") or 1)
        const = Fraction(0)
        if m.group("pconst"):
            const = Fraction(m.group("pconst"))
            if m.group("psign") == "-":
                const = -const
        den = int(m.group("pden"))
    else:
        coef = Fraction(m.group("coef") or 1)
        const = Fraction(0)
        if m.group("const"):
            const = Fraction(m.group("const"))
            if m.group("sign") == "-":
                const = -const
        den = int(m.group("den") or 1)
    if den == 0:
        raise MapSyntaxError("zero denominator", offset)
    return coef / den, const / den


def _parse_dsl(text: str) -> ResidueAffineMap:
    head, _, rest = text.partition(";")
    m = re.fullmatch(r"\s*d\s*=\s*(\d+)\s*", head)
    if not m:
        raise MapSyntaxError("map must start with 'd=<modulus>'", 0)
    d = int(m.group(1))
    if d < 2:
        raise MapError("modulus must be >= 2")
    rows: dict[int, tuple[Fraction, Fraction]] = {}
    offset = len(head) + 1
    for part in rest.split(";"):
        if part.strip() == "":
            offset += len(part) + 1
            continue
        res_txt, colon, expr_txt = part.partition(":")
        if not colon:
            raise MapSyntaxError("branch must look like '<residue>: <expr>'", offset)
        try:
            i = int(res_txt.strip())
        except ValueError:
            raise MapSyntaxError(f"bad residue {res_txt.strip()!r}", offset) from None
        if not 0 <= i < d:
            raise MapSyntaxError(f"residue {i} outside 0..{d - 1}", offset)
        if i in rows:
            raise MapSyntaxError(f"residue {i} defined twice", offset)
        rows[i] = _parse_expr(expr_txt, offset + len(res_txt) + 1)
        offset += len(part) + 1
    missing = [i for i in range(d) if i not in rows]
    if missing:
        raise MapSyntaxError(f"missing branches for residues {missing}", len(text))
    return _affine(d, [rows[i] for i in range(d)], text.strip())


def parse_map(text: str) -> MapSpec:
    """Parse a builtin map name or a residue-affine DSL string."""
    t = text.strip()
    simple = {
        "T": t_map,
        "C": c_map,
        "collatz-perm": collatz_permutation,
        "atkin-perm": atkin_permutation,
        "feix3": feix_mod3_map,
        "mahler": mahler_map,
        "teriele": FloorSqrt3Map,
    }
    if t in simple:
        return simple[t]()
    for prefix, fn in (
        ("3x+d:", lambda s: three_x_plus_d(int(s))),
        ("qx+1:", lambda s: qx_plus_one(int(s))),
        ("wiggin:", lambda s: wiggin_map(int(s))),
        ("queneau:", lambda s: queneau_spiral(int(s))),
        ("beta:", beta_map),
    ):
        if t.startswith(prefix):
            return fn(t[len(prefix):])
    if t.startswith("hasse:"):
        body = t[len("hasse:"):]
        m = re.fullmatch(r"\s*(\d+)\s*,\s*(\d+)\s*,\s*\[([^\]]*)\]\s*", body)
        if not m:
            raise MapSyntaxError("hasse syntax: hasse:<d>,<m>,[r1,...]", len("hasse:"))
        d, mm = int(m.group(1)), int(m.group(2))
        rs = [int(x) for x in m.group(3).split(",")] if m.group(3).strip() else []
        return hasse_map(d, mm, rs)
    if t.startswith("d"):
        return _parse_dsl(t)
    raise MapSyntaxError(f"unknown map {text!r}", 0)


def step(map_spec: MapSpec, x: int) -> int:
    """One exact application of the map."""
    return map_spec.step(x)


# ---------------------------------------------------------------------------
# trajectories and cycles


@dataclass(frozen=True)
class CycleRecord:
    """A periodic orbit, stored from its canonical element onward.

    The canonical first element minimizes (|x|, x), which makes {1,2} print
    as (1, 2) and the negative cycles print from -1, -5 and -17.
    """

    elements: tuple[int, ...]
    map_label: str = ""

    @property
    def period(self) -> int:
        return len(self.elements)

    @property
    def min_element(self) -> int:
        return self.elements[0]

    @property
    def odd_count(self) -> int:
        return sum(1 for x in self.elements if x % 2 != 0)

    def verify(self, map_spec: MapSpec) -> bool:
        """Replay the map around the orbit with exact arithmetic."""
        for x, y in zip(self.elements, self.elements[1:] + self.elements[:1]):
            if map_spec.step(x) != y:
                return False
        return True


def _canonical_rotation(cycle: list[int]) -> tuple[int, ...]:
    i = min(range(len(cycle)), key=lambda k: (abs(cycle[k]), cycle[k]))
    return tuple(cycle[i:] + cycle[:i])


@dataclass(frozen=True)
class ReachedTarget:
    value: int


@dataclass(frozen=True)
class EnteredCycle:
    cycle: CycleRecord


@dataclass(frozen=True)
class StepLimit:
    pass


@dataclass(frozen=True)
class MagnitudeLimit:
    value: int


Termination = Union[ReachedTarget, EnteredCycle, StepLimit, MagnitudeLimit]

DEFAULT_STEP_LIMIT = 10**5
DEFAULT_MAGNITUDE_LIMIT = 1 << 1024


@dataclass
class Trajectory:
    start: int
    steps: int
    termination: Termination
    parity: str
    iterates: Optional[list[int]] = None
    stats: Optional[dict] = None

    @property
    def final(self) -> int:
        if isinstance(self.termination, ReachedTarget):
            return self.termination.value
        if self.iterates:
            return self.iterates[-1]
        raise ValueError("trajectory recorded no iterates")


def trajectory(
    map_spec: MapSpec,
    x: int,
    *,
    target_set: Optional[set[int]] = None,
    target_predicate=None,
    step_limit: int = DEFAULT_STEP_LIMIT,
    magnitude_limit: int = DEFAULT_MAGNITUDE_LIMIT,
    record_iterates: bool = True,
) -> Trajectory:
    """Iterate until a target is hit, a cycle is certified, or a limit trips.

    Cycle certification uses Brent's algorithm on the exact iterate stream,
    then replays the orbit to extract and verify the cycle.
    """
    if step_limit <= 0 or magnitude_limit <= 0:
        raise ValueError("limits must be positive")

    def hit(v: int) -> bool:
        if target_set is not None and v in target_set:
            return True
        return target_predicate is not None and bool(target_predicate(v))

    label = getattr(map_spec, "label", "")
    iterates = [x] if record_iterates else None
    parity = []
    if hit(x):
        return Trajectory(x, 0, ReachedTarget(x), "", iterates)

    # Brent's cycle detection interleaved with limits and target checks
    power = lam = 1
    tortoise = x
    hare = map_spec.step(x)
    parity.append(str(x & 1))
    if record_iterates:
        iterates.append(hare)
    steps = 1
    term: Optional[Termination] = None
    while True:
        if hit(hare):
            term = ReachedTarget(hare)
            break
        if abs(hare) > magnitude_limit:
            term = MagnitudeLimit(hare)
            break
        if steps >= step_limit:
            term = StepLimit()
            break
        if tortoise == hare:
            # period is lam; rewind to find the cycle start, then extract
            mu = 0
            t2, h2 = x, x
            for _ in range(lam):
                h2 = map_spec.step(h2)
            while t2 != h2:
                t2 = map_spec.step(t2)
                h2 = map_spec.step(h2)
                mu += 1
            cyc = [t2]
            y = map_spec.step(t2)
            while y != t2:
                cyc.append(y)
                y = map_spec.step(y)
            record = CycleRecord(_canonical_rotation(cyc), label)
            if record_iterates:
                del iterates[mu + len(cyc):]
            term = EnteredCycle(record)
            steps = mu + len(cyc)
            parity = parity[:steps]
            break
        if power == lam:
            tortoise = hare
            power *= 2
            lam = 0
        parity.append(str(hare & 1))
        hare = map_spec.step(hare)
        lam += 1
        steps += 1
        if record_iterates:
            iterates.append(hare)
    return Trajectory(x, steps, term, "".join(parity[:steps]), iterates)


@dataclass
class CycleSearchResult:
    cycles: list[CycleRecord]
    unresolved: list[int]
    searched: tuple[int, int]

    def by_min_element(self) -> dict[int, CycleRecord]:
        return {c.min_element: c for c in self.cycles}


def find_cycles(
    map_spec: MapSpec,
    search_range: tuple[int, int],
    *,
    step_limit: int = DEFAULT_STEP_LIMIT,
    magnitude_limit: int = DEFAULT_MAGNITUDE_LIMIT,
) -> CycleSearchResult:
    """All cycles whose orbit intersects [lo, hi] within the limits.

    Starting points whose fate is unresolved at the limits are reported,
    never dropped.  Cycles are deduplicated by canonical rotation; each walk
    memoizes the fate of every in-range point it visits, so the sweep is
    near-linear for contracting maps.
    """
    lo, hi = search_range
    if lo > hi:
        raise MapError("search range must satisfy lo <= hi")
    fate: dict[int, object] = {}
    cycles: dict[tuple[int, ...], CycleRecord] = {}
    unresolved: list[int] = []

    starts = sorted(range(lo, hi + 1), key=lambda v: (abs(v), v))
    for s in starts:
        if s in fate:
            if fate[s] == "unresolved":
                unresolved.append(s)
            continue
        if hasattr(map_spec, "in_domain") and not map_spec.in_domain(s):
            continue
        path: list[int] = []
        pos: dict[int, int] = {}
        v = s
        outcome: object = None
        while True:
            if v in pos:
                cyc = path[pos[v]:]
                rec = CycleRecord(_canonical_rotation(cyc), getattr(map_spec, "label", ""))
                cycles.setdefault(rec.elements, rec)
                outcome = rec.elements
                break
            if v in fate:
                outcome = fate[v]
                break
            pos[v] = len(path)
            path.append(v)
            try:
                v = map_spec.step(v)
            except MapDomainError:
                outcome = "unresolved"
                break
            if abs(v) > magnitude_limit or len(path) >= step_limit:
                outcome = "unresolved"
                break
        for p in path:
            if lo <= p <= hi:
                fate[p] = outcome
        if outcome == "unresolved" and lo <= s <= hi:
            unresolved.append(s)

    ordered = sorted(cycles.values(), key=lambda c: (abs(c.min_element), c.min_element))
    return CycleSearchResult(ordered, sorted(set(unresolved)), (lo, hi))
