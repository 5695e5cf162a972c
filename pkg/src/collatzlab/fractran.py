"""FRACTRAN interpreter and periodically-linear machine runner.

A program is an ordered list of positive fractions; one step multiplies the
current positive integer by the first fraction that yields an integer, and
a run halts when no fraction applies.  The classic halting convention for
register-machine encodings instead watches for powers of two, which is
available as a halt predicate here, along with an exponent-register view of
the state over the primes of the program.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import gcd, lcm
from typing import Iterable, Iterator, Optional, Union

from .maps import MapError, ResidueAffineMap, Trajectory, trajectory

#: Conway's prime-producing program, from his FRACTRAN paper ("FRACTRAN: a
#: simple universal programming language for arithmetic", Open Problems in
#: Communication and Computation, Springer, 1987).  Started at 2, the powers
#: of two it emits are exactly 2^p over the primes p in increasing order.
PRIMEGAME = tuple(
    Fraction(p, q)
    for p, q in (
        (17, 91), (78, 85), (19, 51), (23, 38), (29, 33), (77, 29), (95, 23),
        (77, 19), (1, 17), (11, 13), (13, 11), (15, 14), (15, 2), (55, 1),
    )
)


@dataclass(frozen=True)
class FractranProgram:
    fractions: tuple[Fraction, ...]

    def __post_init__(self):
        if not self.fractions:
            raise ValueError("program must contain at least one fraction")
        for f in self.fractions:
            if f <= 0:
                raise ValueError("fractions must be positive")

    @property
    def primes(self) -> tuple[int, ...]:
        """Primes dividing any numerator or denominator."""
        seen = set()
        for f in self.fractions:
            for v in (f.numerator, f.denominator):
                for p in _factorize(v):
                    seen.add(p)
        return tuple(sorted(seen))

    def registers(self, value: int) -> tuple[dict[int, int], int]:
        """Exponent view of value over the program primes, plus cofactor."""
        regs = {}
        rest = value
        for p in self.primes:
            e = 0
            while rest % p == 0:
                rest //= p
                e += 1
            regs[p] = e
        return regs, rest


def _factorize(v: int) -> Iterator[int]:
    d = 2
    while d * d <= v:
        if v % d == 0:
            yield d
            while v % d == 0:
                v //= d
        d += 1
    if v > 1:
        yield v


def parse_program(text: str) -> FractranProgram:
    """One fraction per line as p/q (or a bare integer); # starts a comment."""
    fracs = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        try:
            if "/" in line:
                a, b = line.split("/")
                fracs.append(Fraction(int(a), int(b)))
            else:
                fracs.append(Fraction(int(line)))
        except (ValueError, ZeroDivisionError) as exc:
            raise ValueError(f"bad fraction on line {lineno}: {raw!r}") from exc
    return FractranProgram(tuple(fracs))


def fractran_step(prog: FractranProgram, m: int) -> Optional[int]:
    """First applicable fraction times m, or None when the program halts."""
    if m < 1:
        raise ValueError("machine value must be >= 1")
    for f in prog.fractions:
        if m % f.denominator == 0:
            return m // f.denominator * f.numerator
    return None


def _is_power_of_two(v: int) -> bool:
    return v & (v - 1) == 0


@dataclass
class RunResult:
    start: int
    steps: int
    halted: bool                      # no fraction applied
    budget_exhausted: bool
    outputs: list[int] = field(default_factory=list)   # values hitting the predicate
    final: Optional[int] = None

    def to_dict(self) -> dict:
        return {
            "schema": "collatzlab/fractran-run-v1",
            "start": str(self.start),
            "steps": self.steps,
            "halted": self.halted,
            "budget_exhausted": self.budget_exhausted,
            "outputs": [str(v) for v in self.outputs],
            "final": None if self.final is None else str(self.final),
        }


def fractran_iter(prog: FractranProgram, m0: int) -> Iterator[tuple[int, int]]:
    """Stream (step, value) pairs starting from (0, m0) until a halt."""
    m = m0
    step = 0
    yield step, m
    while True:
        nxt = fractran_step(prog, m)
        if nxt is None:
            return
        m = nxt
        step += 1
        yield step, m


def fractran_run(
    prog: FractranProgram,
    m0: int,
    halt: str = "power_of_two",
    halt_value: Optional[int] = None,
    max_steps: int = 10**6,
    max_outputs: Optional[int] = None,
) -> RunResult:
    """Run under a halting predicate.

    halt is one of "power_of_two" (collect every power of two after the
    start; stop at max_outputs of them), "value" (stop when halt_value
    appears), or "none" (run to genuine halt or budget).  Budget exhaustion
    is reported separately from a genuine halt.
    """
    if halt not in ("power_of_two", "value", "none"):
        raise ValueError("unknown halt predicate")
    outputs: list[int] = []
    halted = False
    final = m0
    steps = 0
    it = fractran_iter(prog, m0)
    next(it)  # starting value is not an output
    budget = False
    for step, value in it:
        steps, final = step, value
        if halt == "power_of_two" and _is_power_of_two(value):
            outputs.append(value)
            if max_outputs is not None and len(outputs) >= max_outputs:
                break
        elif halt == "value" and value == halt_value:
            outputs.append(value)
            break
        if step >= max_steps:
            budget = True
            break
    else:
        halted = True
    return RunResult(m0, steps, halted, budget, outputs, final)


def primegame_exponents(count: int, max_steps: int = 10**7) -> list[int]:
    """Exponents of the first `count` powers of two computed by PRIMEGAME."""
    prog = FractranProgram(PRIMEGAME)
    outputs = []
    m = 2
    steps = 0
    while len(outputs) < count and steps < max_steps:
        m = fractran_step(prog, m)
        if m is None:
            break
        steps += 1
        if _is_power_of_two(m):
            outputs.append(m.bit_length() - 1)
    if len(outputs) < count:
        raise RuntimeError("step budget exhausted before enough outputs")
    return outputs


def fractran_as_multiplier_map(prog: FractranProgram) -> ResidueAffineMap:
    """The program as a periodically-linear map g(x) = a_j x for x = j
    (mod N), N = lcm of the denominators; only valid when some fraction
    applies to every residue (a total map)."""
    N = lcm(*[f.denominator for f in prog.fractions])
    if N > 10**6:
        raise MapError("modulus too large to tabulate")
    from fractions import Fraction as F

    rows = []
    for r in range(N):
        mult = None
        for f in prog.fractions:
            if r % f.denominator == 0:
                mult = f
                break
        if mult is None:
            raise MapError(f"no fraction applies to residue {r}; map is partial")
        rows.append((mult, F(0)))
    from .maps import _affine

    return _affine(N, rows, "fractran-linear")


def conway_iterate(
    machine: Union[ResidueAffineMap, FractranProgram],
    n0: int,
    step_limit: int = 10**5,
    magnitude_limit: int = 1 << 4096,
) -> Trajectory:
    """Iterate a pure-multiplier periodically-linear function with built-in
    power-of-two detection; accepts a FRACTRAN program as the machine."""
    if isinstance(machine, FractranProgram):
        mp = fractran_as_multiplier_map(machine)
    else:
        mp = machine
        for i, br in enumerate(mp.branches):
            if br.add != 0:
                raise MapError(f"branch {i} has a nonzero offset; need a_j * x form")
    return trajectory(
        mp,
        n0,
        target_predicate=lambda v: v != n0 and v >= 1 and _is_power_of_two(v),
        step_limit=step_limit,
        magnitude_limit=magnitude_limit,
    )
