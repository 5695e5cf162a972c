"""FRACTRAN interpreter and periodically-linear machines."""

from fractions import Fraction
from importlib import resources

import pytest

from collatzlab.fractran import (
    PRIMEGAME,
    FractranProgram,
    conway_iterate,
    fractran_as_multiplier_map,
    fractran_iter,
    fractran_run,
    fractran_step,
    parse_program,
    primegame_exponents,
)
from collatzlab.maps import EnteredCycle, MapError, ReachedTarget, parse_map


def _sieve_primes(count):
    primes, n = [], 2
    while len(primes) < count:
        if all(n % p for p in primes):
            primes.append(n)
        n += 1
    return primes


def test_step_basics():
    prog = FractranProgram((Fraction(3, 2),))
    assert fractran_step(prog, 2) == 3
    assert fractran_step(prog, 3) is None


def test_run_from_one_halts_immediately():
    prog = FractranProgram((Fraction(3, 2),))
    res = fractran_run(prog, 1, halt="none")
    assert res.halted and res.steps == 0 and not res.outputs


def test_first_match_rule():
    prog = FractranProgram((Fraction(5, 2), Fraction(7, 2)))
    # both apply to evens; the first must win every time
    assert fractran_step(prog, 2) == 5
    assert fractran_step(prog, 4) == 10


def test_primegame_first_five():
    assert primegame_exponents(5) == [2, 3, 5, 7, 11]


def test_primegame_fifty_against_sieve():
    assert primegame_exponents(50) == _sieve_primes(50)


def test_determinism():
    prog = FractranProgram(PRIMEGAME)
    a = [v for _, v in zip(range(2000), fractran_iter(prog, 2))]
    b = [v for _, v in zip(range(2000), fractran_iter(prog, 2))]
    assert a == b


def test_register_view_consistency():
    prog = FractranProgram(PRIMEGAME)
    for step, value in fractran_iter(prog, 2):
        if step > 300:
            break
        regs, cofactor = prog.registers(value)
        rebuilt = cofactor
        for p, e in regs.items():
            rebuilt *= p**e
        assert rebuilt == value


def test_parse_program_and_bundled_file():
    text = resources.files("collatzlab").joinpath("programs/primegame.frc").read_text()
    prog = parse_program(text)
    assert prog.fractions == PRIMEGAME
    with pytest.raises(ValueError, match="line 1"):
        parse_program("3/0")


def test_run_value_halt_and_budget():
    prog = FractranProgram(PRIMEGAME)
    res = fractran_run(prog, 2, halt="value", halt_value=4)
    assert res.outputs == [4] and not res.budget_exhausted
    res = fractran_run(prog, 2, halt="power_of_two", max_steps=5)
    assert res.budget_exhausted and not res.halted


def test_conway_identity_map():
    m = parse_map("d=2; 0: x; 1: x")
    tr = conway_iterate(m, 6, step_limit=10)
    # identity trajectory: cycles on itself immediately
    assert isinstance(tr.termination, EnteredCycle)
    assert tr.termination.cycle.elements == (6,)


def test_conway_rejects_offsets():
    with pytest.raises(MapError, match="offset"):
        conway_iterate(parse_map("T"), 5)


def test_conway_power_of_two_detection():
    # doubling map: from 3, the first power of two never comes; from 2 it is 4
    m = parse_map("d=2; 0: 2x; 1: 2x")
    tr = conway_iterate(m, 2, step_limit=10)
    assert isinstance(tr.termination, ReachedTarget)
    assert tr.termination.value == 4


def test_small_program_as_multiplier_map():
    prog = FractranProgram((Fraction(3, 2), Fraction(5, 1)))
    m = fractran_as_multiplier_map(prog)
    assert m.modulus == 2
    assert m.step(4) == 6 and m.step(3) == 15
    # agreement with the interpreter on a stretch of values
    for start in (2, 3, 10):
        x, y = start, start
        for _ in range(12):
            x = fractran_step(prog, x)
            y = m.step(y)
            assert x == y


def test_multiplier_map_partiality_detected():
    with pytest.raises(MapError, match="partial"):
        fractran_as_multiplier_map(FractranProgram((Fraction(1, 2),)))
