"""
Residue conditions for choosing a real quadratic field inside an indefinite
quaternion algebra over Q.

Given the discriminant D, the order index M and an odd prime p with p not
dividing D or M, find the smallest non-square d > 0 with

    (d / p) = 1,   (d / l) = -1 for every odd l | D,   d = 5 mod 8 if 2 | D.
"""

from __future__ import annotations

import itertools
import logging
from dataclasses import dataclass
from enum import Enum

from sympy import factorint, isprime
from sympy.ntheory.modular import crt
from sympy.ntheory.primetest import is_square

from config import Config

logger = logging.getLogger("h1loc.eichler")


class HypothesisError(ValueError):
    """The input violates the hypotheses on D, M or p."""


class SearchBoundError(ValueError):
    """No admissible d below the search bound."""


class SplitType(str, Enum):
    SPLIT = "split"
    INERT = "inert"
    RAMIFIED = "ramified"


def _require_odd_prime(p: int, name: str = "p") -> None:
    if p < 3 or not isprime(p):
        raise HypothesisError(f"{name}={p} must be an odd prime")


def legendre_symbol(a: int, p: int) -> int:
    """(a / p) by Euler's criterion."""
    _require_odd_prime(p)
    residue = pow(a % p, (p - 1) // 2, p)
    if residue == 0:
        return 0
    return 1 if residue == 1 else -1


def squarefree_part(d: int) -> int:
    """d with every square factor removed, keeping the sign."""
    if d == 0:
        raise ValueError("0 has no squarefree part")
    part = -1 if d < 0 else 1
    for prime, exponent in factorint(abs(d)).items():
        if exponent % 2:
            part *= prime
    return part


def field_discriminant(d: int) -> int:
    """Discriminant of Q(sqrt d): d0 if d0 = 1 mod 4, else 4 d0."""
    d0 = squarefree_part(d)
    if d0 == 1:
        raise ValueError(f"{d} is a square, Q(sqrt {d}) is not a quadratic field")
    return d0 if d0 % 4 == 1 else 4 * d0


def split_type(d: int, q: int) -> SplitType:
    """Behaviour of the prime q in Q(sqrt d)."""
    if q < 2 or not isprime(q):
        raise HypothesisError(f"q={q} must be prime")
    if d > 0 and is_square(d):
        raise ValueError(f"d={d} is a perfect square")
    d0 = squarefree_part(d)
    if q == 2:
        if d0 % 8 == 1:
            return SplitType.SPLIT
        if d0 % 8 == 5:
            return SplitType.INERT
        return SplitType.RAMIFIED
    symbol = legendre_symbol(d0, q)
    if symbol == 0:
        return SplitType.RAMIFIED
    return SplitType.SPLIT if symbol == 1 else SplitType.INERT


@dataclass(frozen=True)
class QuaternionInput:
    """D: discriminant of the algebra, M: index of the order, p: the prime of interest."""

    D: int
    M: int
    p: int

    def __post_init__(self):
        if self.D < 1:
            raise HypothesisError(f"D={self.D} must be positive")
        if self.M < 1:
            raise HypothesisError(f"M={self.M} must be positive")
        if self.p == 2:
            raise HypothesisError("p must be odd")
        _require_odd_prime(self.p)
        factors = factorint(self.D)
        if any(exponent > 1 for exponent in factors.values()):
            raise HypothesisError(f"D={self.D} is not squarefree")
        if len(factors) % 2:
            raise HypothesisError(f"D={self.D} has an odd number of prime factors, the algebra is not indefinite")
        if self.D % self.p == 0:
            raise HypothesisError("p divides D")
        if self.M % self.p == 0:
            raise HypothesisError("p divides M")

    @property
    def ramified_primes(self) -> list[int]:
        return sorted(factorint(self.D))


@dataclass(frozen=True)
class Condition:
    name: str
    holds: bool
    detail: str = ""


def embedding_conditions(data: QuaternionInput, d: int) -> list[Condition]:
    """Each residue condition on d, evaluated directly on d."""
    conditions = [
        Condition(f"({d}/{data.p}) = 1", legendre_symbol(d, data.p) == 1, f"{d} mod {data.p} = {d % data.p}"),
    ]
    for ell in data.ramified_primes:
        if ell == 2:
            conditions.append(Condition(f"{d} = 5 mod 8", d % 8 == 5, f"{d} mod 8 = {d % 8}"))
        else:
            conditions.append(
                Condition(f"({d}/{ell}) = -1", legendre_symbol(d, ell) == -1, f"{d} mod {ell} = {d % ell}")
            )
    conditions.append(Condition(f"{d} is not a square", not is_square(d)))
    return conditions


def _admissible_residues(data: QuaternionInput) -> tuple[list[int], list[list[int]]]:
    moduli = [data.p]
    choices = [[r for r in range(1, data.p) if legendre_symbol(r, data.p) == 1]]
    for ell in data.ramified_primes:
        if ell == 2:
            moduli.append(8)
            choices.append([5])
        else:
            moduli.append(ell)
            choices.append([r for r in range(1, ell) if legendre_symbol(r, ell) == -1])
    return moduli, choices


def find_discriminant_d(data: QuaternionInput, search_bound: int | None = None) -> int:
    """Smallest non-square d <= search_bound meeting every residue condition.

    The admissible classes modulo L = p * prod(odd l | D) * (8 if 2 | D) are
    fixed by CRT first; the progression t L + r is then scanned in order.
    """
    bound = Config.QUAT_SEARCH_BOUND if search_bound is None else search_bound
    if bound < 1:
        raise ValueError(f"search bound {bound} must be positive")
    moduli, choices = _admissible_residues(data)
    classes = sorted(int(crt(moduli, list(combo))[0]) for combo in itertools.product(*choices))
    period = 1
    for m in moduli:
        period *= m
    logger.debug("D=%d p=%d: %d admissible classes mod %d", data.D, data.p, len(classes), period)

    for base in range(0, bound + 1, period):
        for r in classes:
            d = base + r
            if d > bound:
                break
            if d > 0 and not is_square(d):
                if not all(c.holds for c in embedding_conditions(data, d)):
                    raise RuntimeError(f"d={d} fails its own residue conditions")
                return d
    raise SearchBoundError(f"no admissible d <= {bound} for D={data.D}, p={data.p}")
