"""
Brute-force cross-check of the cohomology pipeline.

For a small enough instance every map G -> M with Z_e = 0 is tried against the
cocycle identity directly. The resulting sets are compared with the
generator-coordinate computation in cohomology.
"""

from __future__ import annotations

import itertools
import logging
from collections.abc import Iterable
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from cohomology import GModule, cocycle_space, h1, h1_loc
from config import Config
from matgroup import MatGroup, closure, diagonal_matrix
from zmod_linalg import ResidueMatrix, enumerate_span

logger = logging.getLogger("h1loc.oracle")


@dataclass(frozen=True)
class OracleInstance:
    """A group given by generators, acting naturally on (Z/m)^rank."""

    name: str
    modulus: int
    generators: tuple[ResidueMatrix, ...]

    @property
    def rank(self) -> int:
        return self.generators[0].rows

    @cached_property
    def group(self) -> MatGroup:
        return closure(self.generators)

    @property
    def module_size(self) -> int:
        return self.modulus**self.rank

    @property
    def map_count(self) -> int:
        return self.module_size ** len(self.group)

    def to_spec(self) -> dict:
        """The instance in spec-file form."""
        return {
            "modulus": self.modulus,
            "rank": self.rank,
            "generators": [[list(g.row(i)) for i in range(g.rows)] for g in self.generators],
        }


def _instance(name: str, modulus: int, generators: Iterable[list[list[int]]]) -> OracleInstance:
    return OracleInstance(name, modulus, tuple(ResidueMatrix.from_rows(g, modulus) for g in generators))


def default_corpus() -> list[OracleInstance]:
    """Small groups over Z/3, Z/4, Z/8 and Z/9 that keep enumeration cheap."""
    return [
        OracleInstance("trivial on Z/4", 4, (ResidueMatrix.identity(1, 4),)),
        _instance("<3> on Z/4", 4, [[[3]]]),
        _instance("<7> on Z/8", 8, [[[7]]]),
        _instance("(Z/8)* on Z/8", 8, [[[3]], [[5]]]),
        _instance("<4> on Z/9", 9, [[[4]]]),
        _instance("<8> on Z/9", 9, [[[8]]]),
        OracleInstance("Klein diagonal on (Z/3)^2", 3, (diagonal_matrix([2, 1], 3), diagonal_matrix([1, 2], 3))),
        OracleInstance("<diag(3, 1)> on (Z/4)^2", 4, (diagonal_matrix([3, 1], 4),)),
        OracleInstance("<diag(3, 3)> on (Z/4)^2", 4, (diagonal_matrix([3, 3], 4),)),
    ]


@dataclass(frozen=True)
class BruteForceResult:
    cocycles: frozenset[tuple[int, ...]]
    coboundaries: frozenset[tuple[int, ...]]
    local_cocycles: frozenset[tuple[int, ...]]

    @property
    def h1_order(self) -> int:
        return len(self.cocycles) // len(self.coboundaries)

    @property
    def h1_loc_order(self) -> int:
        return len(self.local_cocycles) // len(self.coboundaries)


def _module_elements(modulus: int, rank: int) -> np.ndarray:
    return np.array(list(itertools.product(range(modulus), repeat=rank)), dtype=np.int64).reshape(-1, rank)


def brute_force(module: GModule) -> BruteForceResult:
    """Every cocycle, coboundary and locally trivial cocycle as flattened tables."""
    group, m, r = module.group, module.modulus, module.rank
    n = len(group)
    if module.size**n > Config.ORACLE_MAX_MAPS:
        raise ValueError(f"|M|^|G| = {module.size ** n} exceeds the oracle limit of {Config.ORACLE_MAX_MAPS}")

    products = np.array([[group.multiply(i, j) for j in range(n)] for i in range(n)], dtype=np.int64)
    elements = _module_elements(m, r)
    actions = module.actions
    identity = np.eye(r, dtype=np.int64)

    moved = [{tuple(int(x) for x in row) for row in (elements @ (actions[g] - identity).T) % m} for g in range(n)]
    coboundaries = frozenset(
        tuple(int(x) for x in ((actions @ v) - v).ravel() % m) for v in elements
    )

    cocycles = set()
    local = set()
    others = [g for g in range(n) if g != group.identity]
    for choice in itertools.product(range(len(elements)), repeat=len(others)):
        table = np.zeros((n, r), dtype=np.int64)
        for g, k in zip(others, choice):
            table[g] = elements[k]
        lhs = table[products]
        rhs = (table[:, None, :] + np.einsum("aij,bj->abi", actions, table)) % m
        if not np.array_equal(lhs, rhs):
            continue
        flat = tuple(int(x) for x in table.ravel())
        cocycles.add(flat)
        if all(tuple(int(x) for x in table[g]) in moved[g] for g in range(n)):
            local.add(flat)
    return BruteForceResult(frozenset(cocycles), coboundaries, frozenset(local))


def brute_force_order_census(result: BruteForceResult, modulus: int) -> dict[int, int]:
    """Element orders in Z1_loc / B1, counted per class."""
    census: dict[int, int] = {}
    for flat in result.local_cocycles:
        vector = np.array(flat, dtype=np.int64)
        order = 1
        while tuple(int(x) for x in (order * vector) % modulus) not in result.coboundaries:
            order += 1
        census[order] = census.get(order, 0) + 1
    size = len(result.coboundaries)
    return {order: count // size for order, count in census.items()}


@dataclass
class OracleOutcome:
    instance: OracleInstance
    mismatches: list[str] = field(default_factory=list)

    @property
    def agreed(self) -> bool:
        return not self.mismatches


def check_instance(instance: OracleInstance) -> OracleOutcome:
    """Compare Z1, B1, H1 and H1_loc orders against enumeration for one instance."""
    module = GModule.natural(instance.group)
    expected = brute_force(module)
    outcome = OracleOutcome(instance)

    computed = frozenset(enumerate_span(cocycle_space(module)))
    if computed != expected.cocycles:
        outcome.mismatches.append(f"Z1: {len(computed)} computed, {len(expected.cocycles)} by enumeration")
    full = h1(module)
    if full.order != expected.h1_order:
        outcome.mismatches.append(f"|H1|: {full.order} computed, {expected.h1_order} by enumeration")
    local = h1_loc(module)
    if local.order != expected.h1_loc_order:
        outcome.mismatches.append(f"|H1_loc|: {local.order} computed, {expected.h1_loc_order} by enumeration")
    census = brute_force_order_census(expected, module.modulus)
    if local.structure.element_order_census() != census:
        outcome.mismatches.append(f"H1_loc element orders: {local.structure} against census {census}")
    logger.debug("oracle %s: %s", instance.name, "agree" if outcome.agreed else outcome.mismatches)
    return outcome


@dataclass
class OracleSummary:
    checked: list[OracleOutcome] = field(default_factory=list)
    skipped: list[str] = field(default_factory=list)

    @property
    def failures(self) -> list[OracleOutcome]:
        return [o for o in self.checked if not o.agreed]

    @property
    def passed(self) -> bool:
        return not self.failures

    def minimal_failure(self) -> OracleOutcome | None:
        """The failing instance with the fewest maps G -> M."""
        failures = self.failures
        if not failures:
            return None
        return min(failures, key=lambda o: (o.instance.map_count, o.instance.name))


def run_oracle(
    max_group: int | None = None,
    max_module: int | None = None,
    corpus: Iterable[OracleInstance] | None = None,
) -> OracleSummary:
    """Check every corpus instance within the size limits."""
    max_group = Config.ORACLE_MAX_GROUP if max_group is None else max_group
    max_module = Config.ORACLE_MAX_MODULE if max_module is None else max_module
    summary = OracleSummary()
    for instance in corpus if corpus is not None else default_corpus():
        if (
            len(instance.group) > max_group
            or instance.module_size > max_module
            or instance.map_count > Config.ORACLE_MAX_MAPS
        ):
            summary.skipped.append(instance.name)
            continue
        summary.checked.append(check_instance(instance))
    return summary
