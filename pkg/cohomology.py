"""
First cohomology and first local cohomology of finite matrix groups.

A 1-cocycle is determined by its values on the generators, so every space is
solved in generator coordinates z = (Z_{s_1}, ..., Z_{s_k}). The BFS spanning
tree of the Cayley graph gives, for every element g, a transfer matrix T_g with
Z_g = T_g z; each non-tree Cayley edge contributes one block of linear
equations. Full value tables are reconstructed from z only for output.
"""

from __future__ import annotations

import itertools
import logging
from collections.abc import Sequence
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from config import Config
from matgroup import (
    GroupHom,
    MatGroup,
    NotInGroupError,
    closure,
    cyclic_subgroup_generators,
    is_block_diagonal,
)
from zmod_linalg import (
    AbelianStructure,
    DimensionError,
    ModulusMismatchError,
    ResidueMatrix,
    SubmoduleBasis,
    Vector,
    check_modulus,
    check_product_width,
    extend_basis,
    howell_form,
    image,
    is_subspan,
    preimage,
    quotient_decomposition,
    reduce,
    solve_linear,
)

logger = logging.getLogger("h1loc.cohomology")


class ModuleActionError(ValueError):
    """The per-element matrices do not define a module action."""


class CocycleError(ValueError):
    """A value table violates the cocycle identity."""


# ---------------------------------------------------------------------------
# Modules
# ---------------------------------------------------------------------------


class GModule:
    """(Z/mZ)^rank with one action matrix per group element.

    The action need not be faithful: this is how a group acts on a reduction
    or a block of its natural module, or through a quotient.
    """

    def __init__(self, group: MatGroup, modulus: int, rank: int, actions: np.ndarray, name: str = ""):
        check_modulus(modulus)
        if rank < 1:
            raise DimensionError("module rank must be >= 1")
        check_product_width(modulus, rank)
        actions = np.mod(np.asarray(actions, dtype=np.int64), modulus)
        if actions.shape != (len(group), rank, rank):
            raise DimensionError(f"action array has shape {actions.shape}, expected {(len(group), rank, rank)}")
        actions.setflags(write=False)
        self.group = group
        self.modulus = modulus
        self.rank = rank
        self.actions = actions
        self.name = name
        self._validate()

    def _validate(self) -> None:
        if not np.array_equal(self.actions[self.group.identity], np.eye(self.rank, dtype=np.int64) % self.modulus):
            raise ModuleActionError("the identity does not act as the identity matrix")
        edges = np.array(self.group.cayley_edges, dtype=np.int64)
        for j, s in enumerate(self.group.generator_indices):
            expected = (self.actions @ self.actions[s]) % self.modulus
            if not np.array_equal(self.actions[edges[:, j]], expected):
                raise ModuleActionError(f"action is not multiplicative along generator {j}")

    def __repr__(self) -> str:
        label = f" {self.name!r}" if self.name else ""
        return f"GModule{label}(order={len(self.group)}, modulus={self.modulus}, rank={self.rank})"

    @property
    def size(self) -> int:
        return self.modulus**self.rank

    @classmethod
    def natural(cls, group: MatGroup) -> GModule:
        return cls(group, group.modulus, group.rank, group.arrays, name="natural")

    @classmethod
    def trivial(cls, group: MatGroup, modulus: int, rank: int) -> GModule:
        actions = np.broadcast_to(np.eye(rank, dtype=np.int64), (len(group), rank, rank))
        return cls(group, modulus, rank, actions, name="trivial")

    @classmethod
    def pullback(cls, hom: GroupHom, module: GModule) -> GModule:
        """The module of hom.target seen by hom.source."""
        if hom.target is not module.group:
            raise ValueError("pullback needs a homomorphism into the module's group")
        actions = module.actions[np.array(hom.images, dtype=np.int64)]
        return cls(hom.source, module.modulus, module.rank, actions, name=f"pullback({module.name})")

    def reduction(self, modulus: int) -> GModule:
        """The same group acting on M / m'M through reduced matrices."""
        check_modulus(modulus)
        if self.modulus % modulus:
            raise ValueError(f"{modulus} does not divide {self.modulus}")
        return GModule(self.group, modulus, self.rank, self.actions % modulus, name=f"{self.name} mod {modulus}")

    def block(self, start: int, size: int) -> GModule:
        """The invariant summand spanned by coordinates [start, start + size)."""
        if start < 0 or size < 1 or start + size > self.rank:
            raise DimensionError(f"block [{start}, {start + size}) outside rank {self.rank}")
        outside = [i for i in range(self.rank) if not start <= i < start + size]
        inside = list(range(start, start + size))
        if self.actions[:, outside][:, :, inside].any() or self.actions[:, inside][:, :, outside].any():
            raise ModuleActionError(f"coordinates [{start}, {start + size}) are not an invariant block")
        actions = self.actions[:, start : start + size, start : start + size]
        return GModule(self.group, self.modulus, size, actions, name=f"{self.name}[{start}:{start + size}]")

    def action(self, i: int) -> ResidueMatrix:
        return ResidueMatrix.from_array(self.actions[i], self.modulus)

    def act(self, i: int, v: Sequence[int]) -> Vector:
        product = (self.actions[i] @ np.array(v, dtype=np.int64)) % self.modulus
        return tuple(int(x) for x in product)

    @cached_property
    def system(self) -> CocycleSystem:
        return CocycleSystem(self)


def as_module(target: MatGroup | GModule, module_rank: int | None = None) -> GModule:
    """Accept a group (natural action) or an explicit module."""
    if module_rank is not None and module_rank < 1:
        raise DimensionError("module rank must be >= 1")
    if isinstance(target, GModule):
        module = target
    elif isinstance(target, MatGroup):
        module = GModule.natural(target)
    else:
        raise TypeError(f"expected a MatGroup or GModule, got {type(target).__name__}")
    if module_rank is not None and module_rank != module.rank:
        raise DimensionError(f"module rank {module_rank} does not match the action rank {module.rank}")
    return module


# ---------------------------------------------------------------------------
# Cocycles
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Cocycle:
    """A full value table Z_g, indexed by the group's enumeration order."""

    module: GModule
    values: tuple[Vector, ...]

    def __post_init__(self):
        m, r = self.module.modulus, self.module.rank
        if len(self.values) != len(self.module.group):
            raise CocycleError(f"{len(self.values)} values for a group of order {len(self.module.group)}")
        normalized = []
        for idx, value in enumerate(self.values):
            if len(value) != r:
                raise CocycleError(f"value {idx} has length {len(value)}, expected {r}")
            normalized.append(tuple(int(x) % m for x in value))
        object.__setattr__(self, "values", tuple(normalized))
        self._validate()

    def _validate(self) -> None:
        group, m = self.module.group, self.module.modulus
        table = self.table
        if table[group.identity].any():
            raise CocycleError("Z does not vanish at the identity")
        edges = np.array(group.cayley_edges, dtype=np.int64)
        for j, s in enumerate(group.generator_indices):
            expected = (table + self.module.actions @ table[s]) % m
            broken = np.nonzero((table[edges[:, j]] != expected).any(axis=1))[0]
            if broken.size:
                i = int(broken[0])
                raise CocycleError(f"cocycle identity fails at element {i} times generator {j}")

    @cached_property
    def table(self) -> np.ndarray:
        return np.array(self.values, dtype=np.int64).reshape(len(self.values), self.module.rank)

    @property
    def group(self) -> MatGroup:
        return self.module.group

    def __getitem__(self, i: int) -> Vector:
        return self.values[i]

    def __add__(self, other: Cocycle) -> Cocycle:
        if not _same_module(self.module, other.module):
            raise ModulusMismatchError("cocycles live on different modules")
        return Cocycle(self.module, _rows((self.table + other.table) % self.module.modulus))

    def scaled(self, factor: int) -> Cocycle:
        """factor * Z, entrywise mod m."""
        return Cocycle(self.module, _rows((self.table * factor) % self.module.modulus))

    def flatten(self) -> Vector:
        return tuple(x for value in self.values for x in value)

    def generator_values(self) -> list[Vector]:
        """Values on the group's generators, in generator order."""
        return [self.values[s] for s in self.group.generator_indices]

    @classmethod
    def from_values(cls, target: MatGroup | GModule, values: Sequence[Sequence[int]]) -> Cocycle:
        return cls(as_module(target), tuple(tuple(v) for v in values))

    @classmethod
    def zero(cls, target: MatGroup | GModule) -> Cocycle:
        module = as_module(target)
        return cls(module, ((0,) * module.rank,) * len(module.group))

    @classmethod
    def coboundary(cls, target: MatGroup | GModule, v: Sequence[int]) -> Cocycle:
        """Z_g = g.v - v."""
        module = as_module(target)
        base = np.array(v, dtype=np.int64)
        return cls(module, _rows((module.actions @ base - base) % module.modulus))


def _rows(array: np.ndarray) -> tuple[Vector, ...]:
    return tuple(tuple(int(x) for x in row) for row in array)


def _same_module(a: GModule, b: GModule) -> bool:
    return a is b or (
        a.group is b.group and (a.modulus, a.rank) == (b.modulus, b.rank) and np.array_equal(a.actions, b.actions)
    )


# ---------------------------------------------------------------------------
# Generator-coordinate systems
# ---------------------------------------------------------------------------


class CocycleSystem:
    """Z1, B1 and Z1_loc of one module, in generator coordinates."""

    def __init__(self, module: GModule):
        self.module = module
        self.group = module.group
        self.modulus = module.modulus
        self.rank = module.rank
        self.width = len(self.group.generators) * self.rank
        check_product_width(self.modulus, self.width)

    @cached_property
    def transfer(self) -> np.ndarray:
        """T with Z_g = T[g] @ z for every cocycle."""
        r, m = self.rank, self.modulus
        tables = np.zeros((len(self.group), r, self.width), dtype=np.int64)
        for h in range(1, len(self.group)):
            parent, j = self.group.parents[h]  # type: ignore[misc]
            tables[h] = tables[parent]
            tables[h, :, j * r : (j + 1) * r] += self.module.actions[parent]
            tables[h] %= m
        return tables

    def _edge_equations(self) -> np.ndarray:
        r, m = self.rank, self.modulus
        transfer = self.transfer
        edges = np.array(self.group.cayley_edges, dtype=np.int64)
        blocks = []
        for j in range(len(self.group.generators)):
            targets = edges[:, j]
            equations = transfer[targets] - transfer
            equations[:, :, j * r : (j + 1) * r] -= self.module.actions
            equations %= m
            tree = np.array([self.group.parents[h] == (i, j) for i, h in enumerate(targets.tolist())], dtype=bool)
            blocks.append(equations[~tree].reshape(-1, self.width))
        stacked = np.concatenate(blocks) if blocks else np.zeros((0, self.width), dtype=np.int64)
        stacked = stacked[stacked.any(axis=1)]
        return np.unique(stacked, axis=0) if len(stacked) else stacked

    @cached_property
    def cocycles(self) -> SubmoduleBasis:
        equations = self._edge_equations()
        relations = extend_basis(SubmoduleBasis.zero(self.modulus, self.width), equations.tolist())
        system = ResidueMatrix.from_rows(relations.rows, self.modulus, cols=self.width)
        space = solve_linear(system, (0,) * system.rows).kernel
        logger.debug("Z1: %d edge equations -> order %d", len(equations), space.order)
        return space

    @cached_property
    def coboundaries(self) -> SubmoduleBasis:
        r, m = self.rank, self.modulus
        identity = np.eye(r, dtype=np.int64)
        rows = []
        for t in range(r):
            row: list[int] = []
            for s in self.group.generator_indices:
                row.extend(int(x) for x in (self.module.actions[s][:, t] - identity[:, t]) % m)
            rows.append(row)
        return howell_form(rows, m, self.width)

    @cached_property
    def local_cocycles(self) -> SubmoduleBasis:
        """Cocycles whose value at every cyclic subgroup generator g lies in (g - 1)M."""
        r, m = self.rank, self.modulus
        identity = np.eye(r, dtype=np.int64)
        current = self.cocycles
        for g in cyclic_subgroup_generators(self.group):
            if g == self.group.identity:
                continue
            moved = image(ResidueMatrix.from_array(self.module.actions[g] - identity, m))
            if moved.order == m**r:
                continue
            current = preimage(current, ResidueMatrix.from_array(self.transfer[g], m), moved)
        logger.debug("Z1_loc: order %d inside Z1 of order %d", current.order, self.cocycles.order)
        return current

    def expand(self, z: Sequence[int]) -> tuple[Vector, ...]:
        return _rows((self.transfer @ np.array(z, dtype=np.int64)) % self.modulus)

    def coordinates(self, cocycle: Cocycle) -> Vector:
        return tuple(x for value in cocycle.generator_values() for x in value)

    def full_tables(self, space: SubmoduleBasis) -> SubmoduleBasis:
        """Expand generator-coordinate cocycles into full value tables."""
        rows = [[x for value in self.expand(z) for x in value] for z in space.rows]
        return howell_form(rows, self.modulus, len(self.group) * self.rank)


@dataclass(frozen=True)
class CohomologyResult:
    """Invariant factors plus one representative cocycle per factor."""

    structure: AbelianStructure
    representatives: tuple[Cocycle, ...]
    cocycle_order: int
    coboundary_order: int

    @property
    def order(self) -> int:
        return self.structure.order

    @property
    def is_trivial(self) -> bool:
        return self.structure.is_trivial


def _quotient(system: CocycleSystem, space: SubmoduleBasis) -> CohomologyResult:
    coboundaries = system.coboundaries
    if not is_subspan(coboundaries, space):
        raise RuntimeError("coboundaries are not contained in the cocycle space")
    structure, generators = quotient_decomposition(space, coboundaries)
    representatives = tuple(Cocycle(system.module, system.expand(reduce(coboundaries, g))) for g in generators)
    return CohomologyResult(structure, representatives, space.order, coboundaries.order)


def cocycle_space(target: MatGroup | GModule, module_rank: int | None = None) -> SubmoduleBasis:
    """Z1 as full value tables in (Z/mZ)^(|G| * r)."""
    system = as_module(target, module_rank).system
    return system.full_tables(system.cocycles)


def coboundary_space(target: MatGroup | GModule, module_rank: int | None = None) -> SubmoduleBasis:
    """B1 as full value tables: the span of (g.v - v)_g."""
    module = as_module(target, module_rank)
    rows = []
    for t in range(module.rank):
        base = np.zeros(module.rank, dtype=np.int64)
        base[t] = 1
        rows.append([int(x) for x in ((module.actions @ base - base) % module.modulus).ravel()])
    return howell_form(rows, module.modulus, len(module.group) * module.rank)


def h1(target: MatGroup | GModule, module_rank: int | None = None) -> CohomologyResult:
    """H1(G, M) as Z1 / B1 with one representative per invariant factor."""
    system = as_module(target, module_rank).system
    return _quotient(system, system.cocycles)


def h1_loc(target: MatGroup | GModule, module_rank: int | None = None) -> CohomologyResult:
    """H1_loc(G, M): classes that vanish on every cyclic subgroup."""
    system = as_module(target, module_rank).system
    return _quotient(system, system.local_cocycles)


# ---------------------------------------------------------------------------
# Verdicts on single cocycles
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class LocalConditionCheck:
    """Per-element witnesses m_g with Z_g = g.m_g - m_g."""

    holds: bool
    witnesses: dict[int, Vector]
    failures: tuple[int, ...] = ()

    def __bool__(self) -> bool:
        return self.holds


def satisfies_local_conditions(cocycle: Cocycle) -> LocalConditionCheck:
    """Solve (g - 1) m = Z_g for every element g, recording witnesses and failures."""
    module = cocycle.module
    identity = ResidueMatrix.identity(module.rank, module.modulus)
    witnesses: dict[int, Vector] = {}
    failures = []
    for i in range(len(module.group)):
        solution = solve_linear(module.action(i) - identity, cocycle[i]).solution
        if solution is None:
            failures.append(i)
        else:
            witnesses[i] = solution
    return LocalConditionCheck(not failures, witnesses, tuple(failures))


def is_coboundary(cocycle: Cocycle) -> Vector | None:
    """A vector v with Z_g = g.v - v for all g, or None."""
    module = cocycle.module
    identity = np.eye(module.rank, dtype=np.int64)
    generators = cocycle.group.generator_indices
    stacked = np.concatenate([module.actions[s] - identity for s in generators])
    rhs = [x for s in generators for x in cocycle[s]]
    return solve_linear(ResidueMatrix.from_array(stacked, module.modulus), rhs).solution


def restrict(cocycle: Cocycle, subgroup: MatGroup | GroupHom) -> Cocycle:
    """Restriction to a subgroup, given as a group of matrices or an inclusion map."""
    if isinstance(subgroup, GroupHom):
        if subgroup.target is not cocycle.group:
            raise NotInGroupError("the inclusion does not land in the cocycle's group")
        inclusion = subgroup
    else:
        try:
            indices = tuple(cocycle.group.index_of(h) for h in subgroup.elements)
        except NotInGroupError:
            raise NotInGroupError("the subgroup is not contained in the group") from None
        inclusion = GroupHom(subgroup, cocycle.group, indices)
    module = GModule.pullback(inclusion, cocycle.module)
    return Cocycle(module, tuple(cocycle[i] for i in inclusion.images))


def class_is_trivial_on(cocycle: Cocycle, subgroup: MatGroup | GroupHom) -> bool:
    """Whether the restriction of *cocycle* to *subgroup* is a coboundary."""
    return is_coboundary(restrict(cocycle, subgroup)) is not None


def inflate(cocycle: Cocycle, projection: GroupHom, module: GModule | None = None) -> Cocycle:
    """Z_g = Z'_{proj(g)} on the source group.

    *module* defaults to the pullback of the quotient's module; an explicit
    module must act through the projection, so in particular its kernel must
    act trivially.
    """
    if projection.target is not cocycle.group:
        raise ValueError("the projection does not land in the cocycle's group")
    if not projection.is_surjective():
        raise ValueError("inflation needs a surjective projection")
    pulled = GModule.pullback(projection, cocycle.module)
    if module is None:
        module = pulled
    else:
        if module.group is not projection.source:
            raise ValueError("the module is not a module over the projection's source")
        if (module.modulus, module.rank) != (pulled.modulus, pulled.rank):
            raise ModulusMismatchError("the module does not match the quotient's module")
        identity = np.eye(module.rank, dtype=np.int64)
        for g in projection.kernel():
            if not np.array_equal(module.actions[g], identity):
                raise ModuleActionError(f"kernel element {g} does not act trivially")
        if not np.array_equal(module.actions, pulled.actions):
            raise ModuleActionError("the action does not factor through the projection")
    return Cocycle(module, tuple(cocycle[projection(i)] for i in range(len(projection.source))))


def cocycle_from_generators(target: MatGroup | GModule, values: Sequence[Sequence[int]]) -> Cocycle:
    """Extend generator values along the BFS tree and validate the result."""
    module = as_module(target)
    if len(values) != len(module.group.generators):
        raise CocycleError(f"{len(values)} generator values for {len(module.group.generators)} generators")
    z = []
    for idx, value in enumerate(values):
        if len(value) != module.rank:
            raise CocycleError(f"generator value {idx} has length {len(value)}, expected {module.rank}")
        z.extend(int(x) % module.modulus for x in value)
    return Cocycle(module, module.system.expand(z))


def restriction_injective(target: MatGroup | GModule, subgroup: MatGroup) -> bool:
    """Whether H1(G, M) -> H1(H, M) is injective, by walking every class."""
    module = as_module(target)
    result = h1(module)
    if result.order > Config.CLASS_ENUMERATION_CAP:
        raise ValueError(f"H1 has {result.order} classes, above the enumeration cap")
    zero = Cocycle.zero(module)
    for coefficients in itertools.product(*(range(d) for d in result.structure.invariant_factors)):
        combined = zero
        for c, representative in zip(coefficients, result.representatives):
            if c:
                combined = combined + representative.scaled(c)
        if any(coefficients) and class_is_trivial_on(combined, subgroup):
            return False
    return True


# ---------------------------------------------------------------------------
# Direct sums
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class BlockCohomology:
    start: int
    size: int
    group: MatGroup
    result: CohomologyResult


@dataclass(frozen=True)
class DirectSumSplit:
    total: CohomologyResult
    blocks: tuple[BlockCohomology, ...]

    @property
    def block_factors(self) -> tuple[int, ...]:
        return tuple(sorted(d for b in self.blocks for d in b.result.structure.invariant_factors))

    @property
    def block_elementary_divisors(self) -> tuple[int, ...]:
        return tuple(sorted(d for b in self.blocks for d in b.result.structure.elementary_divisors()))

    @property
    def matches(self) -> bool:
        return self.total.structure.elementary_divisors() == self.block_elementary_divisors


def split_direct_sum(target: MatGroup | GModule, block_sizes: Sequence[int]) -> DirectSumSplit:
    """H1_loc of a block-diagonal action against H1_loc of each block image."""
    module = as_module(target)
    if sum(block_sizes) != module.rank or any(size < 1 for size in block_sizes):
        raise DimensionError(f"block sizes {list(block_sizes)} do not partition rank {module.rank}")
    for i in range(len(module.group)):
        if not is_block_diagonal(module.action(i), block_sizes):
            raise ValueError(f"element {i} is not block-diagonal with blocks {list(block_sizes)}")

    total = h1_loc(module)
    blocks = []
    start = 0
    for size in block_sizes:
        piece = module.block(start, size)
        block_group = closure([piece.action(s) for s in module.group.generator_indices])
        blocks.append(BlockCohomology(start, size, block_group, h1_loc(block_group)))
        start += size
    split = DirectSumSplit(total, tuple(blocks))
    logger.debug("direct sum %s: total %s, blocks %s", list(block_sizes), total.structure, split.block_factors)
    return split
