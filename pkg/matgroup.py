"""
Finite groups of invertible matrices over Z/mZ.

Groups are closed breadth-first from the identity, multiplying on the right by
the generators in order. The enumeration order is therefore deterministic and
every element other than the identity has a BFS parent, which the cohomology
layer uses as a spanning tree of the Cayley graph.
"""

from __future__ import annotations

import logging
import math
from collections import deque
from collections.abc import Iterable, Sequence
from dataclasses import dataclass
from functools import cached_property

import numpy as np
from sympy import factorint, isprime

from config import Config
from zmod_linalg import (
    DimensionError,
    ModulusError,
    ModulusMismatchError,
    ResidueMatrix,
    SubmoduleBasis,
    check_modulus,
    intersect,
    solve_linear,
)

logger = logging.getLogger("h1loc.groups")


class NotInvertibleError(ValueError):
    """A generator has a non-unit determinant."""


class EnumerationCapError(ValueError):
    """Closure would exceed the configured element cap."""


class NotInGroupError(ValueError):
    """An element or subgroup is not contained in the group."""


class MatGroup:
    """A finite matrix group with its full element list and Cayley edges."""

    def __init__(
        self,
        modulus: int,
        rank: int,
        generators: tuple[ResidueMatrix, ...],
        elements: tuple[ResidueMatrix, ...],
        cayley_edges: tuple[tuple[int, ...], ...],
        parents: tuple[tuple[int, int] | None, ...],
    ):
        self.modulus = modulus
        self.rank = rank
        self.generators = generators
        self.elements = elements
        self.cayley_edges = cayley_edges
        self.parents = parents
        self._index = {g.key: i for i, g in enumerate(elements)}

    def __len__(self) -> int:
        return len(self.elements)

    def __repr__(self) -> str:
        return f"MatGroup(order={len(self)}, modulus={self.modulus}, rank={self.rank}, generators={len(self.generators)})"

    @property
    def order(self) -> int:
        return len(self.elements)

    @property
    def identity(self) -> int:
        return 0

    @cached_property
    def arrays(self) -> np.ndarray:
        """All elements stacked as an (order, rank, rank) int64 array."""
        return np.stack([g.array for g in self.elements])

    @cached_property
    def generator_indices(self) -> tuple[int, ...]:
        return tuple(self._index[s.key] for s in self.generators)

    @cached_property
    def key_set(self) -> frozenset[tuple[int, ...]]:
        return frozenset(self._index)

    def index_of(self, element: ResidueMatrix | tuple[int, ...]) -> int:
        key = element.key if isinstance(element, ResidueMatrix) else tuple(element)
        try:
            return self._index[key]
        except KeyError:
            raise NotInGroupError(f"matrix {list(key)} is not an element of the group") from None

    def contains(self, element: ResidueMatrix) -> bool:
        return element.key in self._index

    def multiply(self, i: int, j: int) -> int:
        return self.index_of(self.elements[i] @ self.elements[j])

    def inverse(self, i: int) -> int:
        return self.index_of(self.elements[i].inverse())

    def power(self, i: int, exponent: int) -> int:
        result = self.identity
        for _ in range(exponent):
            result = self.multiply(result, i)
        return result

    def same_elements(self, other: MatGroup) -> bool:
        return self.modulus == other.modulus and self.rank == other.rank and self.key_set == other.key_set

    def _resolve(self, element: int | ResidueMatrix) -> int:
        if isinstance(element, ResidueMatrix):
            return self.index_of(element)
        if not 0 <= element < len(self):
            raise NotInGroupError(f"element index {element} out of range for a group of order {len(self)}")
        return element


def closure(generators: Sequence[ResidueMatrix], cap: int | None = None) -> MatGroup:
    """Enumerate the group generated by *generators* breadth-first from the identity."""
    if not generators:
        raise ValueError("closure needs at least one generator")
    cap = Config.ENUMERATION_CAP if cap is None else cap
    modulus, rank = generators[0].modulus, generators[0].rows
    for idx, s in enumerate(generators):
        if s.modulus != modulus:
            raise ModulusMismatchError(f"generator {idx} has modulus {s.modulus}, expected {modulus}")
        if s.rows != rank or s.cols != rank:
            raise DimensionError(f"generator {idx} is {s.rows}x{s.cols}, expected {rank}x{rank}")
        if not s.is_invertible():
            raise NotInvertibleError(f"generator {idx} not invertible mod {modulus}")

    identity = ResidueMatrix.identity(rank, modulus)
    gen_arrays = [s.array for s in generators]
    elements: list[ResidueMatrix] = [identity]
    index = {identity.key: 0}
    parents: list[tuple[int, int] | None] = [None]
    edges: list[list[int]] = []
    queue = deque([0])
    while queue:
        i = queue.popleft()
        row = []
        current = elements[i].array
        for j, s in enumerate(gen_arrays):
            product = (current @ s) % modulus
            key = tuple(int(x) for x in product.ravel())
            target = index.get(key)
            if target is None:
                if len(elements) >= cap:
                    raise EnumerationCapError(f"closure exceeds the enumeration cap of {cap} elements")
                target = len(elements)
                index[key] = target
                elements.append(ResidueMatrix(modulus, rank, rank, key))
                parents.append((i, j))
                queue.append(target)
            row.append(target)
        edges.append(row)

    logger.debug("closure: order %d from %d generators mod %d", len(elements), len(generators), modulus)
    return MatGroup(modulus, rank, tuple(generators), tuple(elements), tuple(map(tuple, edges)), tuple(parents))


def trivial_group(modulus: int, rank: int) -> MatGroup:
    """The group {I} of the given size over Z/m."""
    return closure([ResidueMatrix.identity(rank, check_modulus(modulus))])


def element_order(group: MatGroup, element: int | ResidueMatrix) -> int:
    """Least k >= 1 with g^k = 1."""
    g = group.elements[group._resolve(element)]
    identity = ResidueMatrix.identity(group.rank, group.modulus)
    power, k = g, 1
    while power != identity:
        power = power @ g
        k += 1
    return k


def cyclic_subgroup(group: MatGroup, element: int | ResidueMatrix) -> tuple[int, ...]:
    """Element indices of <g> listed as g^0, g^1, ..."""
    i = group._resolve(element)
    g = group.elements[i]
    powers = [group.identity]
    current = g
    while current.key != group.elements[group.identity].key:
        powers.append(group.index_of(current))
        current = current @ g
    return tuple(powers)


def cyclic_subgroup_generators(group: MatGroup) -> list[int]:
    """One generator for every distinct cyclic subgroup, in enumeration order."""
    seen: set[frozenset[int]] = set()
    covered: set[int] = set()
    chosen: list[int] = []
    for i in range(len(group)):
        if i in covered:
            continue
        powers = cyclic_subgroup(group, i)
        members = frozenset(powers)
        n = len(powers)
        # g^k generates the same subgroup whenever gcd(k, n) == 1
        covered.update(powers[k] for k in range(1, n) if math.gcd(k, n) == 1)
        if members in seen:
            continue
        seen.add(members)
        chosen.append(i)
    return chosen


def subgroup(group: MatGroup, element_indices: Iterable[int], cap: int | None = None) -> tuple[MatGroup, GroupHom]:
    """Subgroup generated by the given elements, with its inclusion into *group*."""
    generators: list[ResidueMatrix] = []
    spanned: frozenset[tuple[int, ...]] = frozenset({group.elements[group.identity].key})
    for i in element_indices:
        g = group.elements[group._resolve(i)]
        if g.key in spanned:
            continue
        generators.append(g)
        spanned = closure(generators, cap).key_set
    sub = closure(generators or [group.elements[group.identity]], cap)
    inclusion = GroupHom(sub, group, tuple(group.index_of(h) for h in sub.elements))
    return sub, inclusion


def unique_p_sylow(group: MatGroup, p: int) -> MatGroup | None:
    """The p-elements as a group when they form a subgroup of full Sylow order."""
    if not isprime(p):
        raise ValueError(f"{p} is not prime")
    sylow_order = p ** factorint(len(group)).get(p, 0)
    p_elements = [i for i in range(len(group)) if set(factorint(element_order(group, i))) <= {p}]
    if len(p_elements) != sylow_order:
        return None
    sub, _ = subgroup(group, p_elements)
    if len(sub) != sylow_order:
        return None
    return sub


def fixes_vector(group: MatGroup, v: Sequence[int]) -> bool:
    """Whether every generator fixes *v*."""
    if len(v) != group.rank:
        raise DimensionError(f"vector of length {len(v)} does not match rank {group.rank}")
    reduced = tuple(int(x) % group.modulus for x in v)
    return all(s.apply(reduced) == reduced for s in group.generators)


def fixed_submodule(group: MatGroup) -> SubmoduleBasis:
    """Intersection over generators of ker(g - 1)."""
    identity = ResidueMatrix.identity(group.rank, group.modulus)
    fixed = SubmoduleBasis.full(group.modulus, group.rank)
    for s in group.generators:
        kernel = solve_linear(s - identity, (0,) * group.rank).kernel
        fixed = intersect(fixed, kernel)
    return fixed


def conjugate(group: MatGroup, transform: ResidueMatrix) -> MatGroup:
    """T G T^-1."""
    inverse = transform.inverse()
    return closure([transform @ s @ inverse for s in group.generators])


@dataclass(frozen=True)
class GroupHom:
    """Element-index map between two enumerated groups."""

    source: MatGroup
    target: MatGroup
    images: tuple[int, ...]

    def __post_init__(self):
        if len(self.images) != len(self.source):
            raise ValueError(f"{len(self.images)} images for a source of order {len(self.source)}")

    def __call__(self, i: int) -> int:
        return self.images[i]

    def is_homomorphism(self) -> bool:
        """Check that the image map respects multiplication on every pair."""
        if self.images[self.source.identity] != self.target.identity:
            return False
        gen_images = [self.images[i] for i in self.source.generator_indices]
        for i, row in enumerate(self.source.cayley_edges):
            for j, product in enumerate(row):
                if self.images[product] != self.target.multiply(self.images[i], gen_images[j]):
                    return False
        return True

    def is_surjective(self) -> bool:
        return len(set(self.images)) == len(self.target)

    def kernel(self) -> tuple[int, ...]:
        """Indices of the elements mapped to the identity."""
        return tuple(i for i, image in enumerate(self.images) if image == self.target.identity)

    def compose(self, then: GroupHom) -> GroupHom:
        """self followed by *then*."""
        if then.source is not self.target:
            raise ValueError("composition needs matching intermediate groups")
        return GroupHom(self.source, then.target, tuple(then.images[i] for i in self.images))

    def retarget(self, target: MatGroup) -> GroupHom:
        """Same map read into another enumeration of the same element set."""
        if not self.target.same_elements(target):
            raise NotInGroupError("retarget needs a group with the same elements")
        return GroupHom(self.source, target, tuple(target.index_of(self.target.elements[i]) for i in self.images))


def identity_hom(group: MatGroup) -> GroupHom:
    return GroupHom(group, group, tuple(range(len(group))))


def reduce_modulus(group: MatGroup, modulus: int) -> tuple[MatGroup, GroupHom]:
    """Entrywise reduction to Z/m'Z with the induced surjection."""
    check_modulus(modulus)
    if group.modulus % modulus:
        raise ModulusError(f"{modulus} does not divide {group.modulus}")
    if modulus == group.modulus:
        return group, identity_hom(group)
    image = closure([s.reduce_modulus(modulus) for s in group.generators])
    hom = GroupHom(group, image, tuple(image.index_of(g.reduce_modulus(modulus)) for g in group.elements))
    return image, hom


def is_block_diagonal(matrix: ResidueMatrix, block_sizes: Sequence[int]) -> bool:
    """Whether the matrix vanishes outside the diagonal blocks."""
    start = 0
    for size in block_sizes:
        for i in range(start, start + size):
            row = matrix.row(i)
            if any(row[j] for j in range(matrix.cols) if not start <= j < start + size):
                return False
        start += size
    return True


def project_block(group: MatGroup, start: int, size: int) -> tuple[MatGroup, GroupHom]:
    """Image of the diagonal block [start, start + size) with the projection map."""
    if start < 0 or size < 1 or start + size > group.rank:
        raise DimensionError(f"block [{start}, {start + size}) outside rank {group.rank}")
    for idx, g in enumerate(group.elements):
        if any(g.row(i)[j] for i in range(start, start + size) for j in range(group.rank) if not start <= j < start + size):
            raise ValueError(f"element {idx} is not block-diagonal at block [{start}, {start + size})")
        if any(g.row(i)[j] for i in range(group.rank) if not start <= i < start + size for j in range(start, start + size)):
            raise ValueError(f"element {idx} is not block-diagonal at block [{start}, {start + size})")
    image = closure([s.submatrix(start, start, size, size) for s in group.generators])
    hom = GroupHom(group, image, tuple(image.index_of(g.submatrix(start, start, size, size)) for g in group.elements))
    return image, hom


def diagonal_matrix(entries: Sequence[int], modulus: int) -> ResidueMatrix:
    """diag(entries) over Z/m."""
    n = len(entries)
    return ResidueMatrix.from_rows([[entries[i] if i == j else 0 for j in range(n)] for i in range(n)], modulus)


def block_diagonal(blocks: Sequence[ResidueMatrix]) -> ResidueMatrix:
    """Direct sum of square blocks."""
    modulus = blocks[0].modulus
    size = sum(b.rows for b in blocks)
    rows: list[list[int]] = []
    offset = 0
    for b in blocks:
        if b.modulus != modulus:
            raise ModulusMismatchError("blocks use different moduli")
        for i in range(b.rows):
            row = [0] * size
            row[offset : offset + b.cols] = b.row(i)
            rows.append(row)
        offset += b.cols
    return ResidueMatrix.from_rows(rows, modulus, cols=size)
