"""
Concrete groups, modules and cocycles behind the verify-paper scenarios.

Everything here is built from explicit matrices and handed to the generic
layers in matgroup and cohomology; nothing in this module computes cohomology
by itself.
"""

from __future__ import annotations

import logging
from collections.abc import Iterator, Sequence
from dataclasses import dataclass

import numpy as np
from sympy import isprime

from cohomology import (
    Cocycle,
    GModule,
    inflate,
    is_coboundary,
    satisfies_local_conditions,
)
from config import Config
from matgroup import (
    EnumerationCapError,
    GroupHom,
    MatGroup,
    block_diagonal,
    closure,
    project_block,
    reduce_modulus,
)
from zmod_linalg import ResidueMatrix, Vector, enumerate_span, solve_linear

logger = logging.getLogger("h1loc.scenarios")


class ScenarioError(ValueError):
    """Parameters or input groups outside what a construction accepts."""


def _require_prime(p: int, *, odd: bool = False) -> None:
    if not isinstance(p, int) or not isprime(p):
        raise ScenarioError(f"p={p} is not prime")
    if odd and p == 2:
        raise ScenarioError("p must be odd")


def _valuation(x: int, p: int, cap: int) -> int:
    """p-adic valuation of x, capped at *cap* (x = 0 gives cap)."""
    x %= p**cap
    if x == 0:
        return cap
    k = 0
    while x % p == 0:
        x //= p
        k += 1
    return k


def _prime_power_exponent(modulus: int, p: int) -> int:
    n, rest = 0, modulus
    while rest % p == 0:
        rest //= p
        n += 1
    if rest != 1 or n == 0:
        raise ScenarioError(f"modulus {modulus} is not a power of {p}")
    return n


# ---------------------------------------------------------------------------
# Stabilizers of a vector of order p^n
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class StabilizerParams:
    """delta = [[1, b], [0, 1 + p^i]] and sigma = [[1, p^e], [0, 1]] over Z/p^n."""

    p: int
    n: int
    i: int
    e: int
    b: int = 0

    def __post_init__(self):
        _require_prime(self.p, odd=True)
        if self.n < 1:
            raise ScenarioError(f"n={self.n} must be >= 1")
        if not 1 <= self.i <= self.n:
            raise ScenarioError(f"i={self.i} must lie in [1, {self.n}]")
        if not 0 <= self.e <= self.n:
            raise ScenarioError(f"e={self.e} must lie in [0, {self.n}]")
        object.__setattr__(self, "b", self.b % self.modulus)

    @property
    def modulus(self) -> int:
        return self.p**self.n

    @property
    def delta(self) -> ResidueMatrix:
        return ResidueMatrix.from_rows([[1, self.b], [0, 1 + self.p**self.i]], self.modulus)

    @property
    def sigma(self) -> ResidueMatrix:
        return ResidueMatrix.from_rows([[1, self.p**self.e], [0, 1]], self.modulus)


def stabilizer_family_group(params: StabilizerParams) -> MatGroup:
    """Closure of delta and sigma."""
    return closure([params.delta, params.sigma])


def stabilizer_parameter_grid(p: int, n: int) -> Iterator[StabilizerParams]:
    """Every admissible (i, e) with b in {0, 1, p^e, p^e + 1}, without repeats."""
    modulus = p**n
    for i in range(1, n + 1):
        for e in range(n + 1):
            seen: set[int] = set()
            for b in (0, 1, p**e, p**e + 1):
                b %= modulus
                if b in seen:
                    continue
                seen.add(b)
                yield StabilizerParams(p, n, i, e, b)


@dataclass(frozen=True)
class NormalForm:
    p: int
    n: int
    i: int
    e: int
    b: int
    delta: ResidueMatrix
    sigma: ResidueMatrix
    degenerate: bool

    @property
    def params(self) -> StabilizerParams:
        return StabilizerParams(self.p, self.n, self.i, self.e, self.b)

    @property
    def generators(self) -> list[ResidueMatrix]:
        identity = ResidueMatrix.identity(2, self.delta.modulus)
        return [g for g in (self.delta, self.sigma) if g != identity]


def lemma32_normal_form(group: MatGroup, p: int) -> NormalForm:
    """Two generators delta, sigma for a p-group of matrices [[1, f], [0, 1 + s p^k]].

    i is the least level k over the non-unipotent elements and p^e generates
    the top-right entries of the unipotent ones. A group with only one
    non-identity generator comes back flagged as degenerate.
    """
    _require_prime(p, odd=True)
    if group.rank != 2:
        raise ScenarioError(f"expected a rank-2 group, got rank {group.rank}")
    n = _prime_power_exponent(group.modulus, p)
    modulus = group.modulus

    i, gamma = n, None
    e = n
    for idx, g in enumerate(group.elements):
        if g[0, 0] != 1 or g[1, 0] != 0 or (g[1, 1] - 1) % p:
            raise ScenarioError(f"element {idx} is not of the form [[1, f], [0, 1 + s p^k]]")
        if g[1, 1] == 1:
            e = min(e, _valuation(g[0, 1], p, n))
            continue
        level = _valuation(g[1, 1] - 1, p, n)
        if level < i:
            i, gamma = level, g

    sigma = ResidueMatrix.from_rows([[1, p**e], [0, 1]], modulus)
    if gamma is None:
        delta, b = ResidueMatrix.identity(2, modulus), 0
    else:
        # some power of gamma has lower-right entry exactly 1 + p^i
        target = (1 + p**i) % modulus
        delta = gamma
        while delta[1, 1] != target:
            delta = delta @ gamma
            if delta == gamma:
                raise ScenarioError(f"no power of {gamma} reaches level 1 + {p}^{i}")
        b = delta[0, 1]
        if b % p**e == 0:
            b = 0
            delta = ResidueMatrix.from_rows([[1, 0], [0, target]], modulus)

    identity = ResidueMatrix.identity(2, modulus)
    form = NormalForm(p, n, i, e, b, delta, sigma, degenerate=delta == identity or sigma == identity)
    if not closure([delta, sigma]).same_elements(group):
        raise RuntimeError(f"delta and sigma do not regenerate the group (i={i}, e={e}, b={b})")
    logger.debug("normal form over Z/%d: i=%d e=%d b=%d degenerate=%s", modulus, i, e, b, form.degenerate)
    return form


# ---------------------------------------------------------------------------
# (Z/8)* on Z/8 and its mod-16 lift
# ---------------------------------------------------------------------------

DZ_COCYCLE_VALUES: tuple[int, ...] = (0, 4, 4, 0)


@dataclass(frozen=True)
class DZBundle:
    g8: MatGroup
    cocycle: Cocycle
    g16: MatGroup
    reduction: GroupHom
    projection: GroupHom
    lifted_module: GModule


def dz_counterexample() -> DZBundle:
    """G8 = (Z/8)* on Z/8 with Z = (0, 4, 4, 0) on [1, 3, 5, 7], and G16 over Z/16.

    G16 is generated by [[3, 8], [0, 1]] and diag(15, 1); reducing mod 8 and
    keeping the top-left entry maps it onto G8. ``lifted_module`` is G16
    acting on Z/8 through that map.
    """
    g8 = closure([ResidueMatrix.from_rows([[3]], 8), ResidueMatrix.from_rows([[5]], 8)])
    cocycle = Cocycle.from_values(g8, [(v,) for v in DZ_COCYCLE_VALUES])

    g16 = closure(
        [
            ResidueMatrix.from_rows([[3, 8], [0, 1]], 16),
            ResidueMatrix.from_rows([[15, 0], [0, 1]], 16),
        ]
    )
    reduced, reduction = reduce_modulus(g16, 8)
    corner, to_corner = project_block(reduced, 0, 1)
    projection = reduction.compose(to_corner).retarget(g8)
    if not (projection.is_homomorphism() and projection.is_surjective()):
        raise RuntimeError("G16 does not map onto G8")

    lifted = GModule.natural(g16).reduction(8).block(0, 1)
    logger.debug("dz bundle: |G8|=%d |G16|=%d |corner|=%d", len(g8), len(g16), len(corner))
    return DZBundle(g8, cocycle, g16, reduction, projection, lifted)


@dataclass(frozen=True)
class DescentCheck:
    """g.(0, 1) - (0, 1) against (2 Z_proj(g), 0) over Z/16."""

    holds: bool
    kernel: tuple[int, ...]
    kernel_fixes_base: bool
    mismatches: tuple[int, ...] = ()


def dz_descent_check(bundle: DZBundle) -> DescentCheck:
    """Check that g(0, 1) - (0, 1) = (2 Z_{proj g}, 0) for every lifted element g."""
    base = (0, 1)
    mismatches = []
    for idx, g in enumerate(bundle.g16.elements):
        moved = g.apply(base)
        delta = ((moved[0] - base[0]) % 16, (moved[1] - base[1]) % 16)
        expected = ((2 * bundle.cocycle[bundle.projection(idx)][0]) % 16, 0)
        if delta != expected:
            mismatches.append(idx)
    kernel = bundle.reduction.kernel()
    kernel_fixes = all(bundle.g16.elements[k].apply(base) == base for k in kernel)
    return DescentCheck(not mismatches and kernel_fixes, kernel, kernel_fixes, tuple(mismatches))


# ---------------------------------------------------------------------------
# Restriction of scalars from F_{p^2} and the degree-2 Galois ring over Z/p^2
# ---------------------------------------------------------------------------

RingEntry = tuple[int, int]
RingMatrix = Sequence[Sequence[RingEntry]]


def _has_root(c0: int, c1: int, p: int) -> bool:
    return any((x * x + c1 * x + c0) % p == 0 for x in range(p))


def default_min_poly(p: int) -> tuple[int, int]:
    """Smallest (c1, c0) in lexicographic order with x^2 + c1 x + c0 irreducible mod p."""
    _require_prime(p)
    for c1 in range(p):
        for c0 in range(p):
            if not _has_root(c0, c1, p):
                return c0, c1
    raise RuntimeError(f"no irreducible quadratic mod {p}")


@dataclass(frozen=True)
class GaloisRingSpec:
    """Z/p^exponent[x] / (x^2 + c1 x + c0), with min_poly given as (c0, c1)."""

    p: int
    exponent: int = 1
    min_poly: tuple[int, int] | None = None

    def __post_init__(self):
        _require_prime(self.p)
        if self.exponent not in (1, 2):
            raise ScenarioError(f"exponent={self.exponent} must be 1 or 2")
        if self.min_poly is None:
            object.__setattr__(self, "min_poly", default_min_poly(self.p))
        else:
            object.__setattr__(self, "min_poly", tuple(int(c) % self.p for c in self.min_poly))
        c0, c1 = self.coefficients
        if _has_root(c0, c1, self.p):
            raise ScenarioError(f"x^2 + {c1}x + {c0} is reducible mod {self.p}")

    @property
    def coefficients(self) -> tuple[int, int]:
        assert self.min_poly is not None
        return self.min_poly

    @property
    def modulus(self) -> int:
        return self.p**self.exponent

    @property
    def companion(self) -> ResidueMatrix:
        c0, c1 = self.coefficients
        return ResidueMatrix.from_rows([[0, -c0], [1, -c1]], self.modulus)

    def entry_matrix(self, entry: RingEntry) -> ResidueMatrix:
        """a + b alpha as the 2x2 matrix a I + b C."""
        a, b = entry
        c = self.companion
        return ResidueMatrix.from_rows(
            [[a + b * c[0, 0], b * c[0, 1]], [b * c[1, 0], a + b * c[1, 1]]],
            self.modulus,
        )

    def with_exponent(self, exponent: int) -> GaloisRingSpec:
        """The same minimal polynomial over Z/p^exponent."""
        return GaloisRingSpec(self.p, exponent, self.min_poly)


def ring_matrix_to_residue(spec: GaloisRingSpec, matrix: RingMatrix) -> ResidueMatrix:
    """A 2x2 matrix over the ring as a 4x4 matrix over Z/p^exponent."""
    if len(matrix) != 2 or any(len(row) != 2 for row in matrix):
        raise ScenarioError("ring matrices must be 2x2")
    rows: list[list[int]] = [[0] * 4 for _ in range(4)]
    for bi in range(2):
        for bj in range(2):
            block = spec.entry_matrix(matrix[bi][bj])
            for r in range(2):
                for c in range(2):
                    rows[2 * bi + r][2 * bj + c] = block[r, c]
    return ResidueMatrix.from_rows(rows, spec.modulus)


def restriction_of_scalars_group(spec: GaloisRingSpec, generators: Sequence[RingMatrix]) -> MatGroup:
    """Closure of ring matrices written as 4x4 blocks over Z/p^exponent."""
    if not generators:
        raise ScenarioError("at least one generator is required")
    return closure([ring_matrix_to_residue(spec, g) for g in generators])


def unipotent_ring_matrix(top_left: RingEntry, top_right: RingEntry) -> list[list[RingEntry]]:
    return [[top_left, top_right], [(0, 0), (1, 0)]]


def h1_group(spec: GaloisRingSpec) -> MatGroup:
    """All [[1, l1 + l2 alpha], [0, 1]] over F_{p^2}, elementary abelian of order p^2."""
    if spec.exponent != 1:
        raise ScenarioError("H1 lives over the field, exponent must be 1")
    return restriction_of_scalars_group(
        spec,
        [unipotent_ring_matrix((1, 0), (1, 0)), unipotent_ring_matrix((1, 0), (0, 1))],
    )


def h2_group(spec: GaloisRingSpec) -> MatGroup:
    """All [[1 + p m2, m1 + m2 alpha], [0, 1]] over the Galois ring mod p^2."""
    if spec.exponent != 2:
        raise ScenarioError("H2 lives over Z/p^2, exponent must be 2")
    p = spec.p
    return restriction_of_scalars_group(
        spec,
        [unipotent_ring_matrix((1, 0), (1, 0)), unipotent_ring_matrix((1 + p, 0), (0, 1))],
    )


def lambda_coordinates(matrix: ResidueMatrix) -> tuple[int, int]:
    """(l1, l2) of [[1, l1 + l2 alpha], [0, 1]] in 4x4 form."""
    return matrix[0, 2], matrix[1, 2]


def lemma51_cocycle(spec: GaloisRingSpec, group: MatGroup | None = None) -> Cocycle:
    """Z(sigma(l1, l2)) = (l2, 0) in F_q^2, i.e. (l2, 0, 0, 0) in coordinates."""
    group = group if group is not None else h1_group(spec)
    values = [(lambda_coordinates(g)[1], 0, 0, 0) for g in group.elements]
    return Cocycle.from_values(group, values)


def lemma51_witnesses(cocycle: Cocycle) -> dict[int, tuple[Vector, ...]]:
    """Every m with g.m - m = Z_g, for every element g."""
    module = cocycle.module
    identity = ResidueMatrix.identity(module.rank, module.modulus)
    witnesses: dict[int, tuple[Vector, ...]] = {}
    for idx in range(len(module.group)):
        solved = solve_linear(module.action(idx) - identity, cocycle[idx])
        if solved.solution is None:
            witnesses[idx] = ()
            continue
        base = np.array(solved.solution, dtype=np.int64)
        witnesses[idx] = tuple(
            tuple(int(x) for x in (base + np.array(k, dtype=np.int64)) % module.modulus)
            for k in enumerate_span(solved.kernel)
        )
    return witnesses


@dataclass(frozen=True)
class H2ReductionCheck:
    h2_order: int
    kernel_order: int
    kernel_fixes_d1: bool
    p_d1_fixed: bool
    descent_matches: bool
    inflated: Cocycle
    inflated_locally_trivial: bool
    inflated_is_coboundary: bool

    @property
    def holds(self) -> bool:
        return (
            self.kernel_fixes_d1
            and self.p_d1_fixed
            and self.descent_matches
            and self.inflated_locally_trivial
            and not self.inflated_is_coboundary
        )


def h2_reduction_check(spec: GaloisRingSpec) -> H2ReductionCheck:
    """Compare H2 with H1 through reduction mod p.

    D1 = (1, 0, 0, 0). The kernel of reduction fixes D1, H2 fixes p D1, and
    delta.D1 - D1 = p Z(delta mod p). The inflation of Z to H2 acting on the
    mod-p module must stay locally trivial without becoming a coboundary.
    """
    p = spec.p
    h2 = h2_group(spec.with_exponent(2))
    h1 = h1_group(spec.with_exponent(1))
    reduced, reduction = reduce_modulus(h2, p)
    if not reduced.same_elements(h1):
        raise RuntimeError(f"H2 mod {p} is not H1")
    projection = reduction.retarget(h1)
    cocycle = lemma51_cocycle(spec.with_exponent(1), h1)

    d1 = (1, 0, 0, 0)
    p_d1 = (p, 0, 0, 0)
    kernel = reduction.kernel()
    kernel_fixes = all(h2.elements[k].apply(d1) == d1 for k in kernel)
    p_d1_fixed = all(g.apply(p_d1) == p_d1 for g in h2.elements)

    descent = True
    for idx, g in enumerate(h2.elements):
        moved = g.apply(d1)
        delta = tuple((a - b) % h2.modulus for a, b in zip(moved, d1))
        expected = tuple((p * z) % h2.modulus for z in cocycle[projection(idx)])
        if delta != expected:
            descent = False
            break

    inflated = inflate(cocycle, projection, GModule.natural(h2).reduction(p))
    local = satisfies_local_conditions(inflated)
    check = H2ReductionCheck(
        h2_order=len(h2),
        kernel_order=len(kernel),
        kernel_fixes_d1=kernel_fixes,
        p_d1_fixed=p_d1_fixed,
        descent_matches=descent,
        inflated=inflated,
        inflated_locally_trivial=local.holds,
        inflated_is_coboundary=is_coboundary(inflated) is not None,
    )
    logger.debug("H2 over p=%d: order %d, kernel %d, holds=%s", p, len(h2), len(kernel), check.holds)
    return check


# ---------------------------------------------------------------------------
# Random samplers
# ---------------------------------------------------------------------------


def make_rng(seed: int | None = None) -> np.random.Generator:
    """numpy Generator seeded from Config.RANDOM_SEED unless a seed is given."""
    return np.random.default_rng(Config.RANDOM_SEED if seed is None else seed)


def random_invertible(rng: np.random.Generator, modulus: int, rank: int) -> ResidueMatrix:
    """Rejection-sample a uniformly random invertible matrix."""
    while True:
        candidate = ResidueMatrix.from_array(rng.integers(0, modulus, size=(rank, rank)), modulus)
        if candidate.is_invertible():
            return candidate


def random_stabilizer_subgroup(rng: np.random.Generator, p: int, n: int, max_generators: int = 3) -> MatGroup:
    """Closure of random [[1, f], [0, u]] over Z/p^n with u a unit; every such group fixes (1, 0)."""
    _require_prime(p, odd=True)
    modulus = p**n
    units = [u for u in range(1, modulus) if u % p]
    count = int(rng.integers(1, max_generators + 1))
    generators = [
        ResidueMatrix.from_rows(
            [[1, int(rng.integers(0, modulus))], [0, int(rng.choice(units))]],
            modulus,
        )
        for _ in range(count)
    ]
    return closure(generators)


def random_cyclic_group(rng: np.random.Generator, modulus: int, rank: int = 2) -> MatGroup:
    return closure([random_invertible(rng, modulus, rank)])


def random_block_group(
    rng: np.random.Generator,
    modulus: int,
    block_ranks: Sequence[int] | None = None,
    max_generators: int = 2,
) -> tuple[MatGroup, tuple[int, ...]]:
    """A block-diagonal group with two blocks of rank 1 or 2, resampled past the size cap."""
    ranks = tuple(block_ranks) if block_ranks is not None else tuple(int(r) for r in rng.integers(1, 3, size=2))
    while True:
        count = int(rng.integers(1, max_generators + 1))
        generators = [block_diagonal([random_invertible(rng, modulus, r) for r in ranks]) for _ in range(count)]
        try:
            return closure(generators, cap=Config.DIRECT_SUM_GROUP_CAP), ranks
        except EnumerationCapError:
            logger.debug("block group over Z/%d exceeded %d elements, resampling", modulus, Config.DIRECT_SUM_GROUP_CAP)
