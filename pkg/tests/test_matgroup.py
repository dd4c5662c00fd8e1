"""Tests for matgroup.py: closure, cyclic subgroups, Sylow subgroups, reductions and homomorphisms."""

import itertools

import pytest

from matgroup import (
    EnumerationCapError,
    NotInGroupError,
    NotInvertibleError,
    block_diagonal,
    closure,
    conjugate,
    cyclic_subgroup,
    cyclic_subgroup_generators,
    diagonal_matrix,
    element_order,
    fixed_submodule,
    fixes_vector,
    is_block_diagonal,
    project_block,
    reduce_modulus,
    subgroup,
    trivial_group,
    unique_p_sylow,
)
from scenarios import make_rng, random_block_group, random_stabilizer_subgroup
from zmod_linalg import DimensionError, ModulusError, ModulusMismatchError, ResidueMatrix, enumerate_span


def _m(rows, modulus):
    return ResidueMatrix.from_rows(rows, modulus)


@pytest.fixture
def g8():
    return closure([_m([[3]], 8), _m([[5]], 8)])


@pytest.fixture
def g16():
    return closure([_m([[3, 8], [0, 1]], 16), _m([[15, 0], [0, 1]], 16)])


@pytest.fixture
def s3_mod3():
    swap = _m([[0, 1, 0], [1, 0, 0], [0, 0, 1]], 3)
    cycle = _m([[0, 0, 1], [1, 0, 0], [0, 1, 0]], 3)
    return closure([swap, cycle])


# ---------------------------------------------------------------------------
# closure
# ---------------------------------------------------------------------------


class TestClosure:
    def test_units_mod_8_in_bfs_order(self, g8):
        assert [g[0, 0] for g in g8.elements] == [1, 3, 5, 7]
        assert g8.identity == 0
        assert g8.generator_indices == (1, 2)

    def test_cayley_edges_match_multiplication(self, g8):
        for i, row in enumerate(g8.cayley_edges):
            for j, target in enumerate(row):
                assert g8.elements[target] == g8.elements[i] @ g8.generators[j]

    def test_parents_form_a_tree(self, g16):
        assert g16.parents[0] is None
        for h in range(1, len(g16)):
            parent, j = g16.parents[h]
            assert parent < h
            assert g16.cayley_edges[parent][j] == h

    def test_lifted_group_has_order_8(self, g16):
        assert len(g16) == 8
        for g in g16.elements:
            a, f = g[0, 0], g[0, 1]
            assert a % 2 == 1
            assert f == (8 if a % 8 in (3, 5) else 0)

    def test_non_invertible_generator(self):
        with pytest.raises(NotInvertibleError, match="generator 0 not invertible mod 8"):
            closure([_m([[2]], 8)])

    def test_mixed_moduli(self):
        with pytest.raises(ModulusMismatchError):
            closure([_m([[3]], 8), _m([[2]], 9)])

    def test_mixed_ranks(self):
        with pytest.raises(DimensionError):
            closure([_m([[3]], 8), ResidueMatrix.identity(2, 8)])

    def test_cap_is_enforced(self):
        with pytest.raises(EnumerationCapError):
            closure([_m([[1, 1], [0, 1]], 9)], cap=5)

    def test_empty_generators(self):
        with pytest.raises(ValueError):
            closure([])

    def test_trivial_group(self):
        group = trivial_group(4, 2)
        assert len(group) == 1
        with pytest.raises(ModulusError):
            trivial_group(1, 2)

    def test_index_of_unknown_element(self, g8):
        with pytest.raises(NotInGroupError):
            g8.index_of(_m([[2]], 8))

    def test_multiply_inverse_power(self, g16):
        for i in range(len(g16)):
            assert g16.multiply(i, g16.inverse(i)) == g16.identity
            assert g16.power(i, element_order(g16, i)) == g16.identity


# ---------------------------------------------------------------------------
# Orders and cyclic subgroups
# ---------------------------------------------------------------------------


class TestCyclicSubgroups:
    def test_element_order(self, g8):
        assert element_order(g8, _m([[7]], 8)) == 2
        assert element_order(g8, 0) == 1

    def test_unipotent_order_mod_9(self):
        u = _m([[1, 1], [0, 1]], 9)
        group = closure([u])
        assert element_order(group, u) == 9
        assert len(group) == 9

    def test_cyclic_subgroup_lists_powers(self, g8):
        three = g8.index_of(_m([[3]], 8))
        assert cyclic_subgroup(g8, three) == (0, three)

    def test_units_mod_8_have_four_cyclic_subgroups(self, g8):
        assert cyclic_subgroup_generators(g8) == [0, 1, 2, 3]

    def test_cyclic_group_counts_one_per_divisor(self):
        group = closure([_m([[1, 1], [0, 1]], 9)])
        assert len(cyclic_subgroup_generators(group)) == 3

    def test_out_of_range_index(self, g8):
        with pytest.raises(NotInGroupError):
            element_order(g8, 17)


class TestSubgroups:
    def test_subgroup_with_inclusion(self, g8):
        sub, inclusion = subgroup(g8, [g8.index_of(_m([[7]], 8))])
        assert len(sub) == 2
        assert inclusion.is_homomorphism()
        assert not inclusion.is_surjective()

    def test_two_group_is_its_own_sylow(self, g8):
        sylow = unique_p_sylow(g8, 2)
        assert sylow is not None
        assert sylow.same_elements(g8)

    def test_no_unique_2_sylow_in_s3(self, s3_mod3):
        assert len(s3_mod3) == 6
        assert unique_p_sylow(s3_mod3, 2) is None

    def test_normal_3_sylow_in_s3(self, s3_mod3):
        sylow = unique_p_sylow(s3_mod3, 3)
        assert sylow is not None
        assert len(sylow) == 3

    def test_sylow_needs_a_prime(self, g8):
        with pytest.raises(ValueError):
            unique_p_sylow(g8, 4)

    @pytest.mark.parametrize("p,n", [(3, 1), (3, 2), (5, 1)])
    def test_sylow_is_normal(self, p, n):
        rng = make_rng(p * 10 + n)
        for _ in range(6):
            group = random_stabilizer_subgroup(rng, p, n)
            sylow = unique_p_sylow(group, p)
            assert sylow is not None
            for s in group.generators:
                inverse = s.inverse()
                assert all((s @ h @ inverse).key in sylow.key_set for h in sylow.elements)

    def test_normal_sylow_in_s3_is_closed_under_conjugation(self, s3_mod3):
        sylow = unique_p_sylow(s3_mod3, 3)
        for s in s3_mod3.generators:
            assert conjugate(sylow, s).same_elements(sylow)

    @pytest.mark.parametrize("modulus", [4, 8, 9])
    def test_element_orders_divide_group_order(self, modulus):
        rng = make_rng(modulus)
        for _ in range(5):
            group, _ = random_block_group(rng, modulus)
            assert all(len(group) % element_order(group, i) == 0 for i in range(len(group)))


# ---------------------------------------------------------------------------
# Action on vectors
# ---------------------------------------------------------------------------


class TestFixedVectors:
    def test_lift_does_not_fix_second_basis_vector(self, g16):
        assert not fixes_vector(g16, (0, 1))

    def test_stabilizer_fixes_first_basis_vector(self):
        group = closure([_m([[1, 3], [0, 4]], 9)])
        assert fixes_vector(group, (1, 0))

    def test_fixed_submodule_of_units_mod_8(self, g8):
        assert set(enumerate_span(fixed_submodule(g8))) == {(0,), (4,)}

    @pytest.mark.parametrize("modulus", [4, 8, 9])
    def test_fixed_submodule_holds_every_fixed_vector(self, modulus):
        rng = make_rng(modulus + 1)
        for _ in range(5):
            group, ranks = random_block_group(rng, modulus)
            fixed = fixed_submodule(group)
            for v in itertools.product(range(modulus), repeat=sum(ranks)):
                assert (v in fixed) == all(s.apply(v) == v for s in group.generators)

    def test_vector_length_checked(self, g8):
        with pytest.raises(DimensionError):
            fixes_vector(g8, (1, 0))

    def test_conjugate_keeps_order(self, g16):
        t = _m([[1, 1], [0, 1]], 16)
        assert len(conjugate(g16, t)) == len(g16)


# ---------------------------------------------------------------------------
# Reductions, blocks and homomorphisms
# ---------------------------------------------------------------------------


class TestReduction:
    def test_lift_mod_8_is_diagonal_of_order_4(self, g16):
        image, hom = reduce_modulus(g16, 8)
        assert len(image) == 4
        assert all(g[0, 1] == 0 and g[1, 0] == 0 for g in image.elements)
        assert hom.is_homomorphism()
        assert hom.is_surjective()

    def test_reduction_kernel(self, g16):
        _, hom = reduce_modulus(g16, 8)
        kernel = [g16.elements[k] for k in hom.kernel()]
        assert kernel == [ResidueMatrix.identity(2, 16), diagonal_matrix([9, 1], 16)]

    def test_unipotent_mod_9_reduces_to_order_3(self):
        image, _ = reduce_modulus(closure([_m([[1, 1], [0, 1]], 9)]), 3)
        assert len(image) == 3

    def test_same_modulus_is_identity(self, g8):
        image, hom = reduce_modulus(g8, 8)
        assert image is g8
        assert hom.images == (0, 1, 2, 3)

    def test_non_divisor_rejected(self, g8):
        with pytest.raises(ModulusError):
            reduce_modulus(g8, 3)

    def test_compose_and_retarget(self, g16, g8):
        reduced, reduction = reduce_modulus(g16, 8)
        _, to_corner = project_block(reduced, 0, 1)
        projection = reduction.compose(to_corner).retarget(g8)
        assert projection.target is g8
        assert projection.is_homomorphism()
        assert projection.is_surjective()
        assert len(projection.kernel()) == 2

    def test_compose_needs_matching_groups(self, g16, g8):
        _, reduction = reduce_modulus(g16, 8)
        _, other = subgroup(g8, [1])
        with pytest.raises(ValueError):
            reduction.compose(other)

    def test_retarget_needs_same_elements(self, g16, g8):
        _, reduction = reduce_modulus(g16, 8)
        with pytest.raises(NotInGroupError):
            reduction.retarget(g8)


class TestBlocks:
    def test_block_diagonal_matrix(self):
        m = block_diagonal([_m([[3]], 8), _m([[1, 1], [0, 1]], 8)])
        assert m.rows == 3
        assert is_block_diagonal(m, [1, 2])
        assert not is_block_diagonal(m, [2, 1])

    def test_project_block(self):
        group = closure([block_diagonal([_m([[3]], 8), _m([[5]], 8)])])
        image, hom = project_block(group, 1, 1)
        assert len(image) == 2
        assert hom.is_surjective()

    def test_project_block_rejects_mixing(self, g16):
        with pytest.raises(ValueError):
            project_block(g16, 0, 1)

    def test_project_block_range(self, g8):
        with pytest.raises(DimensionError):
            project_block(g8, 0, 2)
