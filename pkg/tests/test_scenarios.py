"""Tests for scenarios.py: stabilizer family, normal forms, the mod-8 counterexample and the Galois-ring groups."""

import pytest
from sympy import factorint

from cohomology import (
    GModule,
    h1_loc,
    inflate,
    is_coboundary,
    restriction_injective,
    satisfies_local_conditions,
)
from matgroup import closure, element_order, fixes_vector, is_block_diagonal, trivial_group, unique_p_sylow
from scenarios import (
    DZ_COCYCLE_VALUES,
    GaloisRingSpec,
    ScenarioError,
    StabilizerParams,
    default_min_poly,
    dz_counterexample,
    dz_descent_check,
    h1_group,
    h2_group,
    h2_reduction_check,
    lambda_coordinates,
    lemma32_normal_form,
    lemma51_cocycle,
    lemma51_witnesses,
    make_rng,
    random_block_group,
    random_cyclic_group,
    random_stabilizer_subgroup,
    ring_matrix_to_residue,
    stabilizer_family_group,
    stabilizer_parameter_grid,
    unipotent_ring_matrix,
)
from zmod_linalg import ResidueMatrix


def _m(rows, modulus):
    return ResidueMatrix.from_rows(rows, modulus)


@pytest.fixture(scope="module")
def bundle():
    return dz_counterexample()


# ---------------------------------------------------------------------------
# Stabilizer family
# ---------------------------------------------------------------------------


class TestStabilizerFamily:
    def test_delta_collapses_when_level_reaches_n(self):
        params = StabilizerParams(3, 1, 1, 0, 0)
        assert params.delta == ResidueMatrix.identity(2, 3)
        group = stabilizer_family_group(params)
        assert len(group) == 3

    def test_order_9_over_z9(self):
        group = stabilizer_family_group(StabilizerParams(3, 2, 1, 1, 0))
        assert len(group) == 9
        assert fixes_vector(group, (1, 0))

    def test_sigma_is_identity_when_e_equals_n(self):
        params = StabilizerParams(5, 1, 1, 1, 0)
        assert params.sigma == ResidueMatrix.identity(2, 5)

    def test_even_prime_rejected(self):
        with pytest.raises(ScenarioError, match="odd"):
            StabilizerParams(2, 3, 1, 1)

    def test_level_range(self):
        with pytest.raises(ScenarioError):
            StabilizerParams(3, 2, 0, 1)
        with pytest.raises(ScenarioError):
            StabilizerParams(3, 2, 1, 3)

    def test_b_is_reduced(self):
        assert StabilizerParams(3, 2, 1, 1, 10).b == 1

    def test_grid_has_no_repeats(self):
        grid = list(stabilizer_parameter_grid(3, 1))
        assert len(grid) == 5
        assert len({(p.i, p.e, p.b) for p in grid}) == 5

    @pytest.mark.parametrize("p,n", [(3, 1), (3, 2), (5, 1)])
    def test_grid_groups_have_no_local_classes(self, p, n):
        for params in stabilizer_parameter_grid(p, n):
            group = stabilizer_family_group(params)
            assert fixes_vector(group, (1, 0))
            assert h1_loc(group).is_trivial, params


class TestNormalForm:
    def test_diagonal_delta(self):
        group = closure([_m([[1, 0], [0, 4]], 9), _m([[1, 3], [0, 1]], 9)])
        form = lemma32_normal_form(group, 3)
        assert (form.i, form.e, form.b) == (1, 1, 0)
        assert form.delta == _m([[1, 0], [0, 4]], 9)
        assert not form.degenerate

    def test_off_diagonal_delta_is_kept(self):
        group = closure([_m([[1, 1], [0, 4]], 9)])
        form = lemma32_normal_form(group, 3)
        assert (form.i, form.e, form.b) == (1, 1, 1)
        assert form.sigma == _m([[1, 3], [0, 1]], 9)
        assert closure(form.generators).same_elements(group)

    def test_cyclic_unipotent_is_degenerate(self):
        group = closure([_m([[1, 1], [0, 1]], 9)])
        form = lemma32_normal_form(group, 3)
        assert form.degenerate
        assert form.e == 0
        assert form.i == 2
        assert form.delta == ResidueMatrix.identity(2, 9)
        assert form.generators == [form.sigma]

    def test_trivial_group_is_degenerate(self):
        form = lemma32_normal_form(trivial_group(9, 2), 3)
        assert form.degenerate
        assert form.generators == []

    def test_round_trip_through_params(self):
        params = StabilizerParams(3, 2, 1, 0, 1)
        form = lemma32_normal_form(stabilizer_family_group(params), 3)
        assert stabilizer_family_group(form.params).same_elements(stabilizer_family_group(params))

    def test_shape_violation(self):
        with pytest.raises(ScenarioError, match="not of the form"):
            lemma32_normal_form(closure([_m([[2, 0], [0, 1]], 9)]), 3)

    def test_even_prime(self):
        with pytest.raises(ScenarioError):
            lemma32_normal_form(closure([_m([[1, 1], [0, 1]], 8)]), 2)

    def test_modulus_must_be_a_power_of_p(self):
        with pytest.raises(ScenarioError):
            lemma32_normal_form(closure([_m([[1, 1], [0, 1]], 9)]), 5)


# ---------------------------------------------------------------------------
# (Z/8)* and its lift
# ---------------------------------------------------------------------------


class TestCounterexample:
    def test_orders(self, bundle):
        assert len(bundle.g8) == 4
        assert len(bundle.g16) == 8
        assert bundle.cocycle.values == tuple((v,) for v in DZ_COCYCLE_VALUES)

    def test_cocycle_verdicts(self, bundle):
        assert satisfies_local_conditions(bundle.cocycle).holds
        assert is_coboundary(bundle.cocycle) is None

    def test_local_group_contains_the_class(self, bundle):
        local = h1_loc(bundle.g8)
        assert local.structure.invariant_factors == (2,)
        (representative,) = local.representatives
        assert is_coboundary(bundle.cocycle + representative) is not None

    def test_projection(self, bundle):
        assert bundle.projection.is_homomorphism()
        assert bundle.projection.is_surjective()
        kernel = [bundle.g16.elements[k] for k in bundle.reduction.kernel()]
        assert kernel == [ResidueMatrix.identity(2, 16), _m([[9, 0], [0, 1]], 16)]

    def test_descent(self, bundle):
        check = dz_descent_check(bundle)
        assert check.holds
        assert check.kernel_fixes_base
        assert check.mismatches == ()

    def test_lift_moves_second_basis_vector(self, bundle):
        assert not fixes_vector(bundle.g16, (0, 1))

    def test_inflation_stays_local_and_nontrivial(self, bundle):
        inflated = inflate(bundle.cocycle, bundle.projection, bundle.lifted_module)
        assert inflated.group is bundle.g16
        assert satisfies_local_conditions(inflated).holds
        assert is_coboundary(inflated) is None


# ---------------------------------------------------------------------------
# Galois rings and the unipotent groups
# ---------------------------------------------------------------------------


class TestGaloisRing:
    def test_default_min_polys(self):
        assert default_min_poly(3) == (1, 0)
        assert default_min_poly(5) == (2, 0)

    def test_reducible_polynomial_rejected(self):
        with pytest.raises(ScenarioError, match="reducible"):
            GaloisRingSpec(3, min_poly=(2, 0))

    def test_exponent_range(self):
        with pytest.raises(ScenarioError):
            GaloisRingSpec(3, exponent=3)

    def test_min_poly_is_reduced(self):
        assert GaloisRingSpec(3, min_poly=(4, 3)).coefficients == (1, 0)

    def test_companion_squares_to_minus_one(self):
        spec = GaloisRingSpec(3)
        c = spec.companion
        assert c @ c == _m([[2, 0], [0, 2]], 3)

    def test_identity_ring_matrix(self):
        spec = GaloisRingSpec(5)
        identity = [[(1, 0), (0, 0)], [(0, 0), (1, 0)]]
        assert ring_matrix_to_residue(spec, identity) == ResidueMatrix.identity(4, 5)

    def test_ring_matrix_shape(self):
        with pytest.raises(ScenarioError):
            ring_matrix_to_residue(GaloisRingSpec(3), [[(1, 0)]])


class TestUnipotentGroups:
    @pytest.mark.parametrize("p", [3, 5])
    def test_h1_is_elementary_abelian(self, p):
        group = h1_group(GaloisRingSpec(p))
        assert len(group) == p**2
        assert all(element_order(group, g) == p for g in range(1, len(group)))
        assert {lambda_coordinates(g) for g in group.elements} == {(a, b) for a in range(p) for b in range(p)}

    def test_h1_needs_the_field(self):
        with pytest.raises(ScenarioError):
            h1_group(GaloisRingSpec(3, exponent=2))

    def test_h2_order(self):
        assert len(h2_group(GaloisRingSpec(3, exponent=2))) == 81

    def test_h2_needs_exponent_2(self):
        with pytest.raises(ScenarioError):
            h2_group(GaloisRingSpec(3))

    def test_unipotent_ring_matrix(self):
        spec = GaloisRingSpec(3)
        g = ring_matrix_to_residue(spec, unipotent_ring_matrix((1, 0), (2, 1)))
        assert lambda_coordinates(g) == (2, 1)


class TestLocallyTrivialClass:
    @pytest.mark.parametrize("p", [3, 5])
    def test_cocycle_verdicts(self, p):
        z = lemma51_cocycle(GaloisRingSpec(p))
        assert satisfies_local_conditions(z).holds
        assert is_coboundary(z) is None
        assert not h1_loc(z.module).is_trivial

    def test_cocycle_values(self):
        z = lemma51_cocycle(GaloisRingSpec(3))
        for idx, g in enumerate(z.group.elements):
            assert z[idx] == (lambda_coordinates(g)[1], 0, 0, 0)

    def test_witness_shapes(self):
        z = lemma51_cocycle(GaloisRingSpec(3))
        witnesses = lemma51_witnesses(z)
        for idx, g in enumerate(z.group.elements):
            options = witnesses[idx]
            assert options
            coordinates = lambda_coordinates(g)
            if coordinates == (1, 0):
                assert all(w[2] == 0 and w[3] == 0 for w in options)
            if coordinates == (0, 1):
                assert all((w[2], w[3]) != (0, 0) for w in options)

    def test_witnesses_solve_the_local_equation(self):
        z = lemma51_cocycle(GaloisRingSpec(3))
        for idx, options in lemma51_witnesses(z).items():
            for w in options:
                assert z.module.act(idx, w) == tuple((a + b) % 3 for a, b in zip(w, z[idx]))


class TestH2Reduction:
    def test_reduction_check_holds(self):
        check = h2_reduction_check(GaloisRingSpec(3))
        assert check.h2_order == 81
        assert check.kernel_order == 9
        assert check.kernel_fixes_d1
        assert check.p_d1_fixed
        assert check.descent_matches
        assert check.inflated_locally_trivial
        assert not check.inflated_is_coboundary
        assert check.holds


# ---------------------------------------------------------------------------
# Random samplers
# ---------------------------------------------------------------------------


class TestSamplers:
    def test_rng_is_reproducible(self):
        a = make_rng(5).integers(0, 1000, size=4).tolist()
        b = make_rng(5).integers(0, 1000, size=4).tolist()
        assert a == b

    def test_stabilizer_samples_fix_first_vector(self):
        rng = make_rng(11)
        for _ in range(5):
            group = random_stabilizer_subgroup(rng, 3, 2)
            assert fixes_vector(group, (1, 0))
            assert h1_loc(group).is_trivial

    @pytest.mark.parametrize("p,n", [(3, 1), (3, 2), (5, 1), (5, 2)])
    def test_stabilizer_samples_reduce_to_their_sylow(self, p, n):
        rng = make_rng(17)
        orders = []
        for _ in range(10):
            group = random_stabilizer_subgroup(rng, p, n)
            orders.append(len(group))
            sylow = unique_p_sylow(group, p)
            assert sylow is not None
            form = lemma32_normal_form(sylow, p)
            assert closure([form.delta, form.sigma]).same_elements(sylow)
            assert restriction_injective(group, sylow)
            assert h1_loc(group).is_trivial
        assert any(set(factorint(order)) - {p} for order in orders)

    def test_cyclic_samples(self):
        rng = make_rng(3)
        group = random_cyclic_group(rng, 8)
        assert len(group.generators) == 1
        assert element_order(group, group.generator_indices[0]) == len(group)

    def test_block_samples(self):
        rng = make_rng(4)
        group, ranks = random_block_group(rng, 9, block_ranks=(1, 2))
        assert ranks == (1, 2)
        assert all(is_block_diagonal(g, ranks) for g in group.elements)

    def test_lifted_module_is_the_corner(self, bundle):
        assert isinstance(bundle.lifted_module, GModule)
        assert (bundle.lifted_module.modulus, bundle.lifted_module.rank) == (8, 1)
