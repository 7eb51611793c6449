"""Volumes, divergence, the boundary operator, modular tensor and potentials."""

from __future__ import annotations

import random

import pytest

from nambu.algebra import Polynomial
from nambu.exterior import (
    FORM,
    MULTIVECTOR,
    GradedTensor,
    contract_form,
    differential,
    ext_d,
    lie_form,
    lie_mv,
    pair,
)
from nambu.modular import (
    VolumeSpec,
    WeightedForm,
    basic_volume,
    check_basic,
    delta,
    divergence,
    flat,
    flat_inverse,
    is_tangent,
    modular_potential,
    modular_tensor,
    weighted_d,
)
from nambu.structures import sharp
from support import (
    R3,
    R4,
    coords,
    radius_squared,
    rand_mv,
    rand_poly,
    rand_vector_field,
    regular_r3,
    regular_r4,
    singular_r3,
)

x1, x2, x3 = coords(R3)
R2SQ = radius_squared(R3)
STD3 = VolumeSpec.standard(R3)
STD4 = VolumeSpec.standard(R4)


def dx(chart, *indices):
    return GradedTensor.basis(chart, FORM, tuple(i - 1 for i in indices))


def ee(chart, *indices):
    return GradedTensor.basis(chart, MULTIVECTOR, tuple(i - 1 for i in indices))


MODULAR_R3 = (ee(R3, 1, 2).scale(2 * x3) - ee(R3, 1, 3).scale(2 * x2)
              + ee(R3, 2, 3).scale(2 * x1))


# -- flat and its inverse ------------------------------------------------------

def test_flat_standard_two_vector():
    result = flat(STD3, ee(R3, 1, 2))
    assert result.weight.is_zero()
    assert result.body == dx(R3, 3)

def test_flat_top_contraction_is_pairing():
    result = flat(STD3, singular_r3().tensor)
    assert result.body == GradedTensor.from_scalar(R3, FORM, R2SQ)

def test_flat_carries_weight():
    volume = VolumeSpec.weighted(R3, x1)
    result = flat(volume, ee(R3, 1))
    assert result.weight == x1
    assert result.body == dx(R3, 2, 3)

def test_flat_inverse_golden():
    assert flat_inverse(STD3, WeightedForm(R3.zero_polynomial(), dx(R3, 3))) == ee(R3, 1, 2)
    assert flat_inverse(STD3, WeightedForm(R3.zero_polynomial(), dx(R3, 1, 3))) == -ee(R3, 2)
    theta = WeightedForm(R3.zero_polynomial(), dx(R3, 2, 3).scale(x1))
    assert flat_inverse(STD3, theta) == ee(R3, 1).scale(x1)

def test_flat_inverse_weight_mismatch():
    theta = WeightedForm(x1, dx(R3, 3))
    with pytest.raises(ValueError):
        flat_inverse(STD3, theta)

def test_flat_round_trip_random_volumes():
    rng = random.Random(53)
    for _ in range(20):
        u = rand_poly(rng, R3, max_degree=2, allow_zero=False)
        w = rand_poly(rng, R3, max_degree=2)
        volume = VolumeSpec(R3, u, w)
        field = rand_mv(rng, R3, rng.randint(0, 3))
        assert flat_inverse(volume, flat(volume, field)) == field


# -- weighted derivative -------------------------------------------------------

def test_weighted_d_weight_zero_is_plain_d():
    theta = WeightedForm(R3.zero_polynomial(), dx(R3, 2).scale(x1))
    assert weighted_d(theta).body == ext_d(dx(R3, 2).scale(x1))

def test_weighted_d_adds_weight_term():
    theta = WeightedForm(x1, dx(R3, 2))
    assert weighted_d(theta).body == -dx(R3, 1, 2)

def test_weighted_d_squares_to_zero():
    rng = random.Random(59)
    from support import rand_form
    for _ in range(25):
        with_weight = WeightedForm(rand_poly(rng, R4, max_degree=2),
                                   rand_form(rng, R4, rng.randint(0, 3)))
        assert weighted_d(weighted_d(with_weight)).body.is_zero()


# -- divergence and the boundary ------------------------------------------------

def test_divergence_golden():
    assert divergence(STD3, ee(R3, 3).scale(R2SQ)).as_polynomial() == 2 * x3
    assert divergence(STD3, ee(R3, 1)).is_zero()

def test_divergence_weighted_definition_unfolds():
    volume = VolumeSpec.weighted(R3, x1 * x2)
    field = ee(R3, 1).scale(x1)
    classical = divergence(STD3, field)
    from nambu.exterior import apply_vector
    assert divergence(volume, field) == classical - apply_vector(field, x1 * x2)

def test_divergence_equals_delta_on_fields():
    rng = random.Random(61)
    for _ in range(20):
        u = rand_poly(rng, R3, max_degree=2, allow_zero=False)
        w = rand_poly(rng, R3, max_degree=2)
        volume = VolumeSpec(R3, u, w)
        field = rand_vector_field(rng, R3)
        boundary = delta(volume, field)
        assert boundary.scalar_value() == divergence(volume, field)

def test_delta_golden_values():
    assert delta(STD3, ee(R3, 1).scale(x1)).scalar_value().as_polynomial() == \
        Polynomial.constant(R3.coordinates, 1)
    assert delta(STD3, ee(R3, 1, 2).scale(x1)) == -ee(R3, 2)
    assert delta(STD3, singular_r3().tensor) == MODULAR_R3

def test_delta_squared_zero_random_volumes():
    rng = random.Random(67)
    for _ in range(50):
        u = rand_poly(rng, R3, max_degree=2, allow_zero=False)
        w = rand_poly(rng, R3, max_degree=2)
        volume = VolumeSpec(R3, u, w)
        k = rng.randint(2, 3)
        field = rand_mv(rng, R3, k)
        assert delta(volume, delta(volume, field)).is_zero()


# -- modular tensor ---------------------------------------------------------------

def test_modular_tensor_golden():
    assert modular_tensor(singular_r3(), STD3) == MODULAR_R3

def test_modular_tensor_constant_structure_vanishes():
    assert modular_tensor(regular_r4(), STD4).is_zero()

def test_modular_tensor_weight_shift():
    structure = singular_r3()
    weighted = VolumeSpec.weighted(R3, x3)
    shifted = modular_tensor(structure, weighted)
    assert shifted == MODULAR_R3 - sharp(structure, 1, dx(R3, 3))

def test_modular_potential_zero_when_tensor_zero():
    result = modular_potential(regular_r4(), STD4, 3)
    assert result.feasible
    assert result.potential.is_zero()

def test_modular_potential_infeasible_for_singular():
    for bound in (0, 4, 8):
        result = modular_potential(singular_r3(), STD3, bound)
        assert not result.feasible
        assert result.certificate

def test_modular_potential_weighted_r4():
    structure = regular_r4()
    volume = VolumeSpec.weighted(R4, R4.coordinate_polynomial(3))
    result = modular_potential(structure, volume, 4)
    assert result.feasible
    # returned potential must reproduce the modular tensor exactly
    recovered = sharp(structure, 1, differential(R4, result.potential))
    assert recovered == modular_tensor(structure, volume)

def test_modular_potential_rational_volume_coefficient():
    # volume u = 1 + x1^2 makes the tensor rational; equations are cleared by
    # denominators and infeasibility persists (u > 0, so the obstruction does)
    volume = VolumeSpec(R3, Polynomial.constant(R3.coordinates, 1) + x1 * x1,
                        R3.zero_polynomial())
    tensor = modular_tensor(singular_r3(), volume)
    assert any(not v.is_polynomial() for v in tensor.components.values())
    result = modular_potential(singular_r3(), volume, 3)
    assert not result.feasible
    assert result.certificate


def test_modular_potential_solvable_case_r3():
    # exp(-x1)-weighted volume on the regular structure: tensor is sharp of -dx1
    structure = regular_r3()
    volume = VolumeSpec.weighted(R3, x1)
    tensor = modular_tensor(structure, volume)
    assert tensor == -ee(R3, 2, 3)
    result = modular_potential(structure, volume, 2)
    assert result.feasible
    assert sharp(structure, 1, differential(R3, result.potential)) == tensor


# -- basic volumes ----------------------------------------------------------------

def test_basic_volume_r4_normal_form():
    mu = basic_volume(regular_r4(), STD4, R4.zero_polynomial())
    assert mu.body == dx(R4, 4)
    report = check_basic(regular_r4(), mu, list(coords(R4)))
    assert report.passed

def test_basic_volume_top_order_is_scalar_one():
    mu = basic_volume(regular_r3(), STD3, R3.zero_polynomial())
    assert mu.degree == 0
    assert mu.body == GradedTensor.from_scalar(R3, FORM, 1)

def test_basic_volume_rejected_for_singular():
    with pytest.raises(ValueError):
        basic_volume(singular_r3(), STD3, R3.zero_polynomial())

def test_check_basic_detects_failure():
    candidate = WeightedForm(R4.zero_polynomial(), dx(R4, 1))
    report = check_basic(regular_r4(), candidate, list(coords(R4)))
    assert not report.passed
    assert any(v.condition == "contraction" for v in report.violations)

def test_check_basic_trivial_family():
    one = Polynomial.constant(R4.coordinates, 1)
    candidate = WeightedForm(R4.zero_polynomial(), dx(R4, 1))
    assert check_basic(regular_r4(), candidate, [one, one, one]).passed


# -- tangency ---------------------------------------------------------------------

def test_everything_tangent_for_singular_r3():
    rng = random.Random(71)
    for _ in range(10):
        field = rand_mv(rng, R3, rng.randint(1, 3))
        assert is_tangent(singular_r3(), field, 3)

def test_transverse_direction_not_tangent():
    assert not is_tangent(regular_r4(), ee(R4, 4), 2)

def test_leaf_multivector_tangent():
    field = ee(R4, 1, 2).scale(R4.coordinate_polynomial(3))
    assert is_tangent(regular_r4(), field, 2)


# -- identity suites over random data ----------------------------------------------


def random_volume(rng, chart, allow_nonconstant=True):
    if allow_nonconstant and rng.random() < 0.4:
        u = rand_poly(rng, chart, max_degree=1, allow_zero=False)
    else:
        u = Polynomial.constant(chart.coordinates, 1)
    w = rand_poly(rng, chart, max_degree=2) if rng.random() < 0.5 \
        else chart.zero_polynomial()
    return VolumeSpec(chart, u, w)


def test_boundary_contraction_identity():
    # i(a) delta(P) = div(i(a)P) + (-1)^k i(da)P for (k-1)-forms a
    rng = random.Random(73)
    from support import rand_form
    for _ in range(50):
        chart = rng.choice([R3, R4])
        volume = random_volume(rng, chart)
        k = rng.randint(1, 3)
        field = rand_mv(rng, chart, k, max_degree=2)
        alpha = rand_form(rng, chart, k - 1, max_degree=2)
        lhs = pair(alpha, delta(volume, field))
        i_alpha_p = contract_form(alpha, field)
        rhs = divergence(volume, i_alpha_p) if k >= 1 else None
        term = pair(ext_d(alpha), field)
        if k % 2:
            term = -term
        assert lhs == rhs + term

def test_flat_lie_compatibility():
    # L_X flat(P) = flat(L_X P) + div(X) flat(P), unweighted volumes
    rng = random.Random(79)
    for _ in range(50):
        chart = rng.choice([R3, R4])
        u = rand_poly(rng, chart, max_degree=1, allow_zero=False)
        volume = VolumeSpec(chart, u, chart.zero_polynomial())
        x = rand_vector_field(rng, chart, max_degree=2)
        p = rand_mv(rng, chart, rng.randint(1, 3), max_degree=2)
        lhs = lie_form(x, flat(volume, p).body)
        rhs = (flat(volume, lie_mv(x, p)).body
               + flat(volume, p).body.scale(divergence(volume, x)))
        assert lhs == rhs
