"""Shared builders and random generators for the test suite."""

from __future__ import annotations

import itertools
import random
from fractions import Fraction

from nambu.algebra import Polynomial
from nambu.exterior import FORM, MULTIVECTOR, Chart, GradedTensor
from nambu.structures import NambuStructure

R3 = Chart.of("x1 x2 x3")
R4 = Chart.of("x1 x2 x3 x4")
R5 = Chart.of("x1 x2 x3 x4 x5")


def coords(chart: Chart) -> tuple[Polynomial, ...]:
    return tuple(chart.coordinate_polynomial(i) for i in range(chart.dimension))


def radius_squared(chart: Chart) -> Polynomial:
    total = chart.zero_polynomial()
    for x in coords(chart):
        total = total + x * x
    return total


def singular_r3() -> NambuStructure:
    """The bundled singular example: (x1^2+x2^2+x3^2) e1^e2^e3 on R^3."""
    return NambuStructure.from_top_coefficient(R3, radius_squared(R3))


def regular_r3() -> NambuStructure:
    return NambuStructure.from_top_coefficient(R3, Polynomial.constant(R3.coordinates, 1))


def regular_r4() -> NambuStructure:
    """e1^e2^e3 on R^4: order 3 normal form with a transverse direction."""
    return NambuStructure(GradedTensor.basis(R4, MULTIVECTOR, (0, 1, 2)))


def nondecomposable_r5() -> NambuStructure:
    tensor = GradedTensor(R5, MULTIVECTOR, 3, {(0, 1, 2): 1, (0, 3, 4): 1})
    return NambuStructure(tensor)


def rand_fraction(rng: random.Random) -> Fraction:
    return Fraction(rng.randint(-4, 4), rng.choice([1, 1, 1, 2, 3]))


def rand_poly(rng: random.Random, chart: Chart, max_degree: int = 3,
              max_terms: int = 3, allow_zero: bool = True) -> Polynomial:
    terms = {}
    for _ in range(rng.randint(0 if allow_zero else 1, max_terms)):
        exponent = [0] * chart.dimension
        for _ in range(rng.randint(0, max_degree)):
            exponent[rng.randrange(chart.dimension)] += 1
        terms[tuple(exponent)] = rand_fraction(rng)
    poly = Polynomial(chart.coordinates, terms)
    if not allow_zero and poly.is_zero():
        return Polynomial.constant(chart.coordinates, 1)
    return poly


def rand_tensor(rng: random.Random, chart: Chart, variance: str, degree: int,
                max_degree: int = 3, sparsity: float = 0.7) -> GradedTensor:
    components = {}
    for index in itertools.combinations(range(chart.dimension), degree):
        if rng.random() < sparsity:
            components[index] = rand_poly(rng, chart, max_degree)
    return GradedTensor(chart, variance, degree, components)


def rand_form(rng: random.Random, chart: Chart, degree: int,
              max_degree: int = 3) -> GradedTensor:
    return rand_tensor(rng, chart, FORM, degree, max_degree)


def rand_mv(rng: random.Random, chart: Chart, degree: int,
            max_degree: int = 3) -> GradedTensor:
    return rand_tensor(rng, chart, MULTIVECTOR, degree, max_degree)


def rand_vector_field(rng: random.Random, chart: Chart,
                      max_degree: int = 3) -> GradedTensor:
    return rand_mv(rng, chart, 1, max_degree)
