"""Finite-dimensional slices of form and multivector spaces.

A truncated basis enumerates, in a fixed deterministic order, all pairs of a
strictly increasing index tuple and a monomial of bounded total degree.  This
turns every coefficient-polynomial operator into an exact rational matrix.
Degree bookkeeping is strict: converting a tensor to coordinates raises when
any component falls outside the basis, so images are never silently clipped;
codomain bounds must be chosen to contain them.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Sequence

from .algebra import ExactMatrix, Polynomial, grlex_key
from .exterior import FORM, MULTIVECTOR, Chart, GradedTensor
from .structures import NambuStructure, sharp

Exponent = tuple[int, ...]
Index = tuple[int, ...]


def monomials_up_to(num_vars: int, degree_bound: int) -> list[Exponent]:
    """All exponent tuples of total degree <= bound, in graded-lex order."""
    out: list[Exponent] = []

    def extend(prefix: list[int], budget: int, slots: int):
        if slots == 0:
            out.append(tuple(prefix))
            return
        for d in range(budget + 1):
            prefix.append(d)
            extend(prefix, budget - d, slots - 1)
            prefix.pop()

    extend([], degree_bound, num_vars)
    out.sort(key=grlex_key)
    return out


@dataclass(frozen=True)
class TruncatedBasis:
    """Ordered basis of degree-k tensors with coefficient degree <= bound."""

    chart: Chart
    variance: str
    degree: int
    coefficient_bound: int
    elements: tuple[tuple[Index, Exponent], ...]

    @classmethod
    def build(cls, chart: Chart, variance: str, degree: int,
              coefficient_bound: int) -> "TruncatedBasis":
        if not 0 <= degree <= chart.dimension:
            raise ValueError("tensor degree out of range for the chart")
        if coefficient_bound < 0:
            raise ValueError("coefficient bound must be non-negative")
        indices = list(itertools.combinations(range(chart.dimension), degree))
        monomials = monomials_up_to(chart.dimension, coefficient_bound)
        elements = tuple((idx, mono) for idx in indices for mono in monomials)
        return cls(chart, variance, degree, coefficient_bound, elements)

    def __len__(self) -> int:
        return len(self.elements)

    def positions(self) -> dict[tuple[Index, Exponent], int]:
        return {element: i for i, element in enumerate(self.elements)}

    def tensor_of(self, position: int) -> GradedTensor:
        idx, mono = self.elements[position]
        coeff = Polynomial.monomial(self.chart.coordinates, mono)
        return GradedTensor(self.chart, self.variance, self.degree, {idx: coeff})

    def to_coordinates(self, tensor: GradedTensor) -> list[Fraction]:
        """Coordinate vector of a tensor; raises if it lies outside the basis."""
        if tensor.chart != self.chart or tensor.variance != self.variance:
            raise ValueError("tensor does not match the basis chart/variance")
        if tensor.degree != self.degree and not tensor.is_zero():
            raise ValueError("tensor degree does not match the basis")
        vec = [Fraction(0)] * len(self.elements)
        pos = self.positions()
        for idx, value in tensor.components.items():
            poly = value.as_polynomial()
            for exponent, coeff in poly.terms.items():
                key = (idx, exponent)
                at = pos.get(key)
                if at is None:
                    raise ValueError(
                        f"component {idx} monomial {exponent} exceeds the "
                        f"coefficient bound {self.coefficient_bound}")
                vec[at] = coeff
        return vec

    def from_coordinates(self, vector: Sequence[Fraction]) -> GradedTensor:
        if len(vector) != len(self.elements):
            raise ValueError("coordinate vector has the wrong length")
        components: dict[Index, dict[Exponent, Fraction]] = {}
        for (idx, mono), coeff in zip(self.elements, vector):
            if coeff == 0:
                continue
            components.setdefault(idx, {})[mono] = coeff
        return GradedTensor(self.chart, self.variance, self.degree, {
            idx: Polynomial(self.chart.coordinates, terms)
            for idx, terms in components.items()})


@dataclass(frozen=True)
class TruncatedOperator:
    """Exact matrix of a linear map between two truncated bases."""

    domain: TruncatedBasis
    codomain: TruncatedBasis
    matrix: ExactMatrix

    @classmethod
    def build(cls, domain: TruncatedBasis, codomain: TruncatedBasis,
              mapping: Callable[[GradedTensor], GradedTensor]) -> "TruncatedOperator":
        matrix = ExactMatrix(len(codomain), len(domain))
        pos = codomain.positions()
        for j in range(len(domain)):
            image = mapping(domain.tensor_of(j))
            if image.is_zero():
                continue
            for idx, value in image.components.items():
                poly = value.as_polynomial()
                for exponent, coeff in poly.terms.items():
                    at = pos.get((idx, exponent))
                    if at is None:
                        raise ValueError(
                            "operator image leaves the codomain basis at "
                            f"component {idx}, monomial {exponent}")
                    matrix.set(at, j, coeff)
        return cls(domain, codomain, matrix)

    def compose(self, inner: "TruncatedOperator") -> "TruncatedOperator":
        """self after inner; matrices multiply in the same order."""
        if inner.codomain is not self.domain and inner.codomain != self.domain:
            raise ValueError("operators are not composable")
        return TruncatedOperator(inner.domain, self.codomain,
                                 self.matrix.matmul(inner.matrix))

    def apply(self, tensor: GradedTensor) -> GradedTensor:
        vec = self.domain.to_coordinates(tensor)
        return self.codomain.from_coordinates(self.matrix.apply(vec))


Label = tuple[Index, Exponent]


class LabelledSystem:
    """Linear system whose rows are (component index, monomial) equations."""

    def __init__(self):
        self.labels: list[Label] = []
        self.positions: dict[Label, int] = {}

    def row(self, label: Label) -> int:
        pos = self.positions.get(label)
        if pos is None:
            pos = len(self.labels)
            self.positions[label] = pos
            self.labels.append(label)
        return pos


def solve_in_span(images: Sequence[GradedTensor],
                  target: GradedTensor) -> tuple[tuple[Fraction, ...] | None,
                                                 tuple[tuple[Label, Fraction], ...] | None]:
    """Solve target = sum c_i images_i exactly.

    Images must be polynomial; the target may have rational-function
    components, in which case each component equation is multiplied through
    by its denominator.  Returns (coefficients, None) when solvable, else
    (None, certificate) with a labelled left-kernel functional separating
    the target from the span.
    """
    system = LabelledSystem()
    denominators: dict[Index, Polynomial] = {}
    target_rows: dict[int, Fraction] = {}
    for idx, value in target.components.items():
        denominators[idx] = value.denominator
        for exponent, coeff in value.numerator.terms.items():
            target_rows[system.row((idx, exponent))] = coeff

    columns: list[dict[int, Fraction]] = []
    for image in images:
        entries: dict[int, Fraction] = {}
        for idx, value in image.components.items():
            poly = value.as_polynomial()
            den = denominators.get(idx)
            if den is not None and not den.is_one():
                poly = poly * den
            for exponent, coeff in poly.terms.items():
                entries[system.row((idx, exponent))] = coeff
        columns.append(entries)

    matrix = ExactMatrix(len(system.labels), len(columns))
    for j, entries in enumerate(columns):
        for i, coeff in entries.items():
            matrix.set(i, j, coeff)
    rhs = [target_rows.get(i, Fraction(0)) for i in range(len(system.labels))]
    outcome = matrix.solve(rhs)
    if outcome.feasible:
        return outcome.solution, None
    assert outcome.certificate is not None
    certificate = tuple((label, weight) for label, weight
                        in zip(system.labels, outcome.certificate) if weight != 0)
    return None, certificate


def ker_sharp_basis(structure: NambuStructure, degree: int,
                    degree_bound: int) -> list[GradedTensor]:
    """Exact basis of the bounded-degree kernel of the degree-k bundle map."""
    if not 0 <= degree <= structure.order:
        raise ValueError("form degree out of range 0..n")
    chart = structure.chart
    domain = TruncatedBasis.build(chart, FORM, degree, degree_bound)
    codomain = TruncatedBasis.build(chart, MULTIVECTOR, structure.order - degree,
                                    degree_bound + max(structure.coefficient_degree(), 0))
    operator = TruncatedOperator.build(domain, codomain,
                                       lambda form: sharp(structure, degree, form))
    return [domain.from_coordinates(vec) for vec in operator.matrix.nullspace()]
