"""Degree-truncated (co)homology computations, exactly over Q.

Every dimension reported here names its coefficient-degree bound: the
underlying spaces are infinite-dimensional, and the honest computable
statement is a dimension that is stable across a window of bounds.  Degree
bookkeeping is strict throughout: operator codomains are enumerated wide
enough to contain every image, never clipping silently, and quotients are
computed as dim(cocycles) - dim(coboundary span) with explicit containment
assertions.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .algebra import ExactMatrix, Polynomial, RationalFunction, matrix_from_columns
from .exterior import (
    FORM,
    MULTIVECTOR,
    Chart,
    GradedTensor,
    apply_vector,
    contract_form,
    differential,
    ext_d,
    pair,
    wedge,
    wedge_all,
)
from .modular import VolumeSpec, delta, modular_tensor
from .structures import NambuStructure, leibniz_bracket, sharp
from .truncation import (
    Label,
    LabelledSystem,
    TruncatedBasis,
    TruncatedOperator,
    ker_sharp_basis,
    monomials_up_to,
    solve_in_span,
)


# -- shared linear-algebra helpers --------------------------------------------

def _rank_of_vectors(vectors: list[list[Fraction]], length: int) -> int:
    if not vectors:
        return 0
    return matrix_from_columns(vectors, length).rank()


def _span_rank_extension(base: list[list[Fraction]], candidates: list[list[Fraction]],
                         length: int) -> list[int]:
    """Indices of candidates that extend the rank of the base span, greedily."""
    chosen: list[int] = []
    current = list(base)
    rank = _rank_of_vectors(current, length)
    for pos, vec in enumerate(candidates):
        trial = current + [vec]
        trial_rank = _rank_of_vectors(trial, length)
        if trial_rank > rank:
            chosen.append(pos)
            current = trial
            rank = trial_rank
    return chosen


# -- foliated cohomology -------------------------------------------------------

@dataclass(frozen=True)
class TruncatedDimension:
    """A dimension at a named coefficient bound, with a stabilization signal."""

    degree: int
    bound: int
    dimension: int
    previous_dimension: int | None

    @property
    def stabilized(self) -> bool:
        return self.previous_dimension is not None and \
            self.previous_dimension == self.dimension


def _foliated_dimension_at(structure: NambuStructure, degree: int, bound: int) -> int:
    chart = structure.chart
    n = structure.order
    domain = TruncatedBasis.build(chart, FORM, degree, bound)
    spread = max(structure.coefficient_degree(), 0)

    if degree < n:
        codomain = TruncatedBasis.build(chart, MULTIVECTOR, n - degree - 1, bound + spread)
        cocycle_op = TruncatedOperator.build(
            domain, codomain,
            lambda form: sharp(structure, degree + 1, ext_d(form)))
        cocycles = [list(v) for v in cocycle_op.matrix.nullspace()]
    else:
        cocycle_op = None
        cocycles = [list(ExactMatrix.identity(len(domain)).column(j))
                    for j in range(len(domain))]

    boundary_vectors: list[list[Fraction]] = []
    if degree >= 1:
        previous = TruncatedBasis.build(chart, FORM, degree - 1, bound + 1)
        for j in range(len(previous)):
            image = ext_d(previous.tensor_of(j))
            boundary_vectors.append(domain.to_coordinates(image))
    kernel_op = TruncatedOperator.build(
        domain,
        TruncatedBasis.build(chart, MULTIVECTOR, n - degree, bound + spread),
        lambda form: sharp(structure, degree, form))
    boundary_vectors.extend(list(v) for v in kernel_op.matrix.nullspace())

    if cocycle_op is not None:
        for vec in boundary_vectors:
            if any(v != 0 for v in cocycle_op.matrix.apply(vec)):
                raise RuntimeError("coboundary vector escapes the cocycle space; "
                                   "degree bookkeeping is inconsistent")

    return len(cocycles) - _rank_of_vectors(boundary_vectors, len(domain))


def foliated_cohomology_dim(structure: NambuStructure, degree: int,
                            bound: int) -> TruncatedDimension:
    """Dimension of the truncated foliated cohomology at one degree.

    Cochains are bounded-coefficient forms modulo the kernel of the bundle
    map; the differential is the one induced by the exterior derivative.
    The value at bound-1 is recomputed as a stabilization signal.
    """
    if not 0 <= degree <= structure.order:
        raise ValueError("cohomology degree out of range 0..n")
    if bound < 0:
        raise ValueError("coefficient bound must be non-negative")
    dimension = _foliated_dimension_at(structure, degree, bound)
    previous = _foliated_dimension_at(structure, degree, bound - 1) if bound >= 1 else None
    return TruncatedDimension(degree, bound, dimension, previous)


# -- top-order cohomology (chart dimension equals the order) --------------------

def np_cocycle_check_top(coefficient: Polynomial, one_form: GradedTensor) -> GradedTensor:
    """Residual of the top-order cocycle condition f da - df ^ a; zero passes."""
    chart = one_form.chart
    if one_form.variance != FORM or one_form.degree != 1:
        raise ValueError("the cocycle condition applies to 1-forms")
    if coefficient.variables != chart.coordinates:
        raise ValueError("coefficient does not live on the form's chart")
    f = chart.scalar(coefficient)
    return ext_d(one_form).scale(f) - wedge(differential(chart, coefficient), one_form)


@dataclass(frozen=True)
class TopH1Report:
    """Truncated first cohomology of a top-order structure.

    cocycle_dimension and coboundary_dimension are the two sides of the
    quotient; representatives spans a complement of the coboundaries inside
    the cocycles, so its length equals dimension.
    """

    bound: int
    dimension: int
    cocycle_dimension: int
    coboundary_dimension: int
    representatives: tuple[GradedTensor, ...]


def np_h1_top(coefficient: Polynomial, bound: int) -> TopH1Report:
    """Cocycles f da = df ^ a modulo coboundaries f dg, at one degree bound."""
    deg_f = max(coefficient.total_degree(), 0)
    if coefficient.is_zero():
        raise ValueError("the top coefficient must be non-zero")
    if bound < deg_f - 1:
        raise ValueError(f"bound {bound} is below deg(f) - 1 = {deg_f - 1}")
    chart = Chart(coefficient.variables)
    domain = TruncatedBasis.build(chart, FORM, 1, bound)
    codomain = TruncatedBasis.build(chart, FORM, 2, bound + max(deg_f - 1, 0))
    cocycle_op = TruncatedOperator.build(
        domain, codomain, lambda form: np_cocycle_check_top(coefficient, form))
    cocycles = [list(v) for v in cocycle_op.matrix.nullspace()]

    coboundaries: list[list[Fraction]] = []
    f_scalar = chart.scalar(coefficient)
    for exponent in monomials_up_to(chart.dimension, bound + 1 - deg_f):
        if sum(exponent) == 0:
            continue
        generator = differential(chart, Polynomial.monomial(chart.coordinates, exponent))
        vector = domain.to_coordinates(generator.scale(f_scalar))
        # every coboundary is a cocycle; assert rather than assume
        if any(v != 0 for v in cocycle_op.matrix.apply(vector)):
            raise RuntimeError("coboundary f*dg fails the cocycle condition")
        coboundaries.append(vector)

    boundary_rank = _rank_of_vectors(coboundaries, len(domain))
    chosen = _span_rank_extension(coboundaries, cocycles, len(domain))
    representatives = tuple(domain.from_coordinates(cocycles[pos]) for pos in chosen)
    dimension = len(cocycles) - boundary_rank
    if len(representatives) != dimension:
        raise RuntimeError("complement extraction does not match the quotient dimension")
    return TopH1Report(
        bound=bound,
        dimension=dimension,
        cocycle_dimension=len(cocycles),
        coboundary_dimension=boundary_rank,
        representatives=representatives)


# -- canonical homology ----------------------------------------------------------

def _is_polynomial_multiple(candidate: GradedTensor, generator: GradedTensor) -> bool:
    """Whether candidate = h * generator for a single polynomial h."""
    if generator.is_zero():
        return candidate.is_zero()
    reference = next(iter(sorted(generator.components)))
    numerator = candidate.components.get(reference)
    if numerator is None:
        return candidate.is_zero()
    factor = generator.components[reference].as_polynomial().divides_exactly(
        numerator.as_polynomial())
    if factor is None:
        return False
    return candidate == generator.scale(factor)


def reduce_annihilators(forms: list[GradedTensor]) -> list[GradedTensor]:
    """Drop kernel elements that are polynomial multiples of kept ones.

    Contraction is function-linear in the form, so a multiple imposes an
    implied constraint; pruning it changes nothing in any tangency test but
    collapses the bounded kernel to the module generators it actually has.
    """
    def coefficient_degree(form: GradedTensor) -> int:
        return max((v.as_polynomial().total_degree() for v in form.components.values()),
                   default=0)

    kept: list[GradedTensor] = []
    for form in sorted(forms, key=coefficient_degree):
        if any(_is_polynomial_multiple(form, generator) for generator in kept):
            continue
        kept.append(form)
    return kept


def _tangent_chain_vectors(structure: NambuStructure, degree: int, bound: int,
                           annihilators: list[GradedTensor],
                           ) -> tuple[TruncatedBasis, list[list[Fraction]]]:
    """Coordinate basis of bounded-degree multivectors killed by the given
    annihilator 1-forms of the structure; degree 0 is unconstrained."""
    chart = structure.chart
    domain = TruncatedBasis.build(chart, MULTIVECTOR, degree, bound)
    if not annihilators or degree == 0:
        identity = ExactMatrix.identity(len(domain))
        return domain, [list(identity.column(j)) for j in range(len(domain))]
    anni_bound = max(a.components[idx].as_polynomial().total_degree()
                     for a in annihilators for idx in a.components)
    codomain = TruncatedBasis.build(chart, MULTIVECTOR, degree - 1,
                                    bound + max(anni_bound, 0))
    rows: list[dict[int, Fraction]] = []
    for annihilator in annihilators:
        block = TruncatedOperator.build(
            domain, codomain, lambda field, a=annihilator: contract_form(a, field)).matrix
        rows.extend(block.row_dicts())
    stacked = ExactMatrix(len(rows), len(domain), rows)
    return domain, [list(v) for v in stacked.nullspace()]


def canonical_homology_dim(structure: NambuStructure, volume: VolumeSpec,
                           degree: int, bound: int) -> int:
    """Truncated homology of the boundary on tangent multivectors.

    Chains at the named bound; the incoming image is taken from bound+1
    chains so that the quotient is well-posed.  The volume must have weight
    zero and constant coefficient: anything else pushes chains outside every
    finite monomial truncation, and the homology is volume-independent anyway.
    """
    n = structure.order
    if not 0 <= degree <= n:
        raise ValueError("homology degree out of range 0..n")
    if not volume.weight.is_zero() or not volume.coefficient.is_constant():
        raise ValueError("truncated homology needs a constant-coefficient, "
                         "weight-free volume")
    chart = structure.chart
    annihilators = reduce_annihilators(ker_sharp_basis(structure, 1, bound))

    domain, chains = _tangent_chain_vectors(structure, degree, bound, annihilators)
    if degree >= 1:
        target = TruncatedBasis.build(chart, MULTIVECTOR, degree - 1, max(bound - 1, 0))
        images = [target.to_coordinates(delta(volume, domain.from_coordinates(vec)))
                  for vec in chains]
        kernel_dim = len(chains) - _rank_of_vectors(images, len(target))
    else:
        kernel_dim = len(chains)

    incoming_rank = 0
    if degree + 1 <= n:
        above_annihilators = reduce_annihilators(ker_sharp_basis(structure, 1, bound + 1))
        above, above_chains = _tangent_chain_vectors(structure, degree + 1, bound + 1,
                                                     above_annihilators)
        incoming: list[list[Fraction]] = []
        for vec in above_chains:
            image = delta(volume, above.from_coordinates(vec))
            if image.degree >= 1 and any(not contract_form(a, image).is_zero()
                                         for a in annihilators):
                raise RuntimeError("boundary image left the tangent chain space")
            incoming.append(domain.to_coordinates(image))
        incoming_rank = _rank_of_vectors(incoming, len(domain))
    return kernel_dim - incoming_rank


# -- the modular obstruction to the image subcomplex -----------------------------

@dataclass(frozen=True)
class SubcomplexReport:
    """Membership of the modular tensor in the degree-1 bundle image.

    A yes carries the witness 1-form; a no carries a labelled left-kernel
    certificate proving that no bounded-degree witness exists.
    """

    is_subcomplex: bool
    bound: int
    witness: GradedTensor | None
    certificate: tuple[tuple[Label, Fraction], ...] | None


def subcomplex_check(structure: NambuStructure, volume: VolumeSpec,
                     bound: int) -> SubcomplexReport:
    """Decide whether the modular tensor is sharp of a bounded-degree 1-form."""
    if bound < 0:
        raise ValueError("degree bound must be non-negative")
    chart = structure.chart
    tensor = modular_tensor(structure, volume)
    domain = TruncatedBasis.build(chart, FORM, 1, bound)
    images = [sharp(structure, 1, domain.tensor_of(j)) for j in range(len(domain))]
    solution, certificate = solve_in_span(images, tensor)
    if solution is not None:
        witness = domain.from_coordinates(solution)
        return SubcomplexReport(True, bound, witness, None)
    return SubcomplexReport(False, bound, None, certificate)


# -- polynomial decomposition helpers (two- and three-variable) -------------------

@dataclass(frozen=True)
class PairDecomposition:
    applicable: bool
    hypothesis_residual: Polynomial | None
    a: Fraction | None = None
    b: Fraction | None = None
    p_tilde: Polynomial | None = None
    q_tilde: Polynomial | None = None


def naka_pair(p: Polynomial, q: Polynomial) -> PairDecomposition:
    """Split a two-variable pair along (a x1 + b x2, -b x1 + a x2) plus
    multiples of x1^2 + x2^2 with cross-derivative-compatible cofactors.

    Applies when (x1^2+x2^2)(d2 P - d1 Q) = 2(P x2 - Q x1); the split is
    found by exact linear solve and re-verified by substitution.
    """
    if len(p.variables) != 2 or p.variables != q.variables:
        raise ValueError("expected two polynomials in the same two variables")
    names = p.variables
    v1 = Polynomial.variable(names, 0)
    v2 = Polynomial.variable(names, 1)
    radius = v1 * v1 + v2 * v2
    residual = radius * (p.diff(1) - q.diff(0)) - 2 * (p * v2 - q * v1)
    if not residual.is_zero():
        return PairDecomposition(False, residual)

    tilde_bound = max(p.total_degree(), q.total_degree()) - 2
    monomials = monomials_up_to(2, tilde_bound) if tilde_bound >= 0 else []

    def unknown_split(values):
        a, b = values[0], values[1]
        half = len(monomials)
        pt = Polynomial(names, dict(zip(monomials, values[2:2 + half])))
        qt = Polynomial(names, dict(zip(monomials, values[2 + half:2 + 2 * half])))
        return a, b, pt, qt

    columns = []
    targets = [p, q, Polynomial.zero(names)]

    def equation_vector(a, b, pt, qt):
        return [a * v1 + b * v2 + radius * pt,
                -b * v1 + a * v2 + radius * qt,
                pt.diff(1) - qt.diff(0)]

    unknown_count = 2 + 2 * len(monomials)
    for pos in range(unknown_count):
        probe = [Fraction(0)] * unknown_count
        probe[pos] = Fraction(1)
        columns.append(equation_vector(*unknown_split(probe)))

    system = LabelledSystem()
    rhs_rows: dict[int, Fraction] = {}
    for eq_index, target in enumerate(targets):
        for exponent, coeff in target.terms.items():
            rhs_rows[system.row(((eq_index,), exponent))] = coeff
    column_entries = []
    for column in columns:
        entries = {}
        for eq_index, poly in enumerate(column):
            for exponent, coeff in poly.terms.items():
                entries[system.row(((eq_index,), exponent))] = coeff
        column_entries.append(entries)
    matrix = ExactMatrix(len(system.labels), unknown_count)
    for j, entries in enumerate(column_entries):
        for i, coeff in entries.items():
            matrix.set(i, j, coeff)
    outcome = matrix.solve([rhs_rows.get(i, Fraction(0)) for i in range(len(system.labels))])
    if not outcome.feasible:
        raise RuntimeError("decomposition solve failed although the hypothesis holds")
    a, b, pt, qt = unknown_split(list(outcome.solution))
    checks = equation_vector(a, b, pt, qt)
    if checks[0] != p or checks[1] != q or not checks[2].is_zero():
        raise RuntimeError("decomposition re-substitution mismatch")
    return PairDecomposition(True, None, a, b, pt, qt)


@dataclass(frozen=True)
class TripleDecomposition:
    applicable: bool
    failed_relation: str | None
    a: Fraction | None = None
    tildes: tuple[Polynomial, Polynomial, Polynomial] | None = None


def naka_triple(a_poly: Polynomial, b_poly: Polynomial,
                c_poly: Polynomial) -> TripleDecomposition:
    """Three-variable analogue of ``naka_pair`` along the radius x1^2+x2^2+x3^2.

    The third compatibility relation is the derived form 2(B x3 - C x2); when
    inputs satisfy the variant with A in place of B instead, the report names
    that explicitly.
    """
    if len(a_poly.variables) != 3 or not (a_poly.variables == b_poly.variables
                                          == c_poly.variables):
        raise ValueError("expected three polynomials in the same three variables")
    names = a_poly.variables
    v1, v2, v3 = (Polynomial.variable(names, i) for i in range(3))
    radius = v1 * v1 + v2 * v2 + v3 * v3
    relations = [
        ("first", radius * (a_poly.diff(1) - b_poly.diff(0)) - 2 * (a_poly * v2 - b_poly * v1)),
        ("second", radius * (a_poly.diff(2) - c_poly.diff(0)) - 2 * (a_poly * v3 - c_poly * v1)),
        ("third", radius * (b_poly.diff(2) - c_poly.diff(1)) - 2 * (b_poly * v3 - c_poly * v2)),
    ]
    for name, residual in relations:
        if not residual.is_zero():
            if name == "third":
                variant = radius * (b_poly.diff(2) - c_poly.diff(1)) \
                    - 2 * (a_poly * v3 - c_poly * v2)
                if variant.is_zero():
                    name = "third (only its A-for-B variant holds)"
            return TripleDecomposition(False, name)

    tilde_bound = max(a_poly.total_degree(), b_poly.total_degree(),
                      c_poly.total_degree()) - 2
    monomials = monomials_up_to(3, tilde_bound) if tilde_bound >= 0 else []
    block = len(monomials)

    def unknown_split(values):
        a = values[0]
        polys = [Polynomial(names, dict(zip(monomials, values[1 + i * block:1 + (i + 1) * block])))
                 for i in range(3)]
        return a, polys[0], polys[1], polys[2]

    def equation_vector(a, at, bt, ct):
        return [a * v1 + radius * at,
                a * v2 + radius * bt,
                a * v3 + radius * ct,
                at.diff(1) - bt.diff(0),
                at.diff(2) - ct.diff(0),
                bt.diff(2) - ct.diff(1)]

    zero = Polynomial.zero(names)
    targets = [a_poly, b_poly, c_poly, zero, zero, zero]
    unknown_count = 1 + 3 * block
    system = LabelledSystem()
    rhs_rows: dict[int, Fraction] = {}
    for eq_index, target in enumerate(targets):
        for exponent, coeff in target.terms.items():
            rhs_rows[system.row(((eq_index,), exponent))] = coeff
    column_entries = []
    for pos in range(unknown_count):
        probe = [Fraction(0)] * unknown_count
        probe[pos] = Fraction(1)
        entries = {}
        for eq_index, poly in enumerate(equation_vector(*unknown_split(probe))):
            for exponent, coeff in poly.terms.items():
                entries[system.row(((eq_index,), exponent))] = coeff
        column_entries.append(entries)
    matrix = ExactMatrix(len(system.labels), unknown_count)
    for j, entries in enumerate(column_entries):
        for i, coeff in entries.items():
            matrix.set(i, j, coeff)
    outcome = matrix.solve([rhs_rows.get(i, Fraction(0)) for i in range(len(system.labels))])
    if not outcome.feasible:
        raise RuntimeError("decomposition solve failed although the relations hold")
    a, at, bt, ct = unknown_split(list(outcome.solution))
    checks = equation_vector(a, at, bt, ct)
    expected = [a_poly, b_poly, c_poly]
    if checks[:3] != expected or any(not r.is_zero() for r in checks[3:]):
        raise RuntimeError("decomposition re-substitution mismatch")
    return TripleDecomposition(True, None, a, (at, bt, ct))


# -- duality report ---------------------------------------------------------------

@dataclass(frozen=True)
class DualityRow:
    degree: int
    np_dimension: int | None
    foliated_dimension: int
    canonical_degree: int
    canonical_dimension: int

    @property
    def comparable(self) -> bool:
        return self.np_dimension is not None

    @property
    def matches(self) -> bool | None:
        if self.np_dimension is None:
            return None
        return (self.np_dimension == self.canonical_dimension
                and self.np_dimension == self.foliated_dimension)


@dataclass(frozen=True)
class DualityReport:
    bound: int
    rows: tuple[DualityRow, ...]
    holds: bool

    @property
    def verdict(self) -> str:
        if self.holds:
            return f"duality holds at bound {self.bound}"
        return "duality FAILS"


def duality_report(structure: NambuStructure, volume: VolumeSpec,
                   bound: int) -> DualityReport:
    """Compare truncated cohomology dimensions against homology in dual degree.

    The cohomology column comes from the top-order quotient description at
    degree one when the chart dimension equals the order, and from the
    foliated dimensions when the structure tensor is constant (the regular
    normal form); degrees with no finite presentation stay blank and are not
    compared.  Degree zero always agrees with the foliated value because both
    kernels are cut out by the same annihilator condition.
    """
    n = structure.order
    constant_structure = all(v.as_polynomial().is_constant()
                             for v in structure.tensor.components.values())
    rows = []
    holds = True
    for degree in range(n + 1):
        foliated = foliated_cohomology_dim(structure, degree, bound).dimension
        canonical_degree = n - degree
        canonical = canonical_homology_dim(structure, volume, canonical_degree, bound)
        np_dim: int | None
        if degree == 0:
            np_dim = foliated
        elif structure.is_top_order and degree == 1:
            np_dim = np_h1_top(structure.top_coefficient(), bound).dimension
        elif constant_structure:
            np_dim = foliated
        else:
            np_dim = None
        row = DualityRow(degree, np_dim, foliated, canonical_degree, canonical)
        if row.matches is False:
            holds = False
        rows.append(row)
    return DualityReport(bound, tuple(rows), holds)


# -- form-represented cochains of the algebroid complex ---------------------------

def form_cochain_value(structure: NambuStructure, form: GradedTensor,
                       arguments: list[GradedTensor]) -> RationalFunction:
    """Value of the cochain represented by a k-form on k bracket arguments."""
    if form.degree != len(arguments):
        raise ValueError("argument count must match the form degree")
    if not arguments:
        return form.scalar_value()
    n = structure.order
    fields = [sharp(structure, n - 1, argument) for argument in arguments]
    return pair(form, wedge_all(fields))


def form_cochain_coboundary(structure: NambuStructure, form: GradedTensor,
                            arguments: list[GradedTensor]) -> RationalFunction:
    """The algebroid coboundary of a form-represented cochain, evaluated.

    Anchor terms act through the bundle map; bracket terms replace the later
    argument in place, with the sign convention of the non-skew complex.
    """
    k = form.degree
    if len(arguments) != k + 1:
        raise ValueError("coboundary evaluation needs k+1 arguments")
    n = structure.order
    total = structure.chart.scalar(0)
    for i, argument in enumerate(arguments):
        rest = arguments[:i] + arguments[i + 1:]
        value = form_cochain_value(structure, form, rest)
        term = apply_vector(sharp(structure, n - 1, argument), value)
        if i % 2:
            term = -term
        total = total + term
    for i in range(k + 1):
        for j in range(i + 1, k + 1):
            bracket = leibniz_bracket(structure, arguments[i], arguments[j])
            reduced = arguments[:i] + arguments[i + 1:]
            reduced[j - 1] = bracket
            value = form_cochain_value(structure, form, reduced)
            if (i - 1) % 2:
                value = -value
            total = total + value
    return total
