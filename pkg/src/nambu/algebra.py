"""Exact multivariate polynomial, rational-function and linear algebra over Q.

A polynomial is a sparse map from exponent tuples to ``Fraction`` coefficients;
the zero polynomial is the empty map.  Everything here is exact: no floating
point enters any computation, so kernel dimensions and identity checks are
trustworthy.  The canonical term order is graded lexicographic (total degree
first, then the exponent tuple), which fixes serialization and report output.

Rational functions are reduced pairs of polynomials.  Reduction cancels the
rational content, common monomial factors and exact polynomial divisors; full
multivariate GCD reduction is deliberately not attempted, because equality is
decided by cross-multiplication and is therefore independent of the chosen
representative.

The matrix layer is a sparse row-dict Gauss-Jordan elimination with an
attached transform, which yields exact nullspace bases and, for inconsistent
systems, an explicit infeasibility certificate (a left-kernel row ``y`` with
``y*A = 0`` and ``y*b != 0``).
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

Exponent = tuple[int, ...]

ZERO = Fraction(0)
ONE = Fraction(1)


def _as_fraction(value: int | Fraction) -> Fraction:
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    raise TypeError(f"expected an exact rational, got {type(value).__name__}")


def grlex_key(exponent: Exponent) -> tuple[int, Exponent]:
    """Sort key of a monomial in graded lexicographic order."""
    return (sum(exponent), exponent)


class Polynomial:
    """Sparse multivariate polynomial with Fraction coefficients.

    Instances are immutable by convention: no method mutates ``terms`` after
    construction, so values may be shared freely between threads.
    """

    __slots__ = ("variables", "terms")

    def __init__(self, variables: Sequence[str], terms: dict[Exponent, Fraction] | None = None):
        names = tuple(variables)
        if len(set(names)) != len(names):
            raise ValueError(f"duplicate variable names: {names}")
        self.variables = names
        clean: dict[Exponent, Fraction] = {}
        if terms:
            m = len(names)
            for exponent, coeff in terms.items():
                if len(exponent) != m:
                    raise ValueError(f"exponent {exponent} has wrong length for {m} variables")
                c = _as_fraction(coeff)
                if c != 0:
                    clean[tuple(exponent)] = c
        self.terms = clean

    # -- constructors ------------------------------------------------------

    @classmethod
    def zero(cls, variables: Sequence[str]) -> "Polynomial":
        return cls(variables, {})

    @classmethod
    def constant(cls, variables: Sequence[str], value: int | Fraction) -> "Polynomial":
        c = _as_fraction(value)
        if c == 0:
            return cls(variables, {})
        return cls(variables, {(0,) * len(tuple(variables)): c})

    @classmethod
    def variable(cls, variables: Sequence[str], index: int) -> "Polynomial":
        names = tuple(variables)
        if not 0 <= index < len(names):
            raise IndexError(f"variable index {index} out of range for {len(names)} variables")
        exponent = [0] * len(names)
        exponent[index] = 1
        return cls(names, {tuple(exponent): ONE})

    @classmethod
    def monomial(cls, variables: Sequence[str], exponent: Exponent,
                 coeff: int | Fraction = 1) -> "Polynomial":
        return cls(variables, {tuple(exponent): _as_fraction(coeff)})

    # -- predicates --------------------------------------------------------

    def is_zero(self) -> bool:
        return not self.terms

    def is_constant(self) -> bool:
        return all(sum(e) == 0 for e in self.terms)

    def is_one(self) -> bool:
        return self.terms == {(0,) * len(self.variables): ONE}

    def constant_value(self) -> Fraction:
        if not self.terms:
            return ZERO
        if not self.is_constant():
            raise ValueError(f"{self} is not constant")
        return next(iter(self.terms.values()))

    def total_degree(self) -> int:
        """Total degree; -1 for the zero polynomial."""
        if not self.terms:
            return -1
        return max(sum(e) for e in self.terms)

    # -- arithmetic --------------------------------------------------------

    def _coerce(self, other) -> "Polynomial | None":
        if isinstance(other, Polynomial):
            if other.variables != self.variables:
                raise ValueError(
                    f"variable lists differ: {self.variables} vs {other.variables}")
            return other
        if isinstance(other, (int, Fraction)):
            return Polynomial.constant(self.variables, other)
        return None

    def __add__(self, other) -> "Polynomial":
        rhs = self._coerce(other)
        if rhs is None:
            return NotImplemented
        out = dict(self.terms)
        for exponent, coeff in rhs.terms.items():
            acc = out.get(exponent, ZERO) + coeff
            if acc == 0:
                out.pop(exponent, None)
            else:
                out[exponent] = acc
        result = Polynomial.__new__(Polynomial)
        result.variables = self.variables
        result.terms = out
        return result

    __radd__ = __add__

    def __neg__(self) -> "Polynomial":
        result = Polynomial.__new__(Polynomial)
        result.variables = self.variables
        result.terms = {e: -c for e, c in self.terms.items()}
        return result

    def __sub__(self, other) -> "Polynomial":
        rhs = self._coerce(other)
        if rhs is None:
            return NotImplemented
        return self + (-rhs)

    def __rsub__(self, other) -> "Polynomial":
        rhs = self._coerce(other)
        if rhs is None:
            return NotImplemented
        return rhs + (-self)

    def __mul__(self, other) -> "Polynomial":
        rhs = self._coerce(other)
        if rhs is None:
            return NotImplemented
        out: dict[Exponent, Fraction] = {}
        for ea, ca in self.terms.items():
            for eb, cb in rhs.terms.items():
                exponent = tuple(x + y for x, y in zip(ea, eb))
                acc = out.get(exponent, ZERO) + ca * cb
                if acc == 0:
                    out.pop(exponent, None)
                else:
                    out[exponent] = acc
        result = Polynomial.__new__(Polynomial)
        result.variables = self.variables
        result.terms = out
        return result

    __rmul__ = __mul__

    def __pow__(self, power: int) -> "Polynomial":
        if not isinstance(power, int) or power < 0:
            raise ValueError("polynomial powers must be non-negative integers")
        result = Polynomial.constant(self.variables, 1)
        base = self
        n = power
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def __eq__(self, other) -> bool:
        if isinstance(other, (int, Fraction)):
            other = Polynomial.constant(self.variables, other)
        if not isinstance(other, Polynomial):
            return NotImplemented
        return self.variables == other.variables and self.terms == other.terms

    def __hash__(self) -> int:
        return hash((self.variables, frozenset(self.terms.items())))

    # -- calculus and evaluation -------------------------------------------

    def diff(self, index: int) -> "Polynomial":
        """Formal partial derivative with respect to variable ``index``."""
        if not 0 <= index < len(self.variables):
            raise IndexError(f"variable index {index} out of range")
        out: dict[Exponent, Fraction] = {}
        for exponent, coeff in self.terms.items():
            k = exponent[index]
            if k == 0:
                continue
            lowered = list(exponent)
            lowered[index] = k - 1
            out[tuple(lowered)] = coeff * k
        return Polynomial(self.variables, out)

    def evaluate(self, point: Sequence[int | Fraction]) -> Fraction:
        """Exact value at a rational point."""
        values = [_as_fraction(v) for v in point]
        if len(values) != len(self.variables):
            raise ValueError("wrong number of coordinates")
        total = ZERO
        for exponent, coeff in self.sorted_terms():
            term = coeff
            for e, v in zip(exponent, values):
                if e:
                    term *= v ** e
            total += term
        return total

    def evaluate_float(self, point: Sequence[float]) -> float:
        """Float value via Horner recursion in the fixed variable order."""
        values = list(point)
        if len(values) != len(self.variables):
            raise ValueError("wrong number of coordinates")
        return _horner(self.sorted_terms(), values, 0)

    def sorted_terms(self) -> list[tuple[Exponent, Fraction]]:
        """Terms in ascending graded lexicographic order."""
        return sorted(self.terms.items(), key=lambda item: grlex_key(item[0]))

    def divides_exactly(self, numerator: "Polynomial") -> "Polynomial | None":
        """Return ``numerator / self`` when the division is exact, else None."""
        if self.is_zero():
            return None
        if numerator.is_zero():
            return Polynomial.zero(self.variables)
        lead_e, lead_c = max(self.terms.items(), key=lambda item: grlex_key(item[0]))
        quotient: dict[Exponent, Fraction] = {}
        rest = numerator
        while not rest.is_zero():
            top_e, top_c = max(rest.terms.items(), key=lambda item: grlex_key(item[0]))
            diff = tuple(a - b for a, b in zip(top_e, lead_e))
            if any(d < 0 for d in diff):
                return None
            factor = Polynomial.monomial(self.variables, diff, top_c / lead_c)
            quotient[diff] = top_c / lead_c
            rest = rest - factor * self
        return Polynomial(self.variables, quotient)

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        pieces: list[str] = []
        for exponent, coeff in sorted(self.terms.items(),
                                      key=lambda item: grlex_key(item[0]), reverse=True):
            factors = []
            for name, e in zip(self.variables, exponent):
                if e == 1:
                    factors.append(name)
                elif e > 1:
                    factors.append(f"{name}**{e}")
            if not factors:
                body = str(abs(coeff))
            elif abs(coeff) == 1:
                body = "*".join(factors)
            else:
                body = "*".join([str(abs(coeff))] + factors)
            sign = "-" if coeff < 0 else "+"
            pieces.append((sign, body))
        first_sign, first_body = pieces[0]
        text = ("-" if first_sign == "-" else "") + first_body
        for sign, body in pieces[1:]:
            text += f" {sign} {body}"
        return text

    def __repr__(self) -> str:
        return f"Polynomial({self})"


def _horner(terms: list[tuple[Exponent, Fraction]], values: list[float], axis: int) -> float:
    """Evaluate grlex-sorted terms by nested Horner steps along one axis."""
    if not terms:
        return 0.0
    if axis == len(values):
        return float(sum(c for _, c in terms))
    groups: dict[int, list[tuple[Exponent, Fraction]]] = {}
    for exponent, coeff in terms:
        groups.setdefault(exponent[axis], []).append((exponent, coeff))
    x = values[axis]
    powers = sorted(groups, reverse=True)
    acc = _horner(groups[powers[0]], values, axis + 1)
    prev = powers[0]
    for power in powers[1:]:
        acc = acc * x ** (prev - power) + _horner(groups[power], values, axis + 1)
        prev = power
    return acc * x ** prev


def variables(names: str | Sequence[str]) -> tuple[Polynomial, ...]:
    """Convenience: build the coordinate polynomials for a space-separated list."""
    parts = tuple(names.split()) if isinstance(names, str) else tuple(names)
    return tuple(Polynomial.variable(parts, i) for i in range(len(parts)))


class RationalFunction:
    """Quotient of two polynomials over the same variables.

    The representation is normalized so that the denominator is never zero,
    has positive leading (graded-lex) coefficient, and shares no rational
    content or monomial factor with the numerator.  If the denominator divides
    the numerator exactly the quotient is stored with denominator one.
    Equality is decided by cross-multiplication, so callers never depend on
    the representative being fully reduced.
    """

    __slots__ = ("numerator", "denominator")

    def __init__(self, numerator: Polynomial, denominator: Polynomial | None = None):
        if denominator is None:
            denominator = Polynomial.constant(numerator.variables, 1)
        if numerator.variables != denominator.variables:
            raise ValueError("numerator and denominator use different variables")
        if denominator.is_zero():
            raise ZeroDivisionError("zero denominator in rational function")
        if denominator.is_one():
            self.numerator = numerator
            self.denominator = denominator
            return
        num, den = _reduce_fraction(numerator, denominator)
        self.numerator = num
        self.denominator = den

    @classmethod
    def from_scalar(cls, variables_: Sequence[str], value: int | Fraction) -> "RationalFunction":
        return cls(Polynomial.constant(variables_, value))

    @property
    def variables(self) -> tuple[str, ...]:
        return self.numerator.variables

    def is_zero(self) -> bool:
        return self.numerator.is_zero()

    def is_polynomial(self) -> bool:
        return self.denominator.is_one()

    def as_polynomial(self) -> Polynomial:
        if not self.denominator.is_one():
            raise ValueError(f"{self} is not a polynomial")
        return self.numerator

    def _coerce(self, other) -> "RationalFunction | None":
        if isinstance(other, RationalFunction):
            return other
        if isinstance(other, Polynomial):
            return RationalFunction(other)
        if isinstance(other, (int, Fraction)):
            return RationalFunction.from_scalar(self.variables, other)
        return None

    def __add__(self, other) -> "RationalFunction":
        rhs = self._coerce(other)
        if rhs is None:
            return NotImplemented
        if self.denominator.is_one() and rhs.denominator.is_one():
            return RationalFunction(self.numerator + rhs.numerator)
        return RationalFunction(
            self.numerator * rhs.denominator + rhs.numerator * self.denominator,
            self.denominator * rhs.denominator)

    __radd__ = __add__

    def __neg__(self) -> "RationalFunction":
        out = RationalFunction.__new__(RationalFunction)
        out.numerator = -self.numerator
        out.denominator = self.denominator
        return out

    def __sub__(self, other) -> "RationalFunction":
        rhs = self._coerce(other)
        if rhs is None:
            return NotImplemented
        return self + (-rhs)

    def __rsub__(self, other) -> "RationalFunction":
        rhs = self._coerce(other)
        if rhs is None:
            return NotImplemented
        return rhs + (-self)

    def __mul__(self, other) -> "RationalFunction":
        rhs = self._coerce(other)
        if rhs is None:
            return NotImplemented
        if self.denominator.is_one() and rhs.denominator.is_one():
            return RationalFunction(self.numerator * rhs.numerator)
        return RationalFunction(self.numerator * rhs.numerator,
                                self.denominator * rhs.denominator)

    __rmul__ = __mul__

    def __truediv__(self, other) -> "RationalFunction":
        rhs = self._coerce(other)
        if rhs is None:
            return NotImplemented
        if rhs.is_zero():
            raise ZeroDivisionError("division by the zero rational function")
        return RationalFunction(self.numerator * rhs.denominator,
                                self.denominator * rhs.numerator)

    def __rtruediv__(self, other) -> "RationalFunction":
        rhs = self._coerce(other)
        if rhs is None:
            return NotImplemented
        return rhs / self

    def __eq__(self, other) -> bool:
        rhs = self._coerce(other)
        if rhs is None:
            return NotImplemented
        return (self.numerator * rhs.denominator) == (rhs.numerator * self.denominator)

    def __hash__(self) -> int:
        return hash((self.numerator, self.denominator))

    def diff(self, index: int) -> "RationalFunction":
        if self.denominator.is_one():
            return RationalFunction(self.numerator.diff(index))
        return RationalFunction(
            self.numerator.diff(index) * self.denominator
            - self.numerator * self.denominator.diff(index),
            self.denominator * self.denominator)

    def evaluate_float(self, point: Sequence[float]) -> float:
        den = self.denominator.evaluate_float(point)
        return self.numerator.evaluate_float(point) / den

    def __str__(self) -> str:
        if self.denominator.is_one():
            return str(self.numerator)
        return f"({self.numerator})/({self.denominator})"

    def __repr__(self) -> str:
        return f"RationalFunction({self})"


def _reduce_fraction(num: Polynomial, den: Polynomial) -> tuple[Polynomial, Polynomial]:
    if num.is_zero():
        return num, Polynomial.constant(num.variables, 1)
    exact = den.divides_exactly(num)
    if exact is not None:
        return exact, Polynomial.constant(num.variables, 1)
    m = len(num.variables)
    shift = tuple(
        min(min(e[i] for e in num.terms), min(e[i] for e in den.terms)) for i in range(m))
    if any(shift):
        num = Polynomial(num.variables, {tuple(a - s for a, s in zip(e, shift)): c
                                         for e, c in num.terms.items()})
        den = Polynomial(den.variables, {tuple(a - s for a, s in zip(e, shift)): c
                                         for e, c in den.terms.items()})
    lead = max(den.terms.items(), key=lambda item: grlex_key(item[0]))[1]
    if lead != 1:
        inv = 1 / lead
        num = num * inv
        den = den * inv
    return num, den


@dataclass(frozen=True)
class LinearSolveResult:
    """Outcome of an exact linear solve.

    Exactly one of ``solution`` and ``certificate`` is set.  The certificate
    is a left-kernel row ``y`` of the system matrix with ``y*b != 0``, which
    proves infeasibility independently of the elimination that found it.
    """

    solution: tuple[Fraction, ...] | None
    certificate: tuple[Fraction, ...] | None

    @property
    def feasible(self) -> bool:
        return self.solution is not None


class ExactMatrix:
    """Sparse exact rational matrix with row-dict storage."""

    __slots__ = ("rows", "cols", "_rows")

    def __init__(self, rows: int, cols: int,
                 row_dicts: list[dict[int, Fraction]] | None = None):
        if rows < 0 or cols < 0:
            raise ValueError("matrix dimensions must be non-negative")
        self.rows = rows
        self.cols = cols
        if row_dicts is None:
            self._rows = [{} for _ in range(rows)]
        else:
            if len(row_dicts) != rows:
                raise ValueError("row count mismatch")
            self._rows = [dict(r) for r in row_dicts]

    @classmethod
    def from_dense(cls, entries: Sequence[Sequence[int | Fraction]]) -> "ExactMatrix":
        data = [list(row) for row in entries]
        rows = len(data)
        cols = len(data[0]) if data else 0
        out = cls(rows, cols)
        for i, row in enumerate(data):
            if len(row) != cols:
                raise ValueError("ragged rows")
            for j, value in enumerate(row):
                v = _as_fraction(value)
                if v != 0:
                    out._rows[i][j] = v
        return out

    @classmethod
    def identity(cls, n: int) -> "ExactMatrix":
        out = cls(n, n)
        for i in range(n):
            out._rows[i][i] = ONE
        return out

    def get(self, i: int, j: int) -> Fraction:
        if not (0 <= i < self.rows and 0 <= j < self.cols):
            raise IndexError("matrix index out of range")
        return self._rows[i].get(j, ZERO)

    def set(self, i: int, j: int, value: int | Fraction) -> None:
        if not (0 <= i < self.rows and 0 <= j < self.cols):
            raise IndexError("matrix index out of range")
        v = _as_fraction(value)
        if v == 0:
            self._rows[i].pop(j, None)
        else:
            self._rows[i][j] = v

    def to_dense(self) -> list[list[Fraction]]:
        return [[self._rows[i].get(j, ZERO) for j in range(self.cols)]
                for i in range(self.rows)]

    def matmul(self, other: "ExactMatrix") -> "ExactMatrix":
        if self.cols != other.rows:
            raise ValueError("inner dimensions disagree")
        out = ExactMatrix(self.rows, other.cols)
        for i, row in enumerate(self._rows):
            acc: dict[int, Fraction] = {}
            for k, a in row.items():
                for j, b in other._rows[k].items():
                    s = acc.get(j, ZERO) + a * b
                    if s == 0:
                        acc.pop(j, None)
                    else:
                        acc[j] = s
            out._rows[i] = acc
        return out

    __matmul__ = matmul

    def apply(self, vector: Sequence[Fraction]) -> list[Fraction]:
        if len(vector) != self.cols:
            raise ValueError("vector length mismatch")
        out = []
        for row in self._rows:
            out.append(sum((c * vector[j] for j, c in row.items()), ZERO))
        return out

    def _rref(self, with_transform: bool = False):
        """Gauss-Jordan elimination.

        Returns ``(pivots, reduced_rows, transform_rows)`` where ``pivots``
        maps echelon row position to pivot column.  ``transform_rows`` is a
        row-dict representation of T with ``T*A = R``; None when not asked for.
        """
        work = [dict(r) for r in self._rows]
        transform = [{i: ONE} for i in range(self.rows)] if with_transform else None
        pivots: list[int] = []
        pivot_row = 0
        for col in range(self.cols):
            sel = None
            for r in range(pivot_row, self.rows):
                if work[r].get(col):
                    sel = r
                    break
            if sel is None:
                continue
            work[pivot_row], work[sel] = work[sel], work[pivot_row]
            if transform is not None:
                transform[pivot_row], transform[sel] = transform[sel], transform[pivot_row]
            lead = work[pivot_row][col]
            if lead != 1:
                inv = 1 / lead
                work[pivot_row] = {j: v * inv for j, v in work[pivot_row].items()}
                if transform is not None:
                    transform[pivot_row] = {j: v * inv
                                            for j, v in transform[pivot_row].items()}
            pivot = work[pivot_row]
            for r in range(self.rows):
                if r == pivot_row:
                    continue
                factor = work[r].get(col)
                if not factor:
                    continue
                row = work[r]
                for j, v in pivot.items():
                    s = row.get(j, ZERO) - factor * v
                    if s == 0:
                        row.pop(j, None)
                    else:
                        row[j] = s
                if transform is not None:
                    trow = transform[r]
                    for j, v in transform[pivot_row].items():
                        s = trow.get(j, ZERO) - factor * v
                        if s == 0:
                            trow.pop(j, None)
                        else:
                            trow[j] = s
            pivots.append(col)
            pivot_row += 1
            if pivot_row == self.rows:
                break
        return pivots, work, transform

    def rank(self) -> int:
        pivots, _, _ = self._rref()
        return len(pivots)

    def nullspace(self) -> list[tuple[Fraction, ...]]:
        """Exact basis of the kernel; empty list when the kernel is trivial.

        rank + len(result) == cols always holds.  Basis vectors are indexed by
        the free columns in ascending order, each with a 1 in its free slot.
        """
        pivots, reduced, _ = self._rref()
        pivot_set = set(pivots)
        free_cols = [j for j in range(self.cols) if j not in pivot_set]
        basis = []
        for free in free_cols:
            vec = [ZERO] * self.cols
            vec[free] = ONE
            for row_pos, pivot_col in enumerate(pivots):
                coeff = reduced[row_pos].get(free)
                if coeff:
                    vec[pivot_col] = -coeff
            basis.append(tuple(vec))
        return basis

    def solve(self, rhs: Sequence[int | Fraction]) -> LinearSolveResult:
        """Solve ``A*x = b`` exactly, or certify that no solution exists."""
        b = [_as_fraction(v) for v in rhs]
        if len(b) != self.rows:
            raise ValueError("right-hand side length mismatch")
        pivots, reduced, transform = self._rref(with_transform=True)
        assert transform is not None
        tb = []
        for trow in transform:
            tb.append(sum((c * b[j] for j, c in trow.items()), ZERO))
        for r in range(len(pivots), self.rows):
            if tb[r] != 0:
                certificate = tuple(transform[r].get(j, ZERO) for j in range(self.rows))
                return LinearSolveResult(solution=None, certificate=certificate)
        x = [ZERO] * self.cols
        for row_pos, pivot_col in enumerate(pivots):
            x[pivot_col] = tb[row_pos]
        return LinearSolveResult(solution=tuple(x), certificate=None)

    def hstack(self, other: "ExactMatrix") -> "ExactMatrix":
        if self.rows != other.rows:
            raise ValueError("row counts disagree")
        out = ExactMatrix(self.rows, self.cols + other.cols)
        for i in range(self.rows):
            merged = dict(self._rows[i])
            for j, v in other._rows[i].items():
                merged[self.cols + j] = v
            out._rows[i] = merged
        return out

    def column(self, j: int) -> tuple[Fraction, ...]:
        return tuple(self._rows[i].get(j, ZERO) for i in range(self.rows))

    def row_dicts(self) -> list[dict[int, Fraction]]:
        """Copies of the sparse rows, for stacking matrices."""
        return [dict(r) for r in self._rows]

    def __eq__(self, other) -> bool:
        if not isinstance(other, ExactMatrix):
            return NotImplemented
        return (self.rows, self.cols) == (other.rows, other.cols) and \
            self._rows == other._rows

    def __repr__(self) -> str:
        return f"ExactMatrix({self.rows}x{self.cols})"


def matrix_from_columns(columns: Sequence[Sequence[Fraction]], nrows: int) -> ExactMatrix:
    """Assemble a matrix whose j-th column is ``columns[j]``."""
    out = ExactMatrix(nrows, len(columns))
    for j, col in enumerate(columns):
        if len(col) != nrows:
            raise ValueError("column length mismatch")
        for i, v in enumerate(col):
            if v != 0:
                out._rows[i][j] = v
    return out


def nullspace(matrix: ExactMatrix) -> list[tuple[Fraction, ...]]:
    return matrix.nullspace()


def solve_linear(matrix: ExactMatrix, rhs: Sequence[int | Fraction]) -> LinearSolveResult:
    return matrix.solve(rhs)
