"""Text model files: a small declaration language for charts and tensors.

A model is a sequence of lines: one ``space`` declaration, then named
bindings of scalars, forms, multivectors, structures and volumes.

    space 3 coords x1 x2 x3
    scalar f  = x1^2 + x2^2 + x3^2
    lambda L  = (x1^2 + x2^2 + x3^2) * @1^@2^@3 order 3
    form  a   = x1 * dx1 ^ dx2
    volume V  = std
    volume W  = exp(-x1) * std

``@k`` is the k-th coordinate field, ``dxk`` the coordinate differential.
``^`` is the wedge product; applied to a scalar base with a numeric-literal
exponent it is a power, which is the one scalar case where the two readings
differ (on degree-0 arguments the wedge is multiplication).  ``**`` is always
scalar power.  ``#`` starts a comment.  Numbers are integers, optionally
``a/b`` fractions.  Errors carry line, column and the offending token.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .algebra import Polynomial
from .exterior import FORM, MULTIVECTOR, Chart, GradedTensor, format_tensor
from .modular import VolumeSpec
from .structures import NambuStructure

KEYWORDS = {"space", "coords", "scalar", "form", "mv", "lambda", "volume",
            "order", "std", "exp"}
BINDING_KINDS = ("scalar", "form", "mv", "lambda", "volume")


class ModelError(Exception):
    """Parse or typing error in a model file, with source position."""

    def __init__(self, message: str, line: int, column: int, token: str = ""):
        self.message = message
        self.line = line
        self.column = column
        self.token = token
        where = f"line {line}, column {column}"
        if token:
            where += f" at {token!r}"
        super().__init__(f"{message} ({where})")


@dataclass(frozen=True)
class Token:
    kind: str  # INT | IDENT | SYM
    text: str
    line: int
    column: int


_SYMBOLS = ("**", "+", "-", "*", "(", ")", "=", "^", "@", "/")


def _tokenize_line(text: str, line_no: int) -> list[Token]:
    tokens: list[Token] = []
    pos = 0
    while pos < len(text):
        ch = text[pos]
        if ch == "#":
            break
        if ch.isspace():
            pos += 1
            continue
        if ch.isdigit():
            end = pos
            while end < len(text) and text[end].isdigit():
                end += 1
            tokens.append(Token("INT", text[pos:end], line_no, pos + 1))
            pos = end
            continue
        if ch.isalpha() or ch == "_":
            end = pos
            while end < len(text) and (text[end].isalnum() or text[end] == "_"):
                end += 1
            tokens.append(Token("IDENT", text[pos:end], line_no, pos + 1))
            pos = end
            continue
        for sym in _SYMBOLS:
            if text.startswith(sym, pos):
                tokens.append(Token("SYM", sym, line_no, pos + 1))
                pos += len(sym)
                break
        else:
            raise ModelError("unexpected character", line_no, pos + 1, ch)
    return tokens


@dataclass(frozen=True)
class Binding:
    kind: str
    name: str
    value: object  # Polynomial | GradedTensor | NambuStructure | VolumeSpec


@dataclass
class ModelFile:
    chart: Chart
    bindings: dict[str, Binding]

    def binding(self, name: str, kind: str):
        entry = self.bindings.get(name)
        if entry is None:
            raise KeyError(f"no binding named {name!r}")
        if entry.kind != kind:
            raise KeyError(f"binding {name!r} is a {entry.kind}, not a {kind}")
        return entry.value

    def _unique(self, kind: str):
        names = [b.name for b in self.bindings.values() if b.kind == kind]
        if len(names) != 1:
            raise KeyError(f"model defines {len(names)} {kind} bindings; name one explicitly")
        return self.bindings[names[0]].value

    def structure(self, name: str | None = None) -> NambuStructure:
        return self.binding(name, "lambda") if name else self._unique("lambda")

    def volume(self, name: str | None = None) -> VolumeSpec:
        return self.binding(name, "volume") if name else self._unique("volume")

    def scalar(self, name: str) -> Polynomial:
        return self.binding(name, "scalar")

    def __eq__(self, other) -> bool:
        if not isinstance(other, ModelFile):
            return NotImplemented
        if self.chart != other.chart or list(self.bindings) != list(other.bindings):
            return False
        for name, entry in self.bindings.items():
            mate = other.bindings[name]
            if entry.kind != mate.kind:
                return False
            ours, theirs = entry.value, mate.value
            if isinstance(ours, NambuStructure):
                if not isinstance(theirs, NambuStructure) or ours.tensor != theirs.tensor \
                        or ours.order != theirs.order:
                    return False
            elif ours != theirs:
                return False
        return True

    def to_text(self) -> str:
        """Canonical serialization; reparsing yields an equal model."""
        names = " ".join(self.chart.coordinates)
        lines = [f"space {self.chart.dimension} coords {names}"]
        for entry in self.bindings.values():
            lines.append(_render_binding(self.chart, entry))
        return "\n".join(lines) + "\n"


def _render_scalar(value: Polynomial) -> str:
    return str(value)


def _render_binding(chart: Chart, entry: Binding) -> str:
    if entry.kind == "scalar":
        return f"scalar {entry.name} = {_render_scalar(entry.value)}"
    if entry.kind in ("form", "mv"):
        return f"{entry.kind} {entry.name} = {format_tensor(entry.value)}"
    if entry.kind == "lambda":
        structure = entry.value
        return (f"lambda {entry.name} = {format_tensor(structure.tensor)} "
                f"order {structure.order}")
    if entry.kind == "volume":
        volume = entry.value
        if not volume.weight.is_zero() and not volume.coefficient.is_one():
            raise ValueError("volumes with both weight and coefficient have no "
                             "model-file syntax")
        if not volume.weight.is_zero():
            return f"volume {entry.name} = exp(-({volume.weight})) * std"
        if not volume.coefficient.is_one():
            return f"volume {entry.name} = ({volume.coefficient}) * std"
        return f"volume {entry.name} = std"
    raise ValueError(f"unknown binding kind {entry.kind}")


class _Parser:
    def __init__(self, tokens: list[Token], chart: Chart,
                 bindings: dict[str, Binding]):
        self.tokens = tokens
        self.pos = 0
        self.chart = chart
        self.bindings = bindings

    # -- token plumbing ----------------------------------------------------

    def peek(self) -> Token | None:
        return self.tokens[self.pos] if self.pos < len(self.tokens) else None

    def next(self) -> Token:
        token = self.peek()
        if token is None:
            last = self.tokens[-1]
            raise ModelError("unexpected end of line", last.line,
                             last.column + len(last.text))
        self.pos += 1
        return token

    def expect(self, text: str) -> Token:
        token = self.next()
        if token.text != text:
            raise ModelError(f"expected {text!r}", token.line, token.column, token.text)
        return token

    def error(self, message: str, token: Token) -> ModelError:
        return ModelError(message, token.line, token.column, token.text)

    # -- expression grammar --------------------------------------------------

    def parse_expression(self):
        negate = False
        token = self.peek()
        if token is not None and token.text == "-":
            self.next()
            negate = True
        value, _ = self.parse_term()
        if negate:
            value = self._negate(value)
        while (token := self.peek()) is not None and token.text in ("+", "-"):
            self.next()
            rhs, _ = self.parse_term()
            if token.text == "-":
                rhs = self._negate(rhs)
            value = self._add(value, rhs, token)
        return value

    def parse_term(self):
        value, literal = self.parse_factor()
        while (token := self.peek()) is not None and token.text == "*":
            self.next()
            rhs, _ = self.parse_factor()
            value = self._multiply(value, rhs, token)
            literal = False
        return value, literal

    def parse_factor(self):
        value, literal = self.parse_primary()
        while (token := self.peek()) is not None and token.text in ("^", "**"):
            self.next()
            if token.text == "**":
                exponent = self.next()
                if exponent.kind != "INT":
                    raise self.error("scalar power needs an integer exponent", exponent)
                value = self._power(value, int(exponent.text), token)
            else:
                rhs, rhs_literal = self.parse_primary()
                # scalar base with a literal numeric exponent reads as a power
                if rhs_literal and isinstance(value, Polynomial):
                    value = self._power(value, self._as_int(rhs, token), token)
                else:
                    value = self._wedge(value, rhs, token)
            literal = False
        return value, literal

    def parse_primary(self):
        token = self.next()
        if token.kind == "INT":
            number = Fraction(int(token.text))
            if (nxt := self.peek()) is not None and nxt.text == "/":
                self.next()
                denom = self.next()
                if denom.kind != "INT" or int(denom.text) == 0:
                    raise self.error("expected a non-zero integer denominator", denom)
                number = Fraction(int(token.text), int(denom.text))
            return Polynomial.constant(self.chart.coordinates, number), True
        if token.text == "(":
            value = self.parse_expression()
            self.expect(")")
            return value, False
        if token.text == "@":
            index = self.next()
            if index.kind != "INT":
                raise self.error("expected a coordinate number after @", index)
            k = int(index.text)
            if not 1 <= k <= self.chart.dimension:
                raise self.error("coordinate number out of range", index)
            return GradedTensor.coordinate_field(self.chart, k - 1), False
        if token.kind == "IDENT":
            return self._resolve(token), False
        raise self.error("unexpected token", token)

    def _resolve(self, token: Token):
        name = token.text
        if name in self.chart.coordinates:
            return Polynomial.variable(self.chart.coordinates,
                                       self.chart.coordinates.index(name))
        entry = self.bindings.get(name)
        if entry is not None:
            if entry.kind == "scalar":
                return entry.value
            if entry.kind in ("form", "mv"):
                return entry.value
            raise self.error(f"a {entry.kind} binding cannot appear in an expression",
                             token)
        if name.startswith("d") and name[1:] in self.chart.coordinates:
            index = self.chart.coordinates.index(name[1:])
            return GradedTensor.coordinate_differential(self.chart, index)
        raise self.error("unknown name", token)

    # -- value algebra ---------------------------------------------------------

    @staticmethod
    def _negate(value):
        return -value

    def _as_int(self, value, token: Token) -> int:
        if isinstance(value, Polynomial) and value.is_constant():
            constant = value.constant_value()
            if constant.denominator == 1 and constant >= 0:
                return int(constant)
        raise self.error("exponent must be a non-negative integer", token)

    def _add(self, left, right, token: Token):
        if isinstance(left, Polynomial) and isinstance(right, Polynomial):
            return left + right
        if isinstance(left, GradedTensor) and isinstance(right, GradedTensor):
            if left.variance != right.variance and not (left.is_zero() or right.is_zero()):
                raise self.error("cannot add a form and a multivector", token)
            if left.degree != right.degree and not (left.is_zero() or right.is_zero()):
                raise self.error(
                    f"cannot add tensors of degrees {left.degree} and {right.degree}",
                    token)
            if left.is_zero() and left.degree != right.degree:
                return right
            if right.is_zero() and left.degree != right.degree:
                return left
            if left.variance != right.variance:
                return left if right.is_zero() else right
            return left + right
        raise self.error("cannot add a scalar and a tensor", token)

    def _multiply(self, left, right, token: Token):
        if isinstance(left, Polynomial) and isinstance(right, Polynomial):
            return left * right
        if isinstance(left, Polynomial) and isinstance(right, GradedTensor):
            return right.scale(left)
        if isinstance(left, GradedTensor) and isinstance(right, Polynomial):
            return left.scale(right)
        raise self.error("use ^ for products of forms or multivectors", token)

    def _wedge(self, left, right, token: Token):
        from .exterior import wedge
        if isinstance(left, Polynomial) and isinstance(right, Polynomial):
            return left * right
        if isinstance(left, Polynomial) and isinstance(right, GradedTensor):
            return right.scale(left)
        if isinstance(left, GradedTensor) and isinstance(right, Polynomial):
            return left.scale(right)
        if left.variance != right.variance:
            raise self.error("cannot wedge a form with a multivector", token)
        if left.chart != right.chart:
            raise self.error("wedge operands live on different charts", token)
        return wedge(left, right)

    def _power(self, value, exponent: int, token: Token):
        if not isinstance(value, Polynomial):
            raise self.error("powers apply to scalars only", token)
        if exponent < 0:
            raise self.error("exponent must be non-negative", token)
        return value ** exponent


def _parse_space(tokens: list[Token]) -> Chart:
    parser = _Parser(tokens, Chart.of("placeholder"), {})
    parser.expect("space")
    dim_token = parser.next()
    if dim_token.kind != "INT":
        raise parser.error("expected the chart dimension", dim_token)
    dimension = int(dim_token.text)
    parser.expect("coords")
    names = []
    while parser.peek() is not None:
        token = parser.next()
        if token.kind != "IDENT":
            raise parser.error("expected a coordinate name", token)
        if token.text in KEYWORDS:
            raise parser.error("coordinate name collides with a keyword", token)
        names.append(token.text)
    if len(names) != dimension:
        raise ModelError(f"declared dimension {dimension} but {len(names)} coordinates",
                         tokens[0].line, tokens[0].column)
    try:
        return Chart.of(names)
    except ValueError as exc:
        raise ModelError(str(exc), tokens[0].line, tokens[0].column) from None


def _parse_volume(parser: _Parser, tokens_rest: list[Token], name: str) -> VolumeSpec:
    chart = parser.chart
    if not tokens_rest:
        last = parser.tokens[-1]
        raise ModelError("empty volume expression", last.line, last.column)
    if len(tokens_rest) == 1 and tokens_rest[0].text == "std":
        return VolumeSpec.standard(chart)
    tail = tokens_rest[-2:]
    if len(tail) != 2 or tail[0].text != "*" or tail[1].text != "std":
        raise ModelError("a volume is 'std', 'poly * std' or 'exp(-poly) * std'",
                         tokens_rest[0].line, tokens_rest[0].column,
                         tokens_rest[-1].text)
    head = tokens_rest[:-2]
    if head and head[0].text == "exp":
        inner = _Parser(head, chart, parser.bindings)
        inner.expect("exp")
        inner.expect("(")
        inner.expect("-")
        weight = inner.parse_expression()
        inner.expect(")")
        if inner.peek() is not None:
            raise inner.error("unexpected token after exp(...)", inner.peek())
        if not isinstance(weight, Polynomial):
            raise ModelError("the exponential weight must be a scalar",
                             head[0].line, head[0].column)
        return VolumeSpec.weighted(chart, weight)
    inner = _Parser(head, chart, parser.bindings)
    coefficient = inner.parse_expression()
    if inner.peek() is not None:
        raise inner.error("unexpected token in volume coefficient", inner.peek())
    if not isinstance(coefficient, Polynomial):
        raise ModelError("the volume coefficient must be a scalar",
                         head[0].line, head[0].column)
    if coefficient.is_zero():
        raise ModelError("the volume coefficient must be non-zero",
                         head[0].line, head[0].column)
    return VolumeSpec(chart, coefficient, chart.zero_polynomial())


def parse_model(text: str) -> ModelFile:
    """Parse a model file; raises ModelError with line/column on any defect."""
    chart: Chart | None = None
    bindings: dict[str, Binding] = {}
    for line_no, raw in enumerate(text.splitlines(), start=1):
        tokens = _tokenize_line(raw, line_no)
        if not tokens:
            continue
        head = tokens[0]
        if head.text == "space":
            if chart is not None:
                raise ModelError("duplicate space declaration", head.line, head.column)
            chart = _parse_space(tokens)
            continue
        if chart is None:
            raise ModelError("the space declaration must come first",
                             head.line, head.column, head.text)
        if head.text not in BINDING_KINDS:
            raise ModelError("expected a binding kind", head.line, head.column, head.text)
        kind = head.text
        parser = _Parser(tokens, chart, bindings)
        parser.expect(kind)
        name_token = parser.next()
        if name_token.kind != "IDENT":
            raise parser.error("expected a binding name", name_token)
        name = name_token.text
        if name in KEYWORDS or name in chart.coordinates or name in bindings \
                or (name.startswith("d") and name[1:] in chart.coordinates):
            raise parser.error("binding name is reserved or already used", name_token)
        parser.expect("=")

        if kind == "volume":
            value: object = _parse_volume(parser, tokens[parser.pos:], name)
        else:
            expression = parser.parse_expression()
            if kind == "scalar":
                if not isinstance(expression, Polynomial):
                    raise parser.error("scalar binding holds a tensor", name_token)
                value = expression
            elif kind in ("form", "mv"):
                wanted = FORM if kind == "form" else MULTIVECTOR
                if isinstance(expression, Polynomial):
                    expression = GradedTensor.from_scalar(chart, wanted, expression)
                if expression.variance != wanted and not expression.is_zero():
                    raise parser.error(f"{kind} binding holds the wrong variance",
                                       name_token)
                value = expression
            else:  # lambda
                order_token = parser.peek()
                if order_token is None or order_token.text != "order":
                    raise parser.error("a lambda binding needs a trailing order",
                                       name_token)
                parser.expect("order")
                order_value = parser.next()
                if order_value.kind != "INT":
                    raise parser.error("expected the structure order", order_value)
                if not isinstance(expression, GradedTensor) \
                        or expression.variance != MULTIVECTOR:
                    raise parser.error("a lambda binding must be a multivector",
                                       name_token)
                try:
                    value = NambuStructure(expression, order=int(order_value.text))
                except ValueError as exc:
                    raise ModelError(str(exc), name_token.line, name_token.column,
                                     name_token.text) from None
            if kind != "lambda" and parser.peek() is not None:
                raise parser.error("unexpected trailing tokens", parser.peek())
            if kind == "lambda" and parser.peek() is not None:
                raise parser.error("unexpected tokens after the order", parser.peek())
        bindings[name] = Binding(kind, name, value)
    if chart is None:
        raise ModelError("model has no space declaration", 1, 1)
    return ModelFile(chart, bindings)
