"""Exact scalar arithmetic over the Gaussian rationals.

Scalar functions live in polynomial quotient rings with coefficients in
Q(i).  A ``ScalarContext`` fixes a finite list of real-valued generators,
an optional set of reduction relations in substitution form, and a table
of named derivations.  Every arithmetic result is kept in a canonical
normal form, so equality of functions is equality of dictionaries and no
floating point ever appears.

Generators come in three flavours:

* ordinary coordinate generators, which receive values at sample points;
* formal generators, standing for an unspecified smooth function and a
  fixed supply of its first derivatives (differentiating past the stored
  table raises ``SecondOrderDerivativeRequired``);
* constant generators, which never receive point values and survive
  evaluation (used for algebraic constants such as a square root of 2).

Relations are stored in substitution form ``lead^power = tail`` where
``lead`` is a single generator, the tail does not involve ``lead`` and is
itself in normal form.  Reduction simply substitutes until no monomial
carries ``lead`` to the ``power``; with tails of non-increasing priority
this terminates and yields a confluent rewriting system.
"""

from __future__ import annotations

import math
import re as _re
from fractions import Fraction


class ContextMismatch(ValueError):
    """Raised when elements of different scalar contexts are combined."""


class SecondOrderDerivativeRequired(ArithmeticError):
    """Raised when a computation needs a derivative beyond the stored tables.

    Formal generators carry only the first derivatives listed in the
    context.  Any attempt to differentiate one of those derivatives again
    (for instance inside an iterated bracket or a curvature check) raises
    this exception instead of silently returning a wrong value.
    """

    def __init__(self, derivation: str, generator: str):
        self.derivation = derivation
        self.generator = generator
        msg = "derivative of formal generator %r along %r is not available" % (
            generator, derivation)
        super().__init__(msg)


class ParseError(ValueError):
    """Raised for malformed scalar, form or section expressions."""


def _as_fraction(value) -> Fraction:
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    raise TypeError("expected an integer or Fraction, got %r" % (value,))


class QQi:
    """A Gaussian rational ``re + im*i`` with exact Fraction parts."""

    __slots__ = ("re", "im")

    def __init__(self, re=0, im=0):
        self.re = _as_fraction(re)
        self.im = _as_fraction(im)

    @classmethod
    def coerce(cls, value) -> "QQi":
        if isinstance(value, QQi):
            return value
        if isinstance(value, (int, Fraction)):
            return cls(value, 0)
        raise TypeError("cannot interpret %r as a Gaussian rational" % (value,))

    def __add__(self, other):
        other = QQi.coerce(other)
        return QQi(self.re + other.re, self.im + other.im)

    __radd__ = __add__

    def __sub__(self, other):
        other = QQi.coerce(other)
        return QQi(self.re - other.re, self.im - other.im)

    def __rsub__(self, other):
        return QQi.coerce(other) - self

    def __neg__(self):
        return QQi(-self.re, -self.im)

    def __mul__(self, other):
        other = QQi.coerce(other)
        return QQi(self.re * other.re - self.im * other.im,
                   self.re * other.im + self.im * other.re)

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = QQi.coerce(other)
        n = other.re * other.re + other.im * other.im
        if n == 0:
            raise ZeroDivisionError("division by zero Gaussian rational")
        return QQi((self.re * other.re + self.im * other.im) / n,
                   (self.im * other.re - self.re * other.im) / n)

    def __rtruediv__(self, other):
        return QQi.coerce(other) / self

    def __pow__(self, exponent: int):
        if not isinstance(exponent, int) or exponent < 0:
            raise ValueError("exponent must be a non-negative integer")
        out = QQi(1)
        base = self
        for _ in range(exponent):
            out = out * base
        return out

    def conj(self) -> "QQi":
        return QQi(self.re, -self.im)

    def is_zero(self) -> bool:
        return self.re == 0 and self.im == 0

    def __bool__(self):
        return not self.is_zero()

    def __eq__(self, other):
        try:
            other = QQi.coerce(other)
        except TypeError:
            return NotImplemented
        return self.re == other.re and self.im == other.im

    def __hash__(self):
        return hash((self.re, self.im))

    def _sort_key(self):
        return (self.re, self.im)

    def __str__(self):
        if self.im == 0:
            return str(self.re)
        if self.re == 0:
            if self.im == 1:
                return "i"
            if self.im == -1:
                return "-i"
            return "%s*i" % (self.im,)
        if self.im == 1:
            imag = "i"
        elif self.im == -1:
            imag = "-i"
        else:
            imag = "%s*i" % (self.im,)
        if imag.startswith("-"):
            return "(%s-%s)" % (self.re, imag[1:])
        return "(%s+%s)" % (self.re, imag)

    __repr__ = __str__


QQI_ZERO = QQi(0)
QQI_ONE = QQi(1)
QQI_I = QQi(0, 1)


def fraction_sqrt(value: Fraction):
    """Exact square root of a non-negative Fraction, or None if irrational."""
    value = _as_fraction(value)
    if value < 0:
        return None
    num, den = value.numerator, value.denominator
    rn, rd = math.isqrt(num), math.isqrt(den)
    if rn * rn == num and rd * rd == den:
        return Fraction(rn, rd)
    return None


_TOKEN_RE = _re.compile(r"\s*(\d+|[A-Za-z_][A-Za-z0-9_]*|\*\*|[-+*/^()])")


def tokenize(text: str):
    """Split an expression into number, name and operator tokens."""
    tokens = []
    pos = 0
    while pos < len(text):
        match = _TOKEN_RE.match(text, pos)
        if match is None:
            if text[pos:].strip() == "":
                break
            raise ParseError("unexpected character %r in %r" % (text[pos], text))
        tok = match.group(1)
        tokens.append("^" if tok == "**" else tok)
        pos = match.end()
    return tokens


class _ScalarParser:
    """Recursive-descent parser for polynomial scalar expressions.

    Grammar (precedence low to high): additive, multiplicative (``*``
    and ``/``), unary minus, power (``^`` with integer exponent), atoms.
    Division is only allowed by constant subexpressions.
    """

    def __init__(self, ctx: "ScalarContext", tokens):
        self.ctx = ctx
        self.tokens = tokens
        self.pos = 0

    def peek(self):
        return self.tokens[self.pos] if self.pos < len(self.tokens) else None

    def take(self):
        tok = self.peek()
        self.pos += 1
        return tok

    def expect(self, tok):
        got = self.take()
        if got != tok:
            raise ParseError("expected %r, found %r" % (tok, got))

    def parse(self):
        value = self.sum()
        if self.peek() is not None:
            raise ParseError("trailing input at %r" % (self.peek(),))
        return value

    def sum(self):
        if self.peek() == "-":
            self.take()
            value = -self.product()
        else:
            if self.peek() == "+":
                self.take()
            value = self.product()
        while self.peek() in ("+", "-"):
            if self.take() == "+":
                value = value + self.product()
            else:
                value = value - self.product()
        return value

    def product(self):
        value = self.power()
        while self.peek() in ("*", "/"):
            if self.take() == "*":
                value = value * self.power()
            else:
                divisor = self.power()
                value = value / divisor.constant_value()
        return value

    def power(self):
        base = self.atom()
        if self.peek() == "^":
            self.take()
            sign = 1
            if self.peek() == "-":
                raise ParseError("negative exponents are not allowed")
            tok = self.take()
            if tok is None or not tok.isdigit():
                raise ParseError("exponent must be a literal integer")
            base = base ** (sign * int(tok))
        return base

    def atom(self):
        tok = self.take()
        if tok is None:
            raise ParseError("unexpected end of expression")
        if tok == "(":
            value = self.sum()
            self.expect(")")
            return value
        if tok == "-":
            return -self.atom()
        if tok.isdigit():
            return self.ctx.constant(QQi(int(tok)))
        if tok == "i":
            return self.ctx.constant(QQI_I)
        if tok in self.ctx.gen_index:
            return self.ctx.gen(tok)
        raise ParseError("unknown name %r" % (tok,))


class ScalarContext:
    """A polynomial quotient ring over Q(i) with named derivations.

    ``gens`` is the ordered list of generator names.  For the monomial
    order, degree is compared first and ties are broken lexicographically
    with later generators taking priority, so a relation lead generator
    should be declared after the generators appearing in its tail.
    """

    def __init__(self, gens, constants=(), formal=()):
        gens = tuple(gens)
        if len(set(gens)) != len(gens):
            raise ValueError("duplicate generator names")
        if "i" in gens:
            raise ValueError("'i' is reserved for the imaginary unit")
        self.gens = gens
        self.gen_index = {name: k for k, name in enumerate(gens)}
        for name in tuple(constants) + tuple(formal):
            if name not in self.gen_index:
                raise ValueError("unknown generator %r" % (name,))
        self.constants = frozenset(constants)
        self.formal = frozenset(formal)
        if self.constants & self.formal:
            raise ValueError("a generator cannot be both constant and formal")
        self.assignable = tuple(g for g in gens if g not in self.constants)
        # relations: gen position -> (power, tail terms dict)
        self.relations = {}
        # derivations: name -> {gen name: FunctionElement}
        self.derivations = {}
        self._residual = None

    # -- construction ----------------------------------------------------

    def add_relation(self, lead: str, power: int, tail: "FunctionElement"):
        """Install the reduction rule ``lead^power -> tail``.

        The tail must already be in normal form with respect to the
        previously installed relations and must not involve ``lead``.
        The pure power must dominate every tail monomial in the monomial
        order, which keeps reduction strictly decreasing.
        """
        if lead not in self.gen_index:
            raise ValueError("unknown generator %r" % (lead,))
        pos = self.gen_index[lead]
        if pos in self.relations:
            raise ValueError("generator %r already has a relation" % (lead,))
        if power < 1:
            raise ValueError("relation power must be positive")
        tail = self._own(tail)
        lead_mono = tuple(power if k == pos else 0 for k in range(len(self.gens)))
        key = self.monomial_key(lead_mono)
        for mono in tail.terms:
            if mono[pos] != 0:
                raise ValueError("relation tail may not involve its lead generator")
            if not self.monomial_key(mono) < key:
                raise ValueError("relation tail monomial %r is not below the lead power"
                                 % (self.monomial_name(mono),))
        if tail.terms != self._reduce(dict(tail.terms)):
            raise ValueError("relation tail is not in normal form")
        self.relations[pos] = (power, dict(tail.terms))
        self._residual = None

    def add_derivation(self, name: str, images: dict):
        """Install a named derivation from a table of generator images.

        Coordinate generators must all receive an image.  Formal
        generators may be left out, in which case differentiating them
        raises ``SecondOrderDerivativeRequired``.  Constant generators
        always map to zero and may not appear in the table.
        """
        if name in self.derivations:
            raise ValueError("derivation %r already defined" % (name,))
        table = {}
        for gen, image in images.items():
            if gen not in self.gen_index:
                raise ValueError("unknown generator %r" % (gen,))
            if gen in self.constants:
                raise ValueError("constant generator %r cannot have a derivative" % (gen,))
            table[gen] = self._own(image)
        for gen in self.assignable:
            if gen not in self.formal and gen not in table:
                raise ValueError("derivation %r is missing an image for %r" % (name, gen))
        self.derivations[name] = table

    def _own(self, element) -> "FunctionElement":
        if isinstance(element, FunctionElement):
            if element.ctx is not self:
                raise ContextMismatch("element belongs to a different context")
            return element
        if isinstance(element, str):
            return self.parse(element)
        return self.constant(QQi.coerce(element))

    # -- monomial order --------------------------------------------------

    def monomial_key(self, mono):
        """Sort key: total degree first, later generators more significant."""
        return (sum(mono), tuple(reversed(mono)))

    def monomial_name(self, mono) -> str:
        parts = []
        for gen, exp in zip(self.gens, mono):
            if exp == 1:
                parts.append(gen)
            elif exp > 1:
                parts.append("%s^%d" % (gen, exp))
        return "*".join(parts) if parts else "1"

    # -- normal form -----------------------------------------------------

    def _reduce(self, terms: dict) -> dict:
        """Rewrite until no monomial matches a relation lead power."""
        if not self.relations:
            return {mono: coeff for mono, coeff in terms.items() if coeff}
        pending = dict(terms)
        out = {}
        while pending:
            mono, coeff = pending.popitem()
            if not coeff:
                continue
            hit = None
            for pos, (power, tail) in self.relations.items():
                if mono[pos] >= power:
                    hit = (pos, power, tail)
                    break
            if hit is None:
                acc = out.get(mono, QQI_ZERO) + coeff
                if acc:
                    out[mono] = acc
                elif mono in out:
                    del out[mono]
                continue
            pos, power, tail = hit
            rest = list(mono)
            rest[pos] -= power
            for tmono, tcoeff in tail.items():
                new = tuple(a + b for a, b in zip(rest, tmono))
                acc = pending.get(new, QQI_ZERO) + coeff * tcoeff
                if acc:
                    pending[new] = acc
                elif new in pending:
                    del pending[new]
        return out

    def element(self, terms: dict) -> "FunctionElement":
        width = len(self.gens)
        cleaned = {}
        for mono, coeff in terms.items():
            mono = tuple(mono)
            if len(mono) != width or any(e < 0 for e in mono):
                raise ValueError("bad monomial %r" % (mono,))
            coeff = QQi.coerce(coeff)
            if coeff:
                cleaned[mono] = cleaned.get(mono, QQI_ZERO) + coeff
        return FunctionElement(self, self._reduce(cleaned))

    def constant(self, value) -> "FunctionElement":
        value = QQi.coerce(value)
        if not value:
            return FunctionElement(self, {})
        return FunctionElement(self, {(0,) * len(self.gens): value})

    def zero(self) -> "FunctionElement":
        return FunctionElement(self, {})

    def one(self) -> "FunctionElement":
        return self.constant(QQI_ONE)

    def gen(self, name: str) -> "FunctionElement":
        pos = self.gen_index[name]
        mono = tuple(1 if k == pos else 0 for k in range(len(self.gens)))
        return self.element({mono: QQI_ONE})

    def parse(self, text: str) -> "FunctionElement":
        return _ScalarParser(self, tokenize(text)).parse()

    # -- evaluation ------------------------------------------------------

    def residual_context(self) -> "ScalarContext":
        """The ring left over once every assignable generator gets a value."""
        if self._residual is None:
            if not self.constants:
                self._residual = ScalarContext(())
            else:
                kept = tuple(g for g in self.gens if g in self.constants)
                res = ScalarContext(kept, constants=kept)
                for pos, (power, tail) in sorted(self.relations.items()):
                    lead = self.gens[pos]
                    if lead not in self.constants:
                        continue
                    moved = res.zero()
                    for mono, coeff in tail.items():
                        if any(e and self.gens[k] not in self.constants
                               for k, e in enumerate(mono)):
                            raise ValueError(
                                "relation for constant %r mixes in assignable generators"
                                % (lead,))
                        new = tuple(mono[self.gen_index[g]] for g in kept)
                        moved = moved + res.element({new: coeff})
                    res.add_relation(lead, power, moved)
                self._residual = res
        return self._residual

    def check_point(self, point: dict):
        """Verify a sample point assigns exactly the assignable generators."""
        names = set(point)
        expected = set(self.assignable)
        if names != expected:
            missing = sorted(expected - names)
            extra = sorted(names - expected)
            raise ValueError("bad sample point: missing %r, extra %r" % (missing, extra))


class FunctionElement:
    """An element of a ``ScalarContext``, stored as monomial -> coefficient."""

    __slots__ = ("ctx", "terms")

    def __init__(self, ctx: ScalarContext, terms: dict):
        self.ctx = ctx
        self.terms = terms

    def _coerce(self, other):
        if isinstance(other, FunctionElement):
            if other.ctx is not self.ctx:
                raise ContextMismatch("cannot mix elements of different contexts")
            return other
        return self.ctx.constant(QQi.coerce(other))

    def __add__(self, other):
        other = self._coerce(other)
        terms = dict(self.terms)
        for mono, coeff in other.terms.items():
            acc = terms.get(mono, QQI_ZERO) + coeff
            if acc:
                terms[mono] = acc
            elif mono in terms:
                del terms[mono]
        return FunctionElement(self.ctx, terms)

    __radd__ = __add__

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) + (-self)

    def __neg__(self):
        return FunctionElement(self.ctx, {m: -c for m, c in self.terms.items()})

    def __mul__(self, other):
        if isinstance(other, (int, Fraction, QQi)):
            scalar = QQi.coerce(other)
            if not scalar:
                return self.ctx.zero()
            return FunctionElement(self.ctx,
                                   {m: c * scalar for m, c in self.terms.items()})
        if not isinstance(other, FunctionElement):
            # defer to the other operand (sections and forms define __rmul__)
            return NotImplemented
        other = self._coerce(other)
        product = {}
        for m1, c1 in self.terms.items():
            for m2, c2 in other.terms.items():
                mono = tuple(a + b for a, b in zip(m1, m2))
                acc = product.get(mono, QQI_ZERO) + c1 * c2
                if acc:
                    product[mono] = acc
                elif mono in product:
                    del product[mono]
        return FunctionElement(self.ctx, self.ctx._reduce(product))

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, FunctionElement):
            other = other.constant_value()
        scalar = QQi.coerce(other)
        return self * (QQI_ONE / scalar)

    def __pow__(self, exponent: int):
        if not isinstance(exponent, int) or exponent < 0:
            raise ValueError("exponent must be a non-negative integer")
        out = self.ctx.one()
        for _ in range(exponent):
            out = out * self
        return out

    def __eq__(self, other):
        try:
            other = self._coerce(other)
        except (TypeError, ContextMismatch):
            return NotImplemented
        return self.terms == other.terms

    def __hash__(self):
        return hash((id(self.ctx), self.sort_signature()))

    def is_zero(self) -> bool:
        return not self.terms

    def __bool__(self):
        return bool(self.terms)

    def conj(self) -> "FunctionElement":
        """Complex conjugation; generators are real so only coefficients flip."""
        return FunctionElement(self.ctx, {m: c.conj() for m, c in self.terms.items()})

    def is_constant(self) -> bool:
        return all(sum(m) == 0 for m in self.terms)

    def constant_value(self) -> QQi:
        if not self.terms:
            return QQI_ZERO
        if not self.is_constant():
            raise ValueError("element %s is not a constant" % (self,))
        return next(iter(self.terms.values()))

    def degree(self) -> int:
        if not self.terms:
            return 0
        return max(sum(m) for m in self.terms)

    def derive(self, derivation: str) -> "FunctionElement":
        """Apply a named derivation via the Leibniz rule."""
        try:
            table = self.ctx.derivations[derivation]
        except KeyError:
            raise KeyError("unknown derivation %r" % (derivation,))
        out = self.ctx.zero()
        for mono, coeff in self.terms.items():
            for pos, exp in enumerate(mono):
                if exp == 0:
                    continue
                gen = self.ctx.gens[pos]
                if gen in self.ctx.constants:
                    continue
                if gen not in table:
                    raise SecondOrderDerivativeRequired(derivation, gen)
                image = table[gen]
                if image.is_zero():
                    continue
                lowered = list(mono)
                lowered[pos] -= 1
                partial = self.ctx.element({tuple(lowered): coeff * exp})
                out = out + partial * image
        return out

    def evaluate(self, point: dict) -> "FunctionElement":
        """Substitute values for the assignable generators.

        Returns an element of the residual context (constant generators
        stay symbolic).  The point must cover every assignable generator.
        """
        self.ctx.check_point(point)
        values = {name: QQi.coerce(v) for name, v in point.items()}
        res = self.ctx.residual_context()
        out = res.zero()
        for mono, coeff in self.terms.items():
            factor = coeff
            kept = []
            for pos, exp in enumerate(mono):
                gen = self.ctx.gens[pos]
                if gen in self.ctx.constants:
                    kept.append((gen, exp))
                elif exp:
                    factor = factor * (values[gen] ** exp)
            if not factor:
                continue
            new = [0] * len(res.gens)
            for gen, exp in kept:
                if exp:
                    new[res.gen_index[gen]] = exp
            out = out + res.element({tuple(new): factor})
        return out

    def evaluate_number(self, point: dict) -> QQi:
        """Evaluate at a point and insist the answer is a plain number."""
        return self.evaluate(point).constant_value()

    def map_into(self, target: ScalarContext, images: dict) -> "FunctionElement":
        """Push through a ring map given by images of every generator."""
        out = target.zero()
        for mono, coeff in self.terms.items():
            term = target.constant(coeff)
            for pos, exp in enumerate(mono):
                if exp == 0:
                    continue
                gen = self.ctx.gens[pos]
                if gen not in images:
                    raise KeyError("no image supplied for generator %r" % (gen,))
                term = term * (target._own(images[gen]) ** exp)
            out = out + term
        return out

    def sort_signature(self):
        """A hashable canonical form, used for ordering and hashing."""
        items = sorted(self.terms.items(),
                       key=lambda kv: self.ctx.monomial_key(kv[0]))
        return tuple((mono, coeff.re, coeff.im) for mono, coeff in items)

    def __str__(self):
        if not self.terms:
            return "0"
        ordered = sorted(self.terms.items(),
                         key=lambda kv: self.ctx.monomial_key(kv[0]),
                         reverse=True)
        pieces = []
        for mono, coeff in ordered:
            name = self.ctx.monomial_name(mono)
            negative = coeff.re < 0 or (coeff.re == 0 and coeff.im < 0)
            shown = -coeff if negative else coeff
            if name == "1":
                body = str(shown)
            elif shown == QQI_ONE:
                body = name
            else:
                body = "%s*%s" % (shown, name)
            if not pieces:
                pieces.append("-" + body if negative else body)
            else:
                pieces.append(("- " if negative else "+ ") + body)
        return " ".join(pieces)

    def __repr__(self):
        return "<scalar %s>" % (self,)
