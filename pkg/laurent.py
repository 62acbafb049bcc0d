# laurent.py
# Exact multivariate Laurent polynomials over Z. Every cluster variable lives
# here, expressed in the initial cluster x1..xn.

from __future__ import annotations

import re
from functools import total_ordering
from typing import Dict, Iterable, List, Mapping, Optional, Sequence, Tuple, Union

from sortedcontainers import SortedDict

Exponent = Tuple[int, ...]
TermSource = Union[Mapping[Exponent, int], Iterable[Tuple[Exponent, int]]]


class LaurentParseError(ValueError):
    """Raised when text does not follow the rendering grammar"""


@total_ordering
class LaurentPolynomial:
    """Finitely supported map Z^n -> Z \\ {0}, kept sorted by exponent vector"""

    __slots__ = ("nvars", "_terms", "_hash", "_sort_key")

    def __init__(self, nvars: int, terms: TermSource = ()):
        if nvars < 0:
            raise ValueError(f"nvars must be non-negative, got {nvars}")
        self.nvars = nvars
        self._terms = SortedDict()
        self._hash = None
        self._sort_key = None
        items = terms.items() if isinstance(terms, Mapping) else terms
        for exponent, coeff in items:
            exponent = tuple(int(e) for e in exponent)
            if len(exponent) != nvars:
                raise ValueError(f"exponent {exponent} does not have {nvars} entries")
            total = self._terms.get(exponent, 0) + int(coeff)
            if total:
                self._terms[exponent] = total
            else:
                self._terms.pop(exponent, None)

    # ---------------------------
    # Constructors
    # ---------------------------

    @classmethod
    def zero(cls, nvars: int) -> "LaurentPolynomial":
        return cls(nvars)

    @classmethod
    def constant(cls, nvars: int, value: int) -> "LaurentPolynomial":
        return cls(nvars, {(0,) * nvars: value})

    @classmethod
    def one(cls, nvars: int) -> "LaurentPolynomial":
        return cls.constant(nvars, 1)

    @classmethod
    def monomial(cls, nvars: int, exponent: Sequence[int], coeff: int = 1) -> "LaurentPolynomial":
        return cls(nvars, {tuple(exponent): coeff})

    @classmethod
    def variable(cls, nvars: int, index: int) -> "LaurentPolynomial":
        """x_{index+1} (0-based index)"""
        if not 0 <= index < nvars:
            raise IndexError(f"variable index {index} out of range for {nvars} variables")
        exponent = [0] * nvars
        exponent[index] = 1
        return cls.monomial(nvars, exponent)

    @classmethod
    def _from_terms(cls, nvars: int, terms: Dict[Exponent, int]) -> "LaurentPolynomial":
        # Trusted path: exponents are well-formed and coefficients nonzero.
        poly = cls(nvars)
        poly._terms.update(terms)
        return poly

    # ---------------------------
    # Queries
    # ---------------------------

    def terms(self) -> List[Tuple[Exponent, int]]:
        return list(self._terms.items())

    def __len__(self) -> int:
        return len(self._terms)

    def __iter__(self):
        return iter(self._terms.items())

    def coefficient(self, exponent: Sequence[int]) -> int:
        return self._terms.get(tuple(exponent), 0)

    def is_zero(self) -> bool:
        return not self._terms

    def is_monomial(self) -> bool:
        return len(self._terms) == 1

    def is_nonnegative(self) -> bool:
        return all(c > 0 for c in self._terms.values())

    def leading_term(self) -> Tuple[Exponent, int]:
        """Lexicographically largest exponent with its coefficient"""
        if not self._terms:
            raise ValueError("the zero polynomial has no leading term")
        return self._terms.peekitem(-1)

    def min_exponents(self) -> Exponent:
        if not self._terms:
            return (0,) * self.nvars
        return tuple(min(e[i] for e in self._terms) for i in range(self.nvars))

    def sort_key(self) -> Tuple[Tuple[Exponent, int], ...]:
        """Canonical total order: term lists compared lexicographically"""
        if self._sort_key is None:
            self._sort_key = tuple(self._terms.items())
        return self._sort_key

    # ---------------------------
    # Comparison
    # ---------------------------

    def __eq__(self, other) -> bool:
        if not isinstance(other, LaurentPolynomial):
            return NotImplemented
        return self.nvars == other.nvars and self.sort_key() == other.sort_key()

    def __lt__(self, other: "LaurentPolynomial") -> bool:
        if not isinstance(other, LaurentPolynomial):
            return NotImplemented
        return (self.nvars, self.sort_key()) < (other.nvars, other.sort_key())

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash((self.nvars, self.sort_key()))
        return self._hash

    # ---------------------------
    # Arithmetic
    # ---------------------------

    def _check_compatible(self, other: "LaurentPolynomial") -> None:
        if self.nvars != other.nvars:
            raise ValueError(f"nvars mismatch: {self.nvars} vs {other.nvars}")

    def _coerce(self, other) -> Optional["LaurentPolynomial"]:
        if isinstance(other, LaurentPolynomial):
            self._check_compatible(other)
            return other
        if isinstance(other, int):
            return LaurentPolynomial.constant(self.nvars, other)
        return None

    def __add__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        terms = dict(self._terms)
        for exponent, coeff in other._terms.items():
            total = terms.get(exponent, 0) + coeff
            if total:
                terms[exponent] = total
            else:
                terms.pop(exponent, None)
        return LaurentPolynomial._from_terms(self.nvars, terms)

    __radd__ = __add__

    def __neg__(self) -> "LaurentPolynomial":
        return LaurentPolynomial._from_terms(self.nvars, {e: -c for e, c in self._terms.items()})

    def __sub__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return other + (-self)

    def __mul__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        terms: Dict[Exponent, int] = {}
        for e1, c1 in self._terms.items():
            for e2, c2 in other._terms.items():
                exponent = tuple(a + b for a, b in zip(e1, e2))
                total = terms.get(exponent, 0) + c1 * c2
                if total:
                    terms[exponent] = total
                else:
                    terms.pop(exponent, None)
        return LaurentPolynomial._from_terms(self.nvars, terms)

    __rmul__ = __mul__

    def __pow__(self, power: int) -> "LaurentPolynomial":
        if power < 0:
            if not self.is_monomial():
                raise ValueError("only monomials have negative powers in the Laurent ring")
            (exponent, coeff), = self._terms.items()
            if coeff not in (1, -1):
                raise ValueError(f"{coeff} is not a unit in Z")
            return LaurentPolynomial.monomial(
                self.nvars, [power * e for e in exponent], coeff ** (-power)
            )
        result = LaurentPolynomial.one(self.nvars)
        base = self
        while power:
            if power & 1:
                result = result * base
            power >>= 1
            if power:
                base = base * base
        return result

    def shift(self, exponent: Sequence[int]) -> "LaurentPolynomial":
        """Multiply by the monomial x^exponent"""
        return LaurentPolynomial._from_terms(
            self.nvars,
            {tuple(a + b for a, b in zip(e, exponent)): c for e, c in self._terms.items()},
        )

    # ---------------------------
    # Rendering
    # ---------------------------

    def __str__(self) -> str:
        return render(self)

    def __repr__(self) -> str:
        return f"LaurentPolynomial({self.nvars}, {render(self)!r})"


# ---------------------------
# Module-level operations
# ---------------------------

def add(p: LaurentPolynomial, q: LaurentPolynomial) -> LaurentPolynomial:
    p._check_compatible(q)
    return p + q


def mul(p: LaurentPolynomial, q: LaurentPolynomial) -> LaurentPolynomial:
    p._check_compatible(q)
    return p * q


def is_nonnegative(p: LaurentPolynomial) -> bool:
    return p.is_nonnegative()


def _divide_monomial(p: LaurentPolynomial, q: LaurentPolynomial) -> Optional[LaurentPolynomial]:
    (exponent, coeff), = q.terms()
    if any(c % coeff for _, c in p):
        return None
    return LaurentPolynomial._from_terms(
        p.nvars,
        {tuple(a - b for a, b in zip(e, exponent)): c // coeff for e, c in p},
    )


def div_exact(p: LaurentPolynomial, q: LaurentPolynomial) -> Optional[LaurentPolynomial]:
    """r with p = q·r in the Laurent ring, or None when no such r exists"""
    p._check_compatible(q)
    if q.is_zero():
        raise ZeroDivisionError("division by the zero Laurent polynomial")
    if p.is_zero():
        return LaurentPolynomial.zero(p.nvars)
    if q.is_monomial():
        return _divide_monomial(p, q)

    # Strip monomial content so both are polynomials with no variable factor;
    # q0 | x^m·p0 then holds iff q0 | p0, and lex long division decides it.
    p_shift = p.min_exponents()
    q_shift = q.min_exponents()
    remaining = SortedDict(p.shift([-e for e in p_shift]).terms())
    divisor = q.shift([-e for e in q_shift])
    lead_exp, lead_coeff = divisor.leading_term()
    divisor_terms = divisor.terms()

    quotient: Dict[Exponent, int] = {}
    while remaining:
        exponent, coeff = remaining.peekitem(-1)
        if coeff % lead_coeff or any(a < b for a, b in zip(exponent, lead_exp)):
            return None
        factor_exp = tuple(a - b for a, b in zip(exponent, lead_exp))
        factor = coeff // lead_coeff
        quotient[factor_exp] = quotient.get(factor_exp, 0) + factor
        for d_exp, d_coeff in divisor_terms:
            target = tuple(a + b for a, b in zip(d_exp, factor_exp))
            total = remaining.get(target, 0) - factor * d_coeff
            if total:
                remaining[target] = total
            else:
                remaining.pop(target, None)

    result = LaurentPolynomial(p.nvars, quotient)
    return result.shift([a - b for a, b in zip(p_shift, q_shift)])


def substitute(
    p: LaurentPolynomial,
    images: Sequence[LaurentPolynomial],
) -> Optional[LaurentPolynomial]:
    """Ring substitution x_i -> images[i]; None if the value leaves the Laurent ring"""
    if len(images) != p.nvars:
        raise ValueError(f"expected {p.nvars} images, got {len(images)}")
    if not images:
        return LaurentPolynomial(0, p.terms())
    target_nvars = images[0].nvars
    for i, image in enumerate(images):
        if image.nvars != target_nvars:
            raise ValueError(f"image {i + 1} has {image.nvars} variables, expected {target_nvars}")
        if image.is_zero():
            raise ValueError(f"image {i + 1} is zero")
    if p.is_zero():
        return LaurentPolynomial.zero(target_nvars)

    # Clear denominators: numerator is the substitution of x^m·p, with m the
    # largest negative powers, then divide by the substituted monomial x^m.
    clearing = [-e if e < 0 else 0 for e in p.min_exponents()]
    powers: List[Dict[int, LaurentPolynomial]] = [{} for _ in images]

    def power_of(i: int, e: int) -> LaurentPolynomial:
        cached = powers[i].get(e)
        if cached is None:
            cached = images[i] ** e
            powers[i][e] = cached
        return cached

    numerator = LaurentPolynomial.zero(target_nvars)
    for exponent, coeff in p:
        term = LaurentPolynomial.constant(target_nvars, coeff)
        for i, e in enumerate(exponent):
            shifted = e + clearing[i]
            if shifted:
                term = term * power_of(i, shifted)
        numerator = numerator + term

    denominator = LaurentPolynomial.one(target_nvars)
    for i, m in enumerate(clearing):
        if m:
            denominator = denominator * power_of(i, m)
    return div_exact(numerator, denominator)


# ---------------------------
# Text form
# ---------------------------

def _render_monomial(exponent: Exponent) -> str:
    factors = []
    for i, e in enumerate(exponent):
        if e == 1:
            factors.append(f"x{i + 1}")
        elif e:
            factors.append(f"x{i + 1}^{e}")
    return "*".join(factors)


def render(p: LaurentPolynomial) -> str:
    """Terms in lexicographic exponent order, e.g. "x1^-1 + x1^-1*x2" """
    if p.is_zero():
        return "0"
    pieces = []
    for index, (exponent, coeff) in enumerate(p):
        monomial = _render_monomial(exponent)
        magnitude = abs(coeff)
        if not monomial:
            body = str(magnitude)
        elif magnitude == 1:
            body = monomial
        else:
            body = f"{magnitude}*{monomial}"
        if index == 0:
            pieces.append(f"-{body}" if coeff < 0 else body)
        else:
            pieces.append(f" - {body}" if coeff < 0 else f" + {body}")
    return "".join(pieces)


_TERM_RE = re.compile(r"([+-]?)([^+-]+|$)")
_FACTOR_RE = re.compile(r"^x(\d+)(?:\^(-?\d+))?$")


def _split_terms(text: str) -> List[Tuple[int, str]]:
    # "^-1" is part of a factor, not a term separator.
    protected = re.sub(r"\^-", "^~", text.replace(" ", ""))
    if not protected:
        raise LaurentParseError("empty expression")
    terms = []
    position = 0
    while position < len(protected):
        match = _TERM_RE.match(protected, position)
        if not match or not match.group(2):
            rest = protected[position:].replace("^~", "^-")
            raise LaurentParseError(f"unexpected text near {rest!r}")
        sign_text, body = match.groups()
        terms.append((-1 if sign_text == "-" else 1, body.replace("^~", "^-")))
        position = match.end()
    return terms


def parse(text: str, nvars: int) -> LaurentPolynomial:
    """Inverse of render for the grammar coeff*x1^e1*x2^e2 +/- ..."""
    terms: Dict[Exponent, int] = {}
    for sign_value, body in _split_terms(text):
        coeff = sign_value
        exponent = [0] * nvars
        for factor in body.split("*"):
            if not factor:
                raise LaurentParseError(f"empty factor in {body!r}")
            if factor.isdigit():
                coeff *= int(factor)
                continue
            match = _FACTOR_RE.match(factor)
            if not match:
                raise LaurentParseError(f"cannot read factor {factor!r}")
            index = int(match.group(1)) - 1
            if not 0 <= index < nvars:
                raise LaurentParseError(f"variable x{index + 1} outside x1..x{nvars}")
            exponent[index] += int(match.group(2)) if match.group(2) is not None else 1
        key = tuple(exponent)
        terms[key] = terms.get(key, 0) + coeff
    return LaurentPolynomial(nvars, terms)
