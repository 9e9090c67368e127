"""Exact sparse multivariate polynomials over the rationals.

Polynomials are immutable; every coefficient is a :class:`fractions.Fraction`
and terms are kept in graded lexicographic order (highest first), so two equal
polynomials always have identical term sequences.

The module also provides the expression parser used by model files, exact
sign evaluation at rational points (through an integer form that avoids
repeated gcd normalisation), vectorised float evaluation with a rounding
error bound, exact interval enclosures over boxes and a few univariate
helpers (Sturm sequences) needed to inspect restrictions to lines.
"""

from __future__ import annotations

import math
import re
from fractions import Fraction
from types import MappingProxyType
from typing import Iterable, Mapping, Sequence

import numpy as np

Exponent = tuple[int, ...]

_UNIT_ROUNDOFF = 2.0**-53


def _grlex_key(exp: Exponent):
    return (sum(exp), exp)


def _as_fraction(value) -> Fraction:
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, float):
        # floats are accepted only through their exact binary value
        return Fraction(value)
    if isinstance(value, str):
        return Fraction(value)
    raise TypeError(f"cannot use {type(value).__name__} as a rational coefficient")


class MultiPoly:
    """Sparse polynomial in ``num_vars`` variables with rational coefficients."""

    __slots__ = ("num_vars", "_terms", "_int_form", "_hash")

    def __init__(self, num_vars: int, terms: Mapping[Exponent, object] | Iterable = ()):
        if num_vars < 0:
            raise ValueError("num_vars must be nonnegative")
        items = terms.items() if isinstance(terms, Mapping) else terms
        acc: dict[Exponent, Fraction] = {}
        for exp, coeff in items:
            exp = tuple(int(e) for e in exp)
            if len(exp) != num_vars:
                raise ValueError(f"exponent {exp} does not have length {num_vars}")
            if any(e < 0 for e in exp):
                raise ValueError(f"negative exponent in {exp}")
            c = _as_fraction(coeff)
            if c:
                acc[exp] = acc.get(exp, Fraction(0)) + c
        ordered = sorted((e for e, c in acc.items() if c), key=_grlex_key, reverse=True)
        self.num_vars = num_vars
        self._terms = {e: acc[e] for e in ordered}
        self._int_form = None
        self._hash = None

    # -- construction helpers -------------------------------------------------
    @classmethod
    def zero(cls, num_vars: int) -> "MultiPoly":
        return cls(num_vars)

    @classmethod
    def constant(cls, num_vars: int, value) -> "MultiPoly":
        return cls(num_vars, {(0,) * num_vars: value})

    @classmethod
    def variable(cls, num_vars: int, index: int) -> "MultiPoly":
        if not 0 <= index < num_vars:
            raise IndexError(f"variable index {index} out of range for {num_vars} variables")
        exp = tuple(1 if i == index else 0 for i in range(num_vars))
        return cls(num_vars, {exp: 1})

    # -- basic protocol -------------------------------------------------------
    @property
    def terms(self) -> Mapping[Exponent, Fraction]:
        return MappingProxyType(self._terms)

    def __len__(self):
        return len(self._terms)

    def __iter__(self):
        return iter(self._terms.items())

    def is_zero(self) -> bool:
        return not self._terms

    def __bool__(self):
        return bool(self._terms)

    def __eq__(self, other):
        if isinstance(other, MultiPoly):
            return self.num_vars == other.num_vars and list(self._terms.items()) == list(
                other._terms.items()
            )
        if isinstance(other, (int, Fraction)):
            return self == MultiPoly.constant(self.num_vars, other)
        return NotImplemented

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.num_vars, tuple(self._terms.items())))
        return self._hash

    def __getstate__(self):
        return (self.num_vars, tuple(self._terms.items()))

    def __setstate__(self, state):
        num_vars, items = state
        self.num_vars = num_vars
        self._terms = dict(items)
        self._int_form = None
        self._hash = None

    def __repr__(self):
        return f"MultiPoly({self.num_vars}, {self.to_string()!r})"

    def __str__(self):
        return self.to_string()

    # -- degree information ---------------------------------------------------
    def total_degree(self) -> int:
        """Total degree; -1 for the zero polynomial."""
        return max((sum(e) for e in self._terms), default=-1)

    def degree_in(self, var_index: int) -> int:
        return max((e[var_index] for e in self._terms), default=-1)

    def leading_term(self) -> tuple[Exponent, Fraction]:
        if not self._terms:
            raise ValueError("zero polynomial has no leading term")
        return next(iter(self._terms.items()))

    def constant_term(self) -> Fraction:
        return self._terms.get((0,) * self.num_vars, Fraction(0))

    def variables_used(self) -> set[int]:
        return {i for e in self._terms for i, k in enumerate(e) if k}

    def max_abs_coefficient(self) -> Fraction:
        return max((abs(c) for c in self._terms.values()), default=Fraction(0))

    # -- arithmetic -----------------------------------------------------------
    def _coerce(self, other) -> "MultiPoly":
        if isinstance(other, MultiPoly):
            if other.num_vars != self.num_vars:
                raise ValueError(
                    f"polynomials over {self.num_vars} and {other.num_vars} variables cannot be combined"
                )
            return other
        if isinstance(other, (int, Fraction)):
            return MultiPoly.constant(self.num_vars, other)
        raise TypeError(f"unsupported operand type {type(other).__name__}")

    def __add__(self, other):
        try:
            other = self._coerce(other)
        except TypeError:
            return NotImplemented
        acc = dict(self._terms)
        for e, c in other._terms.items():
            acc[e] = acc.get(e, 0) + c
        return MultiPoly(self.num_vars, acc)

    __radd__ = __add__

    def __neg__(self):
        return MultiPoly(self.num_vars, {e: -c for e, c in self._terms.items()})

    def __sub__(self, other):
        try:
            other = self._coerce(other)
        except TypeError:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return MultiPoly(self.num_vars, {e: c * other for e, c in self._terms.items()})
        try:
            other = self._coerce(other)
        except TypeError:
            return NotImplemented
        acc: dict[Exponent, Fraction] = {}
        for e1, c1 in self._terms.items():
            for e2, c2 in other._terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                acc[e] = acc.get(e, 0) + c1 * c2
        return MultiPoly(self.num_vars, acc)

    __rmul__ = __mul__

    def __pow__(self, power: int):
        if not isinstance(power, int) or power < 0:
            raise ValueError("only nonnegative integer powers are supported")
        result = MultiPoly.constant(self.num_vars, 1)
        base = self
        while power:
            if power & 1:
                result = result * base
            power >>= 1
            if power:
                base = base * base
        return result

    def scale(self, factor) -> "MultiPoly":
        return self * _as_fraction(factor)

    # -- calculus ---------------------------------------------------------------
    def diff(self, var_index: int) -> "MultiPoly":
        if not 0 <= var_index < self.num_vars:
            raise IndexError(f"variable index {var_index} out of range for {self.num_vars} variables")
        acc = {}
        for e, c in self._terms.items():
            k = e[var_index]
            if k:
                ne = e[:var_index] + (k - 1,) + e[var_index + 1 :]
                acc[ne] = c * k
        return MultiPoly(self.num_vars, acc)

    def gradient(self) -> list["MultiPoly"]:
        return [self.diff(i) for i in range(self.num_vars)]

    def substitute(self, values: Mapping[int, object]) -> "MultiPoly":
        """Replace the listed variables by rational constants (variable count kept)."""
        vals = {i: _as_fraction(v) for i, v in values.items()}
        acc: dict[Exponent, Fraction] = {}
        for e, c in self._terms.items():
            coeff = c
            ne = list(e)
            for i, v in vals.items():
                if e[i]:
                    coeff *= v ** e[i]
                    ne[i] = 0
            ne = tuple(ne)
            acc[ne] = acc.get(ne, 0) + coeff
        return MultiPoly(self.num_vars, acc)

    def restrict_to_line(self, point: Sequence, direction: Sequence) -> list[Fraction]:
        """Coefficients (ascending) of t -> p(point + t*direction)."""
        point = [_as_fraction(x) for x in point]
        direction = [_as_fraction(x) for x in direction]
        if len(point) != self.num_vars or len(direction) != self.num_vars:
            raise ValueError("point/direction dimension mismatch")
        coeffs: list[Fraction] = [Fraction(0)] * (self.total_degree() + 1)
        for e, c in self._terms.items():
            term = [c]
            for i, k in enumerate(e):
                if k:
                    lin = [point[i], direction[i]]
                    term = _upoly_mul(term, _upoly_pow(lin, k))
            for d, v in enumerate(term):
                coeffs[d] += v
        return _upoly_trim(coeffs)

    # -- evaluation -------------------------------------------------------------
    def _integer_form(self):
        if self._int_form is None:
            den = 1
            for c in self._terms.values():
                den = den * c.denominator // math.gcd(den, c.denominator)
            ints = [(e, int(c * den)) for e, c in self._terms.items()]
            maxdeg = tuple(self.degree_in(i) if self._terms else 0 for i in range(self.num_vars))
            self._int_form = (den, ints, maxdeg)
        return self._int_form

    def _integer_value(self, point: Sequence[Fraction]) -> tuple[int, int]:
        """Return (N, D) with value = N / D and D > 0, using integer arithmetic only."""
        if len(point) != self.num_vars:
            raise ValueError(f"point has {len(point)} coordinates, polynomial has {self.num_vars} variables")
        den, ints, maxdeg = self._integer_form()
        nums, dens = [], []
        for x in point:
            x = _as_fraction(x)
            nums.append(x.numerator)
            dens.append(x.denominator)
        num_pows = [_powers(nums[i], maxdeg[i]) for i in range(self.num_vars)]
        den_pows = [_powers(dens[i], maxdeg[i]) for i in range(self.num_vars)]
        total = 0
        for e, c in ints:
            t = c
            for i, k in enumerate(e):
                t *= num_pows[i][k] * den_pows[i][maxdeg[i] - k]
            total += t
        scale = den
        for i in range(self.num_vars):
            scale *= den_pows[i][maxdeg[i]]
        return total, scale

    def evaluate(self, point: Sequence) -> Fraction:
        """Exact value at a rational point."""
        if not self._terms:
            if len(point) != self.num_vars:
                raise ValueError("dimension mismatch")
            return Fraction(0)
        n, d = self._integer_value(point)
        return Fraction(n, d)

    __call__ = evaluate

    def sign_at(self, point: Sequence) -> int:
        """Exact sign (-1, 0, 1) at a rational point."""
        if not self._terms:
            return 0
        n, _ = self._integer_value(point)
        return (n > 0) - (n < 0)

    def eval_float(self, *coords):
        """Vectorised float evaluation; returns (values, abs_sum).

        ``abs_sum`` is sum |c| |x^e| and bounds the rounding error of ``values``
        up to a factor ``error_factor()``.
        """
        arrays = [np.asarray(c, dtype=float) for c in coords]
        if len(arrays) != self.num_vars:
            raise ValueError("dimension mismatch")
        shape = np.broadcast_shapes(*(a.shape for a in arrays)) if arrays else ()
        value = np.zeros(shape)
        absval = np.zeros(shape)
        pow_cache: dict[tuple[int, int], np.ndarray] = {}

        def power(i, k):
            key = (i, k)
            if key not in pow_cache:
                pow_cache[key] = arrays[i] ** k
            return pow_cache[key]

        for e, c in self._terms.items():
            term = np.full(shape, float(c))
            for i, k in enumerate(e):
                if k:
                    term = term * power(i, k)
            value += term
            absval += np.abs(term)
        return value, absval

    def error_factor(self) -> float:
        """Multiplier turning ``abs_sum`` into a rounding error bound for eval_float."""
        deg = max(self.total_degree(), 0)
        return 4.0 * (2 * deg + len(self._terms) + 4) * _UNIT_ROUNDOFF

    def to_callable(self):
        """Plain float function f(*coords) (no error information)."""
        def f(*coords):
            return self.eval_float(*coords)[0]
        return f

    # -- printing ---------------------------------------------------------------
    def to_string(self, names: Sequence[str] | None = None) -> str:
        if names is None:
            names = [f"l{i + 1}" for i in range(self.num_vars)]
        if not self._terms:
            return "0"
        out = []
        for idx, (e, c) in enumerate(self._terms.items()):
            mono = "*".join(
                names[i] if k == 1 else f"{names[i]}^{k}" for i, k in enumerate(e) if k
            )
            mag = abs(c)
            mag_s = str(mag.numerator) if mag.denominator == 1 else f"{mag.numerator}/{mag.denominator}"
            if mono:
                body = mono if mag == 1 else f"{mag_s}*{mono}"
            else:
                body = mag_s
            if idx == 0:
                out.append("-" + body if c < 0 else body)
            else:
                out.append((" - " if c < 0 else " + ") + body)
        return "".join(out)


def _powers(base: int, n: int) -> list[int]:
    out = [1] * (n + 1)
    for i in range(1, n + 1):
        out[i] = out[i - 1] * base
    return out


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------

class PolySyntaxError(ValueError):
    """Raised for malformed polynomial expressions; ``position`` is a 0-based offset."""

    def __init__(self, message: str, position: int, text: str = ""):
        self.position = position
        self.text = text
        pointer = f"\n  {text}\n  {' ' * position}^" if text else ""
        super().__init__(f"{message} at position {position}{pointer}")


_TOKEN_RE = re.compile(r"\s*(?:(\d+)|([A-Za-z_][A-Za-z_0-9]*)|(\S))")


def _tokenize(text: str):
    tokens = []
    pos = 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None:  # only trailing whitespace left
            break
        if m.group(1) is not None:
            tokens.append(("int", m.group(1), m.start(1)))
        elif m.group(2) is not None:
            tokens.append(("name", m.group(2), m.start(2)))
        else:
            ch = m.group(3)
            if ch not in "+-*/^()":
                raise PolySyntaxError(f"unexpected character {ch!r}", m.start(3), text)
            tokens.append((ch, ch, m.start(3)))
        pos = m.end()
    tokens.append(("end", "", len(text)))
    return tokens


class _Parser:
    def __init__(self, text: str, variables: Sequence[str]):
        self.text = text
        self.tokens = _tokenize(text)
        self.i = 0
        self.index = {name: k for k, name in enumerate(variables)}
        self.nv = len(variables)

    def peek(self):
        return self.tokens[self.i]

    def take(self):
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def error(self, message, tok=None):
        tok = tok or self.peek()
        return PolySyntaxError(message, tok[2], self.text)

    def parse(self) -> MultiPoly:
        if self.peek()[0] == "end":
            raise self.error("empty expression")
        p = self.expr()
        tok = self.peek()
        if tok[0] != "end":
            if tok[0] in ("int", "name", "("):
                raise self.error("implicit multiplication is not allowed; use '*'")
            raise self.error(f"unexpected {tok[1]!r}")
        return p

    def expr(self) -> MultiPoly:
        p = self.term()
        while self.peek()[0] in ("+", "-"):
            op = self.take()[0]
            q = self.term()
            p = p + q if op == "+" else p - q
        return p

    def term(self) -> MultiPoly:
        p = self.factor()
        while self.peek()[0] == "*":
            self.take()
            p = p * self.factor()
        return p

    def factor(self) -> MultiPoly:
        if self.peek()[0] == "-":
            # unary minus binds looser than '^': -l1^2 is -(l1^2)
            self.take()
            return -self.factor()
        p = self.base()
        if self.peek()[0] == "^":
            self.take()
            tok = self.peek()
            if tok[0] != "int":
                raise self.error("exponent must be a nonnegative integer literal", tok)
            self.take()
            p = p ** int(tok[1])
        return p

    def base(self) -> MultiPoly:
        tok = self.peek()
        kind = tok[0]
        if kind == "(":
            self.take()
            p = self.expr()
            if self.peek()[0] != ")":
                raise self.error("expected ')'")
            self.take()
            return p
        if kind == "int":
            return self.rational()
        if kind == "name":
            self.take()
            name = tok[1]
            if name not in self.index:
                raise self.error(f"unknown variable {name!r}", tok)
            return MultiPoly.variable(self.nv, self.index[name])
        if kind == "end":
            raise self.error("unexpected end of expression")
        raise self.error(f"unexpected {tok[1]!r}")

    def rational(self) -> MultiPoly:
        num = int(self.take()[1])
        if self.peek()[0] == "/":
            slash = self.take()
            tok = self.peek()
            if tok[0] != "int":
                raise self.error("expected an unsigned integer denominator", tok)
            self.take()
            den = int(tok[1])
            if den == 0:
                raise self.error("zero denominator", slash)
            return MultiPoly.constant(self.nv, Fraction(num, den))
        return MultiPoly.constant(self.nv, num)


_VAR_NAME = re.compile(r"l[0-9]+\Z")


def default_vars(k: int) -> list[str]:
    return [f"l{i + 1}" for i in range(k)]


def parse_poly(expr: str, variables: Sequence[str]) -> MultiPoly:
    """Parse ``expr`` into a polynomial over ``variables`` (names ``l1``, ``l2``, ...)."""
    variables = list(variables)
    if not variables:
        raise ValueError("variable list must be nonempty")
    if len(set(variables)) != len(variables):
        raise ValueError("variable names must be distinct")
    for v in variables:
        if not _VAR_NAME.match(v):
            raise ValueError(f"variable name {v!r} is not of the form l<uint>")
    return _Parser(expr, variables).parse()


# ---------------------------------------------------------------------------
# matrices of polynomials
# ---------------------------------------------------------------------------

class PolyMatrix:
    """Rectangular matrix of polynomials sharing one variable count."""

    __slots__ = ("rows", "cols", "num_vars", "entries")

    def __init__(self, entries: Sequence[Sequence[MultiPoly]], num_vars: int | None = None):
        rows = [tuple(r) for r in entries]
        if not rows or not rows[0]:
            raise ValueError("matrix must have at least one row and column")
        cols = len(rows[0])
        if any(len(r) != cols for r in rows):
            raise ValueError("ragged matrix")
        nv = rows[0][0].num_vars if num_vars is None else num_vars
        if any(p.num_vars != nv for r in rows for p in r):
            raise ValueError("matrix entries do not share num_vars")
        self.rows = len(rows)
        self.cols = cols
        self.num_vars = nv
        self.entries = tuple(rows)

    @classmethod
    def identity(cls, n: int, num_vars: int, scale=1) -> "PolyMatrix":
        one = MultiPoly.constant(num_vars, scale)
        zero = MultiPoly.zero(num_vars)
        return cls([[one if i == j else zero for j in range(n)] for i in range(n)], num_vars)

    @classmethod
    def from_strings(cls, rows: Sequence[Sequence[str]], variables: Sequence[str]) -> "PolyMatrix":
        return cls([[parse_poly(s, variables) for s in r] for r in rows], len(variables))

    @property
    def shape(self):
        return (self.rows, self.cols)

    def __getitem__(self, idx):
        i, j = idx
        return self.entries[i][j]

    def __eq__(self, other):
        return isinstance(other, PolyMatrix) and self.entries == other.entries

    def __hash__(self):
        return hash(self.entries)

    def __repr__(self):
        body = "; ".join(", ".join(str(p) for p in r) for r in self.entries)
        return f"PolyMatrix([{body}])"

    def is_square(self) -> bool:
        return self.rows == self.cols

    def is_symmetric(self) -> bool:
        return self.is_square() and all(
            self.entries[i][j] == self.entries[j][i] for i in range(self.rows) for j in range(i)
        )

    def transpose(self) -> "PolyMatrix":
        return PolyMatrix([[self.entries[i][j] for i in range(self.rows)] for j in range(self.cols)], self.num_vars)

    def __add__(self, other: "PolyMatrix") -> "PolyMatrix":
        if self.shape != other.shape:
            raise ValueError("shape mismatch")
        return PolyMatrix(
            [[a + b for a, b in zip(r1, r2)] for r1, r2 in zip(self.entries, other.entries)], self.num_vars
        )

    def __sub__(self, other: "PolyMatrix") -> "PolyMatrix":
        if self.shape != other.shape:
            raise ValueError("shape mismatch")
        return PolyMatrix(
            [[a - b for a, b in zip(r1, r2)] for r1, r2 in zip(self.entries, other.entries)], self.num_vars
        )

    def __matmul__(self, other: "PolyMatrix") -> "PolyMatrix":
        if self.cols != other.rows:
            raise ValueError("inner dimensions do not agree")
        out = []
        for i in range(self.rows):
            row = []
            for j in range(other.cols):
                acc = MultiPoly.zero(self.num_vars)
                for k in range(self.cols):
                    a, b = self.entries[i][k], other.entries[k][j]
                    if a and b:
                        acc = acc + a * b
                row.append(acc)
            out.append(row)
        return PolyMatrix(out, self.num_vars)

    def evaluate(self, point: Sequence) -> list[list[Fraction]]:
        return [[p.evaluate(point) for p in r] for r in self.entries]

    def eval_float(self, *coords) -> np.ndarray:
        """Float values with the matrix axes last: shape coords.shape + (rows, cols)."""
        vals = [[p.eval_float(*coords)[0] for p in r] for r in self.entries]
        arr = np.array(vals, dtype=float)
        return np.moveaxis(np.moveaxis(arr, 0, -1), 0, -1)


def block_diag(a: PolyMatrix, b: PolyMatrix) -> PolyMatrix:
    nv = a.num_vars
    zero = MultiPoly.zero(nv)
    rows = [list(r) + [zero] * b.cols for r in a.entries]
    rows += [[zero] * a.cols + list(r) for r in b.entries]
    return PolyMatrix(rows, nv)


def poly_eval(p: MultiPoly, point: Sequence) -> Fraction:
    return p.evaluate(point)


def poly_diff(p: MultiPoly, var_index: int) -> MultiPoly:
    return p.diff(var_index)


def gradient(p: MultiPoly) -> list[MultiPoly]:
    return p.gradient()


def jacobian2(g: MultiPoly, f: MultiPoly) -> MultiPoly:
    """dg/dl1 * df/dl2 - dg/dl2 * df/dl1 for two-variable polynomials."""
    if g.num_vars != 2 or f.num_vars != 2:
        raise ValueError("jacobian2 needs polynomials in exactly two variables")
    return g.diff(0) * f.diff(1) - g.diff(1) * f.diff(0)


def exact_divide(p: MultiPoly, q: MultiPoly) -> MultiPoly:
    """Quotient p / q, which must be exact."""
    if q.is_zero():
        raise ZeroDivisionError("division by the zero polynomial")
    qe, qc = q.leading_term()
    quotient: dict[Exponent, Fraction] = {}
    rem = p
    while not rem.is_zero():
        re_, rc = rem.leading_term()
        diff = tuple(a - b for a, b in zip(re_, qe))
        if any(d < 0 for d in diff):
            raise ValueError("polynomial division is not exact")
        c = rc / qc
        quotient[diff] = c
        rem = rem - q * MultiPoly(p.num_vars, {diff: c})
    return MultiPoly(p.num_vars, quotient)


def _det_cofactor(m: list[list[MultiPoly]], nv: int) -> MultiPoly:
    n = len(m)
    if n == 1:
        return m[0][0]
    if n == 2:
        return m[0][0] * m[1][1] - m[0][1] * m[1][0]
    total = MultiPoly.zero(nv)
    for j, a in enumerate(m[0]):
        if not a:
            continue
        minor = [row[:j] + row[j + 1 :] for row in m[1:]]
        term = a * _det_cofactor(minor, nv)
        total = total + term if j % 2 == 0 else total - term
    return total


def _det_bareiss(m: list[list[MultiPoly]], nv: int) -> MultiPoly:
    a = [list(r) for r in m]
    n = len(a)
    sign = 1
    prev = MultiPoly.constant(nv, 1)
    for k in range(n - 1):
        if not a[k][k]:
            swap = next((i for i in range(k + 1, n) if a[i][k]), None)
            if swap is None:
                return MultiPoly.zero(nv)
            a[k], a[swap] = a[swap], a[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                a[i][j] = exact_divide(a[i][j] * a[k][k] - a[i][k] * a[k][j], prev)
        prev = a[k][k]
    det = a[n - 1][n - 1]
    return det if sign > 0 else -det


def poly_det(m: PolyMatrix) -> MultiPoly:
    """Exact determinant: cofactor expansion up to 4x4, fraction-free Bareiss beyond."""
    if not m.is_square():
        raise ValueError(f"determinant of a non-square {m.rows}x{m.cols} matrix")
    rows = [list(r) for r in m.entries]
    if m.rows <= 4:
        return _det_cofactor(rows, m.num_vars)
    return _det_bareiss(rows, m.num_vars)


# ---------------------------------------------------------------------------
# interval enclosures
# ---------------------------------------------------------------------------

def _power_range(lo: Fraction, hi: Fraction, k: int) -> tuple[Fraction, Fraction]:
    if k == 0:
        return Fraction(1), Fraction(1)
    a, b = lo**k, hi**k
    if k % 2 == 0 and lo < 0 < hi:
        return Fraction(0), max(a, b)
    return min(a, b), max(a, b)


def interval_eval(p: MultiPoly, box: Sequence[tuple]) -> tuple[Fraction, Fraction]:
    """Exact enclosure [lo, hi] of p over a box (naive monomial-wise interval arithmetic)."""
    if len(box) != p.num_vars:
        raise ValueError("box dimension mismatch")
    bounds = [(_as_fraction(a), _as_fraction(b)) for a, b in box]
    lo = hi = Fraction(0)
    cache: dict[tuple[int, int], tuple[Fraction, Fraction]] = {}
    for e, c in p:
        mlo, mhi = Fraction(1), Fraction(1)
        for i, k in enumerate(e):
            if not k:
                continue
            key = (i, k)
            if key not in cache:
                cache[key] = _power_range(bounds[i][0], bounds[i][1], k)
            a, b = cache[key]
            prods = (mlo * a, mlo * b, mhi * a, mhi * b)
            mlo, mhi = min(prods), max(prods)
        if c > 0:
            lo += c * mlo
            hi += c * mhi
        else:
            lo += c * mhi
            hi += c * mlo
    return lo, hi


def interval_abs_bound(p: MultiPoly, box: Sequence[tuple]) -> Fraction:
    lo, hi = interval_eval(p, box)
    return max(abs(lo), abs(hi))


def _float_power_range(lo: np.ndarray, hi: np.ndarray, k: int):
    a, b = lo**k, hi**k
    pmin, pmax = np.minimum(a, b), np.maximum(a, b)
    if k % 2 == 0:
        pmin = np.where((lo < 0) & (hi > 0), 0.0, pmin)
    return pmin, pmax


def interval_eval_float(p: MultiPoly, lows: Sequence[np.ndarray], highs: Sequence[np.ndarray]):
    """Vectorised float enclosure of p over many boxes, widened for rounding.

    ``lows[i]``/``highs[i]`` hold the bounds of variable i for every box.
    The returned (lo, hi) arrays contain the exact range up to the rounding
    margin added, which bounds the float error of the monomial evaluation.
    """
    lows = [np.asarray(x, dtype=float) for x in lows]
    highs = [np.asarray(x, dtype=float) for x in highs]
    shape = np.broadcast_shapes(*(x.shape for x in lows + highs))
    lo = np.zeros(shape)
    hi = np.zeros(shape)
    mag = np.zeros(shape)
    cache = {}
    for e, c in p:
        mlo = np.ones(shape)
        mhi = np.ones(shape)
        for i, k in enumerate(e):
            if not k:
                continue
            if (i, k) not in cache:
                cache[(i, k)] = _float_power_range(lows[i], highs[i], k)
            a, b = cache[(i, k)]
            prods = (mlo * a, mlo * b, mhi * a, mhi * b)
            mlo = np.minimum.reduce(prods)
            mhi = np.maximum.reduce(prods)
        cf = float(c)
        if cf > 0:
            lo += cf * mlo
            hi += cf * mhi
        else:
            lo += cf * mhi
            hi += cf * mlo
        mag += abs(cf) * np.maximum(np.abs(mlo), np.abs(mhi))
    margin = mag * (p.error_factor() + 4.0 * max(p.total_degree(), 1) * _UNIT_ROUNDOFF) + 1e-300
    return lo - margin, hi + margin


# ---------------------------------------------------------------------------
# exact signs on grids
# ---------------------------------------------------------------------------

def sign_grid(p: MultiPoly, axes: Sequence[Sequence[Fraction]]) -> np.ndarray:
    """Exact signs of p on the tensor grid ``axes`` (indexing='ij').

    Float evaluation is used wherever its rounding bound certifies the sign;
    the remaining points are decided by exact rational evaluation.
    """
    if len(axes) != p.num_vars:
        raise ValueError("grid dimension mismatch")
    shape = tuple(len(a) for a in axes)
    if p.is_zero():
        return np.zeros(shape, dtype=np.int8)
    float_axes = [np.array([float(x) for x in a]) for a in axes]
    mesh = np.meshgrid(*float_axes, indexing="ij")
    val, absval = p.eval_float(*mesh)
    # coordinate conversion error: relative u per coordinate, amplified by the exponent
    bound = absval * (p.error_factor() + 2.0 * max(p.total_degree(), 1) * _UNIT_ROUNDOFF)
    signs = np.sign(val).astype(np.int8)
    unsure = np.argwhere(~(np.abs(val) > bound))
    for idx in unsure:
        point = [axes[d][idx[d]] for d in range(len(axes))]
        signs[tuple(idx)] = p.sign_at(point)
    return signs


def sign_points(p: MultiPoly, *coords) -> np.ndarray:
    """Exact signs of p at float points (each float is taken as its exact rational value)."""
    arrays = [np.asarray(c, dtype=float) for c in coords]
    shape = np.broadcast_shapes(*(a.shape for a in arrays))
    if p.is_zero():
        return np.zeros(shape, dtype=np.int8)
    val, absval = p.eval_float(*arrays)
    bound = absval * p.error_factor()
    signs = np.sign(val).astype(np.int8)
    unsure = np.argwhere(~(np.abs(val) > bound))
    arrays = [np.broadcast_to(a, shape) for a in arrays]
    for idx in unsure:
        idx = tuple(idx)
        signs[idx] = p.sign_at([Fraction(float(a[idx])) for a in arrays])
    return signs


def certified_min_abs(p: MultiPoly, axes: Sequence[Sequence[Fraction]]) -> float:
    """A lower bound for min |p| over the grid points (0 if p vanishes at one)."""
    float_axes = [np.array([float(x) for x in a]) for a in axes]
    mesh = np.meshgrid(*float_axes, indexing="ij")
    val, absval = p.eval_float(*mesh)
    bound = absval * (p.error_factor() + 2.0 * max(p.total_degree(), 1) * _UNIT_ROUNDOFF)
    low = np.abs(val) - bound
    return float(max(low.min(), 0.0))


# ---------------------------------------------------------------------------
# univariate helpers (ascending coefficient lists of Fractions)
# ---------------------------------------------------------------------------

def _upoly_trim(c: list) -> list:
    c = list(c)
    while c and c[-1] == 0:
        c.pop()
    return c


def _upoly_mul(a: list, b: list) -> list:
    if not a or not b:
        return []
    out = [Fraction(0)] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] += x * y
    return out


def _upoly_pow(a: list, k: int) -> list:
    out = [Fraction(1)]
    for _ in range(k):
        out = _upoly_mul(out, a)
    return out


def _upoly_rem(a: list, b: list) -> list:
    a = _upoly_trim(a)
    b = _upoly_trim(b)
    if not b:
        raise ZeroDivisionError("division by zero polynomial")
    while len(a) >= len(b):
        f = a[-1] / b[-1]
        shift = len(a) - len(b)
        for i, y in enumerate(b):
            a[i + shift] -= f * y
        a = _upoly_trim(a)
        if not a:
            break
    return a


def _upoly_deriv(a: list) -> list:
    return [a[i] * i for i in range(1, len(a))]


def upoly_eval(a: list, x) -> Fraction:
    x = _as_fraction(x)
    acc = Fraction(0)
    for c in reversed(a):
        acc = acc * x + c
    return acc


def sturm_sequence(a: list) -> list[list]:
    a = _upoly_trim([_as_fraction(c) for c in a])
    seq = [a, _upoly_deriv(a)]
    while seq[-1]:
        r = _upoly_rem(seq[-2], seq[-1])
        seq.append([-c for c in r])
    return [s for s in seq if s]


def _sign_changes(values: Iterable[Fraction]) -> int:
    signs = [v > 0 for v in values if v != 0]
    return sum(1 for s, t in zip(signs, signs[1:]) if s != t)


def count_real_roots(a: list, lo, hi) -> int:
    """Number of distinct real roots in the half-open interval (lo, hi]."""
    a = _upoly_trim([_as_fraction(c) for c in a])
    if not a:
        raise ValueError("the zero polynomial has infinitely many roots")
    if len(a) == 1:
        return 0
    seq = sturm_sequence(a)
    return _sign_changes(upoly_eval(s, lo) for s in seq) - _sign_changes(upoly_eval(s, hi) for s in seq)


def univariate_restriction(p: MultiPoly, var_index: int) -> list[Fraction]:
    """Coefficients of p restricted to the coordinate axis of ``var_index``."""
    point = [0] * p.num_vars
    direction = [1 if i == var_index else 0 for i in range(p.num_vars)]
    return p.restrict_to_line(point, direction)


def random_poly(rng, num_vars: int, max_terms: int = 6, max_degree: int = 4, max_coeff: int = 9) -> MultiPoly:
    """Random sparse polynomial, for property tests and self-checks."""
    terms = {}
    for _ in range(rng.integers(0, max_terms + 1)):
        exp = tuple(int(x) for x in rng.integers(0, max_degree + 1, size=num_vars))
        num = int(rng.integers(-max_coeff, max_coeff + 1))
        den = int(rng.integers(1, 5))
        terms[exp] = Fraction(num, den)
    return MultiPoly(num_vars, terms)


def product(polys: Iterable[MultiPoly], num_vars: int) -> MultiPoly:
    out = MultiPoly.constant(num_vars, 1)
    for p in polys:
        out = out * p
    return out


__all__ = [
    "MultiPoly",
    "PolyMatrix",
    "PolySyntaxError",
    "parse_poly",
    "default_vars",
    "poly_eval",
    "poly_diff",
    "gradient",
    "poly_det",
    "jacobian2",
    "exact_divide",
    "block_diag",
    "interval_eval",
    "interval_abs_bound",
    "interval_eval_float",
    "sign_grid",
    "certified_min_abs",
    "sign_points",
    "count_real_roots",
    "univariate_restriction",
    "sturm_sequence",
    "upoly_eval",
    "product",
    "random_poly",
]
