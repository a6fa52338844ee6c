import cmath
import functools
import re
from fractions import Fraction
from math import gcd
from typing import List, Sequence, Tuple

from . import format_rational, parse_rational
from .exceptions import DivisionByZero, QuantumDenominatorZero


CYC_TEXT_PATTERN = re.compile(r'^\s*cyc\(\s*(\d+)\s*\)\s*\[(.*)\]\s*$')


def _lcm(a: int, b: int) -> int:
    return a // gcd(a, b) * b


def _trim(p: List) -> List:
    while p and p[-1] == 0:
        p.pop()
    return p


def _poly_divmod(n: Sequence, d: Sequence) -> Tuple[List, List]:
    # Coefficient lists are low degree first; d must be trimmed.
    r = _trim(list(n))
    q = [0] * max(len(r) - len(d) + 1, 1)
    lead = d[-1]
    while len(r) >= len(d) and r:
        shift = len(r) - len(d)
        t = r[-1] if lead == 1 else Fraction(r[-1]) / lead
        q[shift] = t
        for i, c in enumerate(d):
            r[shift + i] -= t * c
        _trim(r)
    return _trim(q), r


def _poly_mul(a: Sequence, b: Sequence) -> List:
    if not a or not b:
        return []
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] += x * y
    return _trim(out)


def _poly_sub(a: Sequence, b: Sequence) -> List:
    out = list(a) + [0] * max(0, len(b) - len(a))
    for i, y in enumerate(b):
        out[i] -= y
    return _trim(out)


def _integral(coeffs: Sequence) -> Tuple[int, List[int]]:
    # (d, [d * c]) with d the least common denominator
    den = 1
    for c in coeffs:
        if isinstance(c, Fraction) and c.denominator != 1:
            den = _lcm(den, c.denominator)
    if den == 1:
        return 1, [int(c) for c in coeffs]
    return den, [c.numerator * (den // c.denominator) if isinstance(c, Fraction) else c * den for c in coeffs]


@functools.lru_cache(maxsize=None)
def cyclotomic_poly(n: int) -> Tuple[int, ...]:
    """Integer coefficients of the n-th cyclotomic polynomial, constant term first."""
    if n < 1:
        raise ValueError('The conductor must be positive.')

    # Start with x^n - 1 and divide out the cyclotomic polynomials of the proper divisors.
    poly = [-1] + [0] * (n - 1) + [1]
    for d in range(1, n):
        if n % d == 0:
            poly, rem = _poly_divmod(poly, cyclotomic_poly(d))
            assert not rem
    return tuple(int(c) for c in poly)


@functools.lru_cache(maxsize=None)
def _power_table(n: int) -> Tuple[Tuple[Tuple[int, int], ...], ...]:
    # Row k holds the sparse reduction of x^k modulo Phi_n, for 0 <= k < n.
    phi = cyclotomic_poly(n)
    deg = len(phi) - 1
    cur = [0] * deg
    cur[0] = 1
    rows = []
    for _ in range(n):
        rows.append(tuple((i, c) for i, c in enumerate(cur) if c))
        lead = cur[-1]
        cur = [0] + cur[:-1]
        if lead:
            for i in range(deg):
                cur[i] -= lead * phi[i]
    return tuple(rows)


def degree(n: int) -> int:
    return len(cyclotomic_poly(n)) - 1


class CycNumber:
    """
    An element of Q(zeta_N) in the power basis of Q[x]/(Phi_N).

    Values are immutable. Mixed conductors are embedded into their lcm, ints and
    Fractions are coerced, so CycNumbers can sit in numpy object arrays.
    """

    __slots__ = ('conductor', 'coeffs')

    def __init__(self, conductor: int, coeffs: Sequence):
        if len(coeffs) != degree(conductor):
            raise ValueError(f'conductor {conductor} needs {degree(conductor)} coefficients, got {len(coeffs)}')
        object.__setattr__(self, 'conductor', conductor)
        object.__setattr__(self, 'coeffs', tuple(coeffs))

    def __setattr__(self, key, value):
        raise AttributeError('CycNumber is immutable')

    __hash__ = None

    @staticmethod
    def rational(x) -> 'CycNumber':
        return CycNumber(1, (Fraction(x),))

    @staticmethod
    def from_powers(n: int, powers) -> 'CycNumber':
        """Reduce sum(c * x^k) for (k, c) in powers, exponents taken mod n."""
        table = _power_table(n)
        out = [0] * degree(n)
        for k, c in powers:
            if not c:
                continue
            for i, t in table[k % n]:
                out[i] += c * t
        return CycNumber(n, out)

    def is_rational(self) -> bool:
        return len(self.coeffs) == 1 or not any(self.coeffs[1:])

    def rational_value(self) -> Fraction:
        if not self.is_rational():
            raise ValueError(f'{self} is not rational')
        # Conductors 1 and 2 both have degree one; everything else keeps rationals in c0.
        return Fraction(self.coeffs[0])

    def embed(self, m: int) -> 'CycNumber':
        n = self.conductor
        if m == n:
            return self
        if m % n:
            raise ValueError(f'cannot embed conductor {n} into {m}')
        if len(self.coeffs) == 1:
            return CycNumber(m, (self.coeffs[0],) + (0,) * (degree(m) - 1))
        step = m // n
        return CycNumber.from_powers(m, ((k * step, c) for k, c in enumerate(self.coeffs)))

    def is_zero(self) -> bool:
        return not any(self.coeffs)

    def __bool__(self):
        return any(self.coeffs)

    # Arithmetic

    def _align(self, other) -> Tuple[int, Tuple, Tuple]:
        other = as_cyc(other)
        n, m = self.conductor, other.conductor
        if n == m:
            return n, self.coeffs, other.coeffs
        if len(other.coeffs) == 1:
            return n, self.coeffs, (other.coeffs[0],) + (0,) * (len(self.coeffs) - 1)
        if len(self.coeffs) == 1:
            return m, (self.coeffs[0],) + (0,) * (len(other.coeffs) - 1), other.coeffs
        lcm = _lcm(n, m)
        return lcm, self.embed(lcm).coeffs, other.embed(lcm).coeffs

    def __add__(self, other):
        if not isinstance(other, (CycNumber, int, Fraction)):
            return NotImplemented
        n, a, b = self._align(other)
        return CycNumber(n, [x + y for x, y in zip(a, b)])

    __radd__ = __add__

    def __neg__(self):
        return CycNumber(self.conductor, [-x for x in self.coeffs])

    def __sub__(self, other):
        if not isinstance(other, (CycNumber, int, Fraction)):
            return NotImplemented
        n, a, b = self._align(other)
        return CycNumber(n, [x - y for x, y in zip(a, b)])

    def __rsub__(self, other):
        return as_cyc(other) - self

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return CycNumber(self.conductor, [x * other for x in self.coeffs])
        if not isinstance(other, CycNumber):
            return NotImplemented
        if len(other.coeffs) == 1:
            s = other.coeffs[0]
            return CycNumber(self.conductor, [x * s for x in self.coeffs])
        if len(self.coeffs) == 1:
            s = self.coeffs[0]
            return CycNumber(other.conductor, [x * s for x in other.coeffs])

        # Multiply integer numerators and divide once at the end.
        n, a, b = self._align(other)
        da, ia = _integral(a)
        db, ib = _integral(b)
        nz_b = [(j, y) for j, y in enumerate(ib) if y]
        acc = [0] * (len(ia) + len(ib) - 1)
        for i, x in enumerate(ia):
            if x:
                for j, y in nz_b:
                    acc[i + j] += x * y
        out = CycNumber.from_powers(n, enumerate(acc))
        den = da * db
        if den == 1:
            return out
        return CycNumber(n, [Fraction(c, den) if c else 0 for c in out.coeffs])

    __rmul__ = __mul__

    def inverse(self) -> 'CycNumber':
        if self.is_zero():
            raise DivisionByZero('division by zero in a cyclotomic field')
        n = self.conductor
        if len(self.coeffs) == 1:
            return CycNumber(n, (1 / Fraction(self.coeffs[0]),))

        # Extended Euclid against Phi_n; the gcd is a nonzero constant since Phi_n is irreducible.
        r0, r1 = list(cyclotomic_poly(n)), _trim(list(self.coeffs))
        s0, s1 = [], [1]
        while r1:
            quo, rem = _poly_divmod(r0, r1)
            r0, r1 = r1, rem
            s0, s1 = s1, _poly_sub(s0, _poly_mul(quo, s1))
        c = Fraction(r0[0])
        return CycNumber.from_powers(n, ((k, x / c) for k, x in enumerate(s0)))

    def __truediv__(self, other):
        if not isinstance(other, (CycNumber, int, Fraction)):
            return NotImplemented
        return self * as_cyc(other).inverse()

    def __rtruediv__(self, other):
        return as_cyc(other) * self.inverse()

    def __pow__(self, k: int):
        if k < 0:
            return self.inverse() ** (-k)
        result = ONE
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def __eq__(self, other):
        if not isinstance(other, (CycNumber, int, Fraction)):
            return NotImplemented
        n, a, b = self._align(other)
        return all(x == y for x, y in zip(a, b))

    def __ne__(self, other):
        eq = self.__eq__(other)
        return eq if eq is NotImplemented else not eq

    def conj(self) -> 'CycNumber':
        n = self.conductor
        return CycNumber.from_powers(n, (((n - k) % n, c) for k, c in enumerate(self.coeffs)))

    def to_float(self) -> complex:
        n = self.conductor
        return sum((complex(float(c)) * cmath.exp(2j * cmath.pi * k / n) for k, c in enumerate(self.coeffs) if c),
                   0j)

    # Text and JSON forms

    def __str__(self):
        return f'cyc({self.conductor})[{", ".join(format_rational(c) for c in self.coeffs)}]'

    __repr__ = __str__

    def to_json(self) -> dict:
        return {'conductor': self.conductor, 'coeffs': [format_rational(c) for c in self.coeffs]}

    @staticmethod
    def from_json(obj: dict) -> 'CycNumber':
        return CycNumber(int(obj['conductor']), [parse_rational(c) for c in obj['coeffs']])

    @staticmethod
    def parse(text: str) -> 'CycNumber':
        match = CYC_TEXT_PATTERN.match(text)
        if not match:
            raise ValueError(f'not a cyclotomic number: {text!r}')
        n = int(match.group(1))
        body = match.group(2).strip()
        coeffs = [parse_rational(c) for c in body.split(',')] if body else []
        return CycNumber(n, coeffs)


ZERO = CycNumber(1, (Fraction(0),))
ONE = CycNumber(1, (Fraction(1),))


def as_cyc(x) -> CycNumber:
    if isinstance(x, CycNumber):
        return x
    if isinstance(x, (int, Fraction)):
        return CycNumber.rational(x)
    raise TypeError(f'cannot coerce {type(x).__name__} to CycNumber')


def root_of_unity(n: int, k: int) -> CycNumber:
    if n < 1:
        raise ValueError('The conductor must be positive.')
    return CycNumber.from_powers(n, ((k % n, 1),))


def field_op(a, b, which: str):
    a, b = as_cyc(a), as_cyc(b)
    if which == 'add':
        return a + b
    if which == 'sub':
        return a - b
    if which == 'mul':
        return a * b
    if which == 'div':
        return a / b
    if which == 'eq':
        return a == b
    raise ValueError(f'unknown field operation {which!r}')


def conj(a) -> CycNumber:
    return as_cyc(a).conj()


def to_float(a) -> complex:
    return as_cyc(a).to_float()


@functools.lru_cache(maxsize=None)
def _q_power(ell: int, x: Fraction) -> CycNumber:
    return root_of_unity(ell * x.denominator, x.numerator)


def q_power(ell: int, x) -> CycNumber:
    """q^x = exp(2 pi i x / ell), living in Q(zeta_{ell * den(x)})."""
    if ell < 2:
        raise ValueError('ell must be at least 2')
    return _q_power(ell, Fraction(x))


def quantum_integer(ell: int, x) -> CycNumber:
    """[x] = q^x - q^-x."""
    x = Fraction(x)
    return q_power(ell, x) - q_power(ell, -x)


@functools.lru_cache(maxsize=None)
def _quantum_number(ell: int, x: Fraction) -> CycNumber:
    unit = quantum_integer(ell, 1)
    if unit.is_zero():
        raise QuantumDenominatorZero(f'[1] vanishes at ell={ell}')
    return quantum_integer(ell, x) / unit


def quantum_number(ell: int, x) -> CycNumber:
    """The symmetric quantum number [x]/[1]."""
    return _quantum_number(ell, Fraction(x))


def quantum_factorial(ell: int, k: int) -> CycNumber:
    if k < 0:
        raise ValueError('factorial of a negative integer')
    result = ONE
    for j in range(1, k + 1):
        result = result * quantum_number(ell, j)
    return result


def quantum_binomial(ell: int, k: int, j: int) -> CycNumber:
    if not 0 <= j <= k:
        raise ValueError(f'binomial needs 0 <= j <= k, got k={k}, j={j}')
    den = quantum_factorial(ell, j) * quantum_factorial(ell, k - j)
    if den.is_zero():
        raise QuantumDenominatorZero(f'vanishing quantum factorial in binomial ({k} {j}) at ell={ell}')
    return quantum_factorial(ell, k) / den
