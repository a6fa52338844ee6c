import functools
import logging
from dataclasses import dataclass
from fractions import Fraction
from typing import List, Sequence, Tuple

from . import linalg
from .cyclo import CycNumber, as_cyc, q_power, quantum_integer
from .exceptions import DimensionMismatch, EvenOrderUnsupported, InvalidOrder, SingularWeight, UnsupportedType
from .uqsl2 import vanishes


SUPPORTED_TYPES = {
    'A': lambda n: n >= 1,
    'B': lambda n: n >= 2,
    'C': lambda n: n >= 2,
    'D': lambda n: n >= 4,
    'E': lambda n: n in (6, 7, 8),
    'F': lambda n: n == 4,
    'G': lambda n: n == 2,
}

# Bourbaki numbering: node 2 hangs off node 4, the chain is 1-3-4-5-6-7-8.
E_EDGES = [(1, 3), (3, 4), (2, 4), (4, 5), (5, 6), (6, 7), (7, 8)]


def _gram_matrix(kind: str, n: int) -> List[List[int]]:
    # Symmetric matrix of <alpha_i, alpha_j>, shortest roots of squared length 2.
    b = [[0] * n for _ in range(n)]

    def link(i, j, value):
        b[i][j] = b[j][i] = value

    if kind in 'AD' or kind == 'E':
        for i in range(n):
            b[i][i] = 2
        if kind == 'A':
            for i in range(n - 1):
                link(i, i + 1, -1)
        elif kind == 'D':
            for i in range(n - 2):
                link(i, i + 1, -1)
            link(n - 3, n - 1, -1)
        else:
            for i, j in E_EDGES:
                if i <= n and j <= n:
                    link(i - 1, j - 1, -1)
    elif kind == 'B':
        for i in range(n - 1):
            b[i][i] = 4
            if i < n - 1:
                link(i, i + 1, -2)
        b[n - 1][n - 1] = 2
    elif kind == 'C':
        for i in range(n - 1):
            b[i][i] = 2
            if i < n - 2:
                link(i, i + 1, -1)
        b[n - 1][n - 1] = 4
        link(n - 2, n - 1, -2)
    elif kind == 'F':
        b[0][0] = b[1][1] = 4
        b[2][2] = b[3][3] = 2
        link(0, 1, -2)
        link(1, 2, -2)
        link(2, 3, -1)
    elif kind == 'G':
        b[0][0], b[1][1] = 2, 6
        link(0, 1, -3)
    return b


@dataclass(frozen=True)
class RootSystem:
    type: str
    rank: int
    cartan: Tuple[Tuple[int, ...], ...]
    symmetrizer: Tuple[int, ...]
    positive_roots: Tuple[Tuple[int, ...], ...]
    rho: Tuple[Fraction, ...]
    gram: Tuple[Tuple[int, ...], ...]
    cartan_inverse: Tuple[Tuple[Fraction, ...], ...]

    @property
    def num_positive_roots(self) -> int:
        return len(self.positive_roots)

    @property
    def dimension(self) -> int:
        return 2 * len(self.positive_roots) + self.rank

    def simple_roots(self) -> List[Tuple[int, ...]]:
        return [tuple(int(i == j) for j in range(self.rank)) for i in range(self.rank)]

    def to_fundamental(self, v: Sequence) -> Tuple[Fraction, ...]:
        """Simple-root coordinates to fundamental-weight coordinates (A v)."""
        _check_length(self, v)
        return tuple(sum((self.cartan[i][j] * Fraction(v[j]) for j in range(self.rank)), Fraction(0))
                     for i in range(self.rank))

    def to_simple(self, mu: Sequence) -> Tuple[Fraction, ...]:
        _check_length(self, mu)
        return tuple(sum((self.cartan_inverse[i][j] * Fraction(mu[j]) for j in range(self.rank)), Fraction(0))
                     for i in range(self.rank))

    def rho_fundamental(self) -> Tuple[Fraction, ...]:
        return self.to_fundamental(self.rho)

    def to_json(self) -> dict:
        return {'type': self.type, 'rank': self.rank, 'positive_roots': [list(a) for a in self.positive_roots]}

    def __repr__(self):
        return f'RootSystem({self.type}{self.rank})'


def _check_length(rs: RootSystem, v: Sequence):
    if len(v) != rs.rank:
        raise DimensionMismatch(f'{rs!r} needs vectors of length {rs.rank}, got {len(v)}')


def _positive_roots(cartan: Sequence[Sequence[int]]) -> List[Tuple[int, ...]]:
    n = len(cartan)
    simple = [tuple(int(i == j) for j in range(n)) for i in range(n)]
    roots = set(simple)
    layer = list(simple)
    while layer:
        next_layer = set()
        for beta in layer:
            for i in range(n):
                # Root string through beta in direction alpha_i: p steps down, q = p - <beta, alpha_i^v> up.
                p = 0
                down = list(beta)
                while True:
                    down[i] -= 1
                    if tuple(down) in roots:
                        p += 1
                    else:
                        break
                pairing = sum(cartan[i][j] * beta[j] for j in range(n))
                if p - pairing > 0:
                    up = list(beta)
                    up[i] += 1
                    next_layer.add(tuple(up))
        next_layer -= roots
        roots |= next_layer
        layer = list(next_layer)
    return sorted(roots, key=lambda a: (sum(a), tuple(-x for x in a)))


@functools.lru_cache(maxsize=None)
def build_root_system(kind: str, rank: int) -> RootSystem:
    kind = str(kind).upper()
    if kind not in SUPPORTED_TYPES or not SUPPORTED_TYPES[kind](rank):
        raise UnsupportedType(f'no simple Lie algebra of type {kind}{rank}')

    b = _gram_matrix(kind, rank)
    d = [b[i][i] // 2 for i in range(rank)]
    cartan = [[b[i][j] // d[i] for j in range(rank)] for i in range(rank)]
    roots = _positive_roots(cartan)

    rho = tuple(sum((Fraction(a[i]) for a in roots), Fraction(0)) / 2 for i in range(rank))
    inv = linalg.inverse(linalg.from_rows(cartan))
    cartan_inverse = tuple(tuple(inv[i, j].rational_value() for j in range(rank)) for i in range(rank))

    logging.debug(f'Built root system {kind}{rank} with {len(roots)} positive roots.')
    return RootSystem(type=kind, rank=rank,
                      cartan=tuple(map(tuple, cartan)),
                      symmetrizer=tuple(d),
                      positive_roots=tuple(roots),
                      rho=rho,
                      gram=tuple(map(tuple, b)),
                      cartan_inverse=cartan_inverse)


def inner(rs: RootSystem, mu: Sequence, nu: Sequence, basis: str = 'fundamental') -> Fraction:
    _check_length(rs, mu)
    _check_length(rs, nu)
    if basis == 'fundamental':
        mu, nu = rs.to_simple(mu), rs.to_simple(nu)
    elif basis != 'simple':
        raise ValueError(f'unknown basis {basis!r}')
    return sum((Fraction(mu[i]) * rs.gram[i][j] * Fraction(nu[j])
                for i in range(rs.rank) for j in range(rs.rank)), Fraction(0))


def pairing_with_root(rs: RootSystem, mu: Sequence, root: Sequence[int]) -> Fraction:
    # <omega_j, alpha_i> = d_i delta_ij
    _check_length(rs, mu)
    return sum((Fraction(mu[i]) * rs.symmetrizer[i] * root[i] for i in range(rs.rank)), Fraction(0))


def r_of(ell: int) -> int:
    return 2 * ell // (3 + (-1) ** ell)


def singular_roots(rs: RootSystem, ell: int, mu: Sequence) -> List[Tuple[int, ...]]:
    """Positive roots alpha with [r <mu, alpha>] = 0, decided on the rationals; mu in fundamental coordinates."""
    r = r_of(ell)
    return [root for root in rs.positive_roots if vanishes(ell, r * pairing_with_root(rs, mu, root))]


def general_modified_dimension(rs: RootSystem, ell: int, mu: Sequence, d0=1, basis: str = 'fundamental') -> CycNumber:
    """
    d(V_0) r^N prod_{alpha > 0} [<mu, alpha>] / [r <mu, alpha>] for odd ell (r = ell).

    mu is read in fundamental-weight coordinates unless basis='simple'.
    """
    if ell < 3:
        raise InvalidOrder(f'ell must be at least 3, got {ell}')
    if ell % 2 == 0:
        raise EvenOrderUnsupported('the general modified dimension is only available for odd ell')
    if basis == 'simple':
        mu = rs.to_fundamental(mu)
    r = ell

    result = as_cyc(d0) * r ** rs.num_positive_roots
    for root in rs.positive_roots:
        x = pairing_with_root(rs, mu, root)
        den = quantum_integer(ell, r * x)
        if den.is_zero():
            raise SingularWeight(f'[{r}<mu,{root}>] vanishes for mu={tuple(map(str, mu))}')
        result = result * quantum_integer(ell, x) / den
    return result


def twist_scalar(rs: RootSystem, ell: int, lam: Sequence, basis: str = 'fundamental') -> CycNumber:
    r = r_of(ell)
    if basis == 'simple':
        lam = rs.to_fundamental(lam)
    rho = rs.rho_fundamental()
    exponent = inner(rs, lam, lam) - (r - 1) ** 2 * inner(rs, rho, rho)
    return q_power(ell, exponent)
