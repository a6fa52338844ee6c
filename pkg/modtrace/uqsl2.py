import functools
import logging
from dataclasses import dataclass, field
from fractions import Fraction
from typing import List, Optional, Tuple

import numpy as np

from . import MIN_ELL, format_rational, linalg, parse_rational
from .cyclo import ONE, CycNumber, as_cyc, q_power, quantum_integer, quantum_number
from .exceptions import InvalidOrder, NonScalarCentralAction, NotScalar, ParamsMismatch


@dataclass(frozen=True)
class Params:
    ell: int
    r: int = field(init=False)

    def __post_init__(self):
        if not isinstance(self.ell, int) or self.ell < MIN_ELL:
            raise InvalidOrder(f'ell must be an integer >= {MIN_ELL}, got {self.ell!r}')
        object.__setattr__(self, 'r', 2 * self.ell // (3 + (-1) ** self.ell))

    @property
    def xi(self) -> CycNumber:
        return q_power(self.ell, 1)

    q = xi

    @property
    def unit(self) -> CycNumber:
        # [1] = q - q^-1
        return quantum_integer(self.ell, 1)

    def q_pow(self, x) -> CycNumber:
        return q_power(self.ell, x)

    def __repr__(self):
        return f'Params(ell={self.ell}, r={self.r})'


def vanishes(ell: int, x) -> bool:
    """[x] = 0 exactly when 2x is a multiple of ell."""
    return (Fraction(2) * Fraction(x) / ell).denominator == 1


def is_generic_alpha(ell: int, alpha) -> bool:
    # V_alpha is simple iff no E coefficient [j][alpha + r - j] vanishes.
    r = Params(ell).r
    alpha = Fraction(alpha)
    return not any(vanishes(ell, alpha + r - j) for j in range(1, r))


def is_regular_pair(ell: int, alpha, beta) -> bool:
    """V_alpha (x) V_beta lies over a regular grading: K^r is not +-1 on it."""
    r = Params(ell).r
    s = Fraction(alpha) + Fraction(beta)
    return is_generic_alpha(ell, alpha) and is_generic_alpha(ell, beta) and not vanishes(ell, r * s)


@dataclass(frozen=True, eq=False)
class WeightModule:
    params: Params
    weights: Tuple[Fraction, ...]
    actE: np.ndarray
    actF: np.ndarray
    actK: np.ndarray
    actKinv: np.ndarray
    actH: np.ndarray
    label: str
    kind: str = 'custom'
    alpha: Optional[Fraction] = None
    generic: Optional[bool] = None
    factors: Tuple['WeightModule', ...] = ()
    of: Optional['WeightModule'] = None

    @property
    def dim(self) -> int:
        return len(self.weights)

    def action(self, x: str) -> np.ndarray:
        return {'E': self.actE, 'F': self.actF, 'K': self.actK, 'Kinv': self.actKinv, 'H': self.actH}[x]

    def pivot(self) -> Tuple[CycNumber, ...]:
        # phi = K^{1-r} on each weight vector
        return tuple(self.params.q_pow((1 - self.params.r) * w) for w in self.weights)

    @functools.cached_property
    def support(self) -> Tuple:
        # positions of the nonzero E, F entries; equal modules share it
        return tuple(tuple((i, j) for i in range(self.dim) for j in range(self.dim) if a[i, j])
                     for a in (self.actE, self.actF))

    def __eq__(self, other):
        if not isinstance(other, WeightModule):
            return NotImplemented
        if self is other:
            return True
        return (self.params == other.params and self.label == other.label and self.weights == other.weights
                and self.support == other.support
                and all(linalg.equal(self.action(x), other.action(x)) for x in ('E', 'F', 'K', 'H')))

    @functools.cached_property
    def _hash(self) -> int:
        return hash((self.params.ell, self.label, self.weights, self.support))

    def __hash__(self):
        return self._hash

    def __repr__(self):
        return f'WeightModule({self.label}, ell={self.params.ell}, dim={self.dim})'


def _check_params(*modules: WeightModule):
    ells = {m.params.ell for m in modules}
    if len(ells) > 1:
        raise ParamsMismatch(f'modules over different roots of unity: {sorted(ells)}')


def _weight_module(params, weights, e, f, label, **kw) -> WeightModule:
    weights = tuple(Fraction(w) for w in weights)
    k = linalg.diag([params.q_pow(w) for w in weights])
    kinv = linalg.diag([params.q_pow(-w) for w in weights])
    h = linalg.diag(weights)
    return WeightModule(params=params, weights=weights, actE=e, actF=f, actK=k, actKinv=kinv, actH=h,
                        label=label, **kw)


def trivial_module(params: Params) -> WeightModule:
    return _weight_module(params, (0,), linalg.zeros(1, 1), linalg.zeros(1, 1), 'trivial', kind='trivial')


@functools.lru_cache(maxsize=512)
def simple_nilpotent(params: Params, alpha) -> WeightModule:
    """
    The r-dimensional module V_alpha with highest H-weight alpha + r - 1.

    Basis v_0..v_{r-1} of weights alpha + r - 1 - 2k; F v_k = v_{k+1} and
    E v_k = {k}{alpha + r - k} v_{k-1} where {x} = [x]/[1].
    """
    alpha = Fraction(alpha)
    r = params.r
    weights = [alpha + r - 1 - 2 * k for k in range(r)]

    e = linalg.zeros(r, r)
    f = linalg.zeros(r, r)
    for k in range(1, r):
        f[k, k - 1] = ONE
        e[k - 1, k] = quantum_number(params.ell, k) * quantum_number(params.ell, alpha + r - k)

    return _weight_module(params, weights, e, f, f'V[{format_rational(alpha)}]', kind='nilpotent', alpha=alpha,
                          generic=is_generic_alpha(params.ell, alpha))


def dual_module(m: WeightModule) -> WeightModule:
    # rho*(x) = rho(S(x))^T with S(E) = -E K^-1, S(F) = -K F, S(K) = K^-1, S(H) = -H.
    e = linalg.scale(linalg.transpose(linalg.matmul(m.actE, m.actKinv)), -1)
    f = linalg.scale(linalg.transpose(linalg.matmul(m.actK, m.actF)), -1)
    return _weight_module(m.params, [-w for w in m.weights], e, f, f'dual({m.label})', kind='dual', of=m)


@functools.lru_cache(maxsize=512)
def tensor_module(m: WeightModule, n: WeightModule) -> WeightModule:
    """Coproduct action on M (x) N, basis index i * dim N + j."""
    _check_params(m, n)
    im, i_n = linalg.identity(m.dim), linalg.identity(n.dim)
    # Delta(E) = 1 (x) E + E (x) K, Delta(F) = K^-1 (x) F + F (x) 1
    e = linalg.add(linalg.kron(im, n.actE), linalg.kron(m.actE, n.actK))
    f = linalg.add(linalg.kron(m.actKinv, n.actF), linalg.kron(m.actF, i_n))
    weights = [a + b for a in m.weights for b in n.weights]
    return _weight_module(m.params, weights, e, f, f'tensor({m.label},{n.label})', kind='tensor', factors=(m, n))


def tensor_many(modules) -> WeightModule:
    modules = list(modules)
    result = modules[0]
    for m in modules[1:]:
        result = tensor_module(result, m)
    return result


def relation_failures(m: WeightModule) -> List[str]:
    p = m.params
    q, qinv = p.q_pow(1), p.q_pow(-1)
    E, F, K, Kinv, H = m.actE, m.actF, m.actK, m.actKinv, m.actH
    mm = linalg.matmul
    failures = []

    if not linalg.equal(H, linalg.diag(m.weights)):
        failures.append('H = diag(weights)')
    if not linalg.equal(K, linalg.diag([p.q_pow(w) for w in m.weights])):
        failures.append('K = q^H')
    if not linalg.equal(mm(K, Kinv), linalg.identity(m.dim)):
        failures.append('K Kinv = 1')
    if not linalg.equal(mm(K, E), linalg.scale(mm(E, K), q * q)):
        failures.append('KE = q^2 EK')
    if not linalg.equal(mm(F, K), linalg.scale(mm(K, F), q * q)):
        failures.append('FK = q^2 KF')
    commutator = linalg.sub(mm(E, F), mm(F, E))
    if not linalg.equal(commutator, linalg.scale(linalg.sub(K, Kinv), (q - qinv).inverse())):
        failures.append('[E,F] = (K - K^-1)/(q - q^-1)')
    if not linalg.equal(linalg.sub(mm(H, E), mm(E, H)), linalg.scale(E, 2)):
        failures.append('[H,E] = 2E')
    if not linalg.equal(linalg.sub(mm(H, F), mm(F, H)), linalg.scale(F, -2)):
        failures.append('[H,F] = -2F')
    return failures


def check_relations(m: WeightModule) -> bool:
    failures = relation_failures(m)
    if failures:
        logging.debug(f'{m!r} violates: {", ".join(failures)}')
    return not failures


def casimir_matrix(m: WeightModule, form: str = 'EF') -> np.ndarray:
    p = m.params
    q, qinv = p.q_pow(1), p.q_pow(-1)
    unit2 = p.unit * p.unit
    if form == 'EF':
        return linalg.combine([(unit2, linalg.matmul(m.actE, m.actF)), (qinv, m.actK), (q, m.actKinv)])
    if form == 'FE':
        return linalg.combine([(unit2, linalg.matmul(m.actF, m.actE)), (q, m.actK), (qinv, m.actKinv)])
    raise ValueError(f'unknown Casimir form {form!r}')


def casimir_action(m: WeightModule, form: str = 'EF'):
    from .moncat import Morphism
    return Morphism(m, m, casimir_matrix(m, form))


def casimir_scalar(m: WeightModule) -> CycNumber:
    c = linalg.scalar_value(casimir_matrix(m))
    if c is None:
        raise NotScalar(f'the Casimir element is not scalar on {m!r}')
    return c


def nilpotent_casimir_value(params: Params, alpha) -> CycNumber:
    """Casimir eigenvalue q^r (q^alpha + q^-alpha) on V_alpha."""
    return params.q_pow(params.r) * (params.q_pow(alpha) + params.q_pow(-Fraction(alpha)))


@functools.lru_cache(maxsize=None)
def chebyshev_poly(r: int) -> Tuple[int, ...]:
    # C_0 = 2, C_1 = X, C_{k+1} = X C_k - C_{k-1}; coefficients from the constant term up.
    if r == 0:
        return (2,)
    if r == 1:
        return (0, 1)
    prev, cur = chebyshev_poly(r - 2), chebyshev_poly(r - 1)
    out = [0] + list(cur)
    for i, c in enumerate(prev):
        out[i] -= c
    return tuple(out)


def chebyshev_check(m: WeightModule) -> bool:
    p = m.params
    r = p.r
    omega = casimir_matrix(m)

    lhs = linalg.zeros(m.dim, m.dim)
    power = linalg.identity(m.dim)
    for c in chebyshev_poly(r):
        if c:
            lhs = linalg.add(lhs, linalg.scale(power, c))
        power = linalg.matmul(power, omega)

    ef = linalg.matmul(linalg.power(m.actE, r), linalg.power(m.actF, r))
    kk = linalg.add(linalg.power(m.actK, r), linalg.power(m.actKinv, r))
    rhs = linalg.sub(linalg.scale(ef, p.unit ** (2 * r)), linalg.scale(kk, (-1) ** p.ell))
    return linalg.equal(lhs, rhs)


@dataclass(frozen=True, eq=False)
class GradingElement:
    """M(kappa, eps, phi): a character of the central subalgebra spanned by E^r, F^r, K^{+-r}."""
    kappa: CycNumber
    eps: CycNumber
    phi: CycNumber

    def __post_init__(self):
        for name in ('kappa', 'eps', 'phi'):
            object.__setattr__(self, name, as_cyc(getattr(self, name)))
        if self.kappa.is_zero():
            raise ValueError('kappa must be invertible')

    def multiply(self, other: 'GradingElement') -> 'GradingElement':
        return GradingElement(self.kappa * other.kappa,
                              other.eps + self.eps * other.kappa,
                              self.phi * other.kappa + other.phi)

    __mul__ = multiply

    def inverse(self) -> 'GradingElement':
        kinv = self.kappa.inverse()
        return GradingElement(kinv, -self.eps * kinv, -self.phi * kinv)

    def discriminant(self) -> CycNumber:
        # kappa + 1/kappa - eps phi / kappa
        kinv = self.kappa.inverse()
        return self.kappa + kinv - self.eps * self.phi * kinv

    def is_diagonal(self) -> bool:
        return self.eps.is_zero() and self.phi.is_zero()

    def is_regular(self) -> bool:
        return self.is_diagonal() and self.kappa != 1 and self.kappa != -1

    def is_singular(self) -> bool:
        d = self.discriminant()
        return d == 2 or d == -2

    def __eq__(self, other):
        if not isinstance(other, GradingElement):
            return NotImplemented
        return self.kappa == other.kappa and self.eps == other.eps and self.phi == other.phi

    __hash__ = None

    def __repr__(self):
        return f'M({self.kappa}, {self.eps}, {self.phi})'


def grading_of(m: WeightModule) -> GradingElement:
    p = m.params
    r = p.r
    scalars = []
    for name, mat in (('K^r', linalg.power(m.actK, r)), ('E^r', linalg.power(m.actE, r)),
                      ('F^r', linalg.power(m.actF, r))):
        c = linalg.scalar_value(mat)
        if c is None:
            raise NonScalarCentralAction(f'{name} does not act as a scalar on {m!r}')
        scalars.append(c)

    kappa, e, f = scalars
    unit_r = p.unit ** r
    return GradingElement(kappa, unit_r * e, (-1) ** p.ell * unit_r * f * kappa)


def h_degree(m: WeightModule) -> Fraction:
    """Class of the H-weights in Q/2Z, normalized to [0, 2)."""
    classes = {w % 2 for w in m.weights}
    if len(classes) != 1:
        raise ValueError(f'{m!r} is not homogeneous in the C/2Z grading')
    return classes.pop()


def is_generic_degree(m: WeightModule) -> bool:
    return h_degree(m).denominator != 1


def is_small_module(m: WeightModule) -> bool:
    r = m.params.r
    return (linalg.is_zero(linalg.power(m.actE, r)) and linalg.is_zero(linalg.power(m.actF, r))
            and linalg.equal(linalg.power(m.actK, 2 * r), linalg.identity(m.dim)))


# Descriptor JSON

def module_from_descriptor(desc: dict, params: Optional[Params] = None) -> WeightModule:
    if params is None:
        if 'ell' not in desc:
            raise ValueError('module descriptor needs an "ell" entry')
        params = Params(int(desc['ell']))
    elif 'ell' in desc and int(desc['ell']) != params.ell:
        raise ParamsMismatch(f'descriptor ell={desc["ell"]} does not match ell={params.ell}')

    kind = desc.get('kind')
    if kind == 'nilpotent':
        return simple_nilpotent(params, parse_rational(desc['alpha']))
    if kind == 'trivial':
        return trivial_module(params)
    if kind == 'dual':
        return dual_module(module_from_descriptor(desc['of'], params))
    if kind == 'tensor':
        return tensor_module(module_from_descriptor(desc['left'], params),
                             module_from_descriptor(desc['right'], params))
    raise ValueError(f'unknown module kind {kind!r}')


def module_descriptor(m: WeightModule, top: bool = True) -> dict:
    if m.kind == 'nilpotent':
        desc = {'kind': 'nilpotent', 'alpha': format_rational(m.alpha)}
    elif m.kind == 'trivial':
        desc = {'kind': 'trivial'}
    elif m.kind == 'dual':
        desc = {'kind': 'dual', 'of': module_descriptor(m.of, top=False)}
    elif m.kind == 'tensor':
        desc = {'kind': 'tensor', 'left': module_descriptor(m.factors[0], top=False),
                'right': module_descriptor(m.factors[1], top=False)}
    else:
        raise ValueError(f'{m!r} was not built from a descriptor')
    if top:
        desc = {'ell': m.params.ell, **desc}
    return desc
