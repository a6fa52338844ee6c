import functools
import logging
from dataclasses import InitVar, dataclass
from typing import List, NamedTuple, Optional, Tuple

import numpy as np

from . import VALIDATE_MORPHISMS, linalg
from .cyclo import ONE, ZERO, CycNumber
from .exceptions import (DivisionByZero, DomainMismatch, NotAnIntertwiner, NotScalar, NotSemisimple, ParamsMismatch,
                         ShapeMismatch)
from .uqsl2 import (WeightModule, casimir_matrix, dual_module, is_generic_alpha, module_descriptor,
                    nilpotent_casimir_value, simple_nilpotent, tensor_module, trivial_module)


GENERATORS = ('E', 'F', 'K', 'H')


@dataclass(frozen=True, eq=False)
class Morphism:
    """
    A linear map dom -> cod given by a cod.dim x dom.dim matrix.

    Construction checks the intertwiner property against E, F, K and H (H is skipped for
    maps of the non-unrolled category, unrolled=False). Pass validate=False in inner loops.
    """
    dom: WeightModule
    cod: WeightModule
    mat: np.ndarray
    unrolled: bool = True
    validate: InitVar[Optional[bool]] = None

    def __post_init__(self, validate):
        if self.dom.params != self.cod.params:
            raise ParamsMismatch('domain and codomain over different roots of unity')
        if self.mat.shape != (self.cod.dim, self.dom.dim):
            raise ShapeMismatch(f'matrix of shape {self.mat.shape} for a map {self.dom.dim} -> {self.cod.dim}')
        if VALIDATE_MORPHISMS if validate is None else validate:
            bad = self.failed_generators()
            if bad:
                raise NotAnIntertwiner(f'{self.dom.label} -> {self.cod.label} does not commute with {", ".join(bad)}')

    def failed_generators(self) -> List[str]:
        failed = []
        for x in GENERATORS:
            if x == 'H' and not self.unrolled:
                continue
            lhs = linalg.matmul(self.mat, self.dom.action(x))
            rhs = linalg.matmul(self.cod.action(x), self.mat)
            if not linalg.equal(lhs, rhs):
                failed.append(x)
        return failed

    def is_endomorphism(self) -> bool:
        return self.dom == self.cod

    def scale(self, c) -> 'Morphism':
        return Morphism(self.dom, self.cod, linalg.scale(self.mat, c), self.unrolled, validate=False)

    def __add__(self, other: 'Morphism') -> 'Morphism':
        if self.dom != other.dom or self.cod != other.cod:
            raise DomainMismatch('cannot add morphisms between different objects')
        return Morphism(self.dom, self.cod, linalg.add(self.mat, other.mat), self.unrolled, validate=False)

    def __eq__(self, other):
        if not isinstance(other, Morphism):
            return NotImplemented
        return self.dom == other.dom and self.cod == other.cod and linalg.equal(self.mat, other.mat)

    __hash__ = None

    def __repr__(self):
        return f'Morphism({self.dom.label} -> {self.cod.label})'


def identity(m: WeightModule) -> Morphism:
    return Morphism(m, m, linalg.identity(m.dim), validate=False)


def compose(g: Morphism, f: Morphism) -> Morphism:
    """g after f."""
    if g.dom != f.cod:
        raise DomainMismatch(f'cannot compose {g!r} after {f!r}')
    return Morphism(f.dom, g.cod, linalg.matmul(g.mat, f.mat), g.unrolled and f.unrolled, validate=False)


def tensor_mor(f: Morphism, g: Morphism) -> Morphism:
    if f.dom.params != g.dom.params:
        raise ParamsMismatch('cannot tensor morphisms over different roots of unity')
    return Morphism(tensor_module(f.dom, g.dom), tensor_module(f.cod, g.cod), linalg.kron(f.mat, g.mat),
                    f.unrolled and g.unrolled, validate=False)


def retype(f: Morphism, dom: WeightModule = None, cod: WeightModule = None) -> Morphism:
    """Same matrix, new (weight-identical) domain or codomain: unitors and associators."""
    dom = dom if dom is not None else f.dom
    cod = cod if cod is not None else f.cod
    if dom.weights != f.dom.weights or cod.weights != f.cod.weights:
        raise DomainMismatch(f'cannot retype {f!r} as {dom.label} -> {cod.label}')
    return Morphism(dom, cod, f.mat, f.unrolled)


def scalar_of(f: Morphism) -> CycNumber:
    c = linalg.scalar_value(f.mat) if f.dom == f.cod else None
    if c is None:
        raise NotScalar(f'{f!r} is not a scalar endomorphism')
    return c


def inverse(f: Morphism) -> Morphism:
    return Morphism(f.cod, f.dom, linalg.inverse(f.mat), f.unrolled, validate=False)


class Duality(NamedTuple):
    ev_r: Morphism     # V* (x) V -> 1, f (x) v -> f(v)
    coev_r: Morphism   # 1 -> V (x) V*, sum v_i (x) v^i
    ev_l: Morphism     # V (x) V* -> 1, v (x) f -> f(phi v)
    coev_l: Morphism   # 1 -> V* (x) V, sum v^i (x) phi^-1 v_i


def duality_morphisms(m: WeightModule) -> Duality:
    n = m.dim
    unit = trivial_module(m.params)
    dual = dual_module(m)
    phi = m.pivot()

    ev_r, coev_r = linalg.zeros(1, n * n), linalg.zeros(n * n, 1)
    ev_l, coev_l = linalg.zeros(1, n * n), linalg.zeros(n * n, 1)
    for i in range(n):
        ev_r[0, i * n + i] = ONE
        coev_r[i * n + i, 0] = ONE
        ev_l[0, i * n + i] = phi[i]
        coev_l[i * n + i, 0] = phi[i].inverse()

    return Duality(Morphism(tensor_module(dual, m), unit, ev_r),
                   Morphism(unit, tensor_module(m, dual), coev_r),
                   Morphism(tensor_module(m, dual), unit, ev_l),
                   Morphism(unit, tensor_module(dual, m), coev_l))


def dual_mor(f: Morphism, formula: str = 'right') -> Morphism:
    """
    f*: W* -> V* for f: V -> W.

    'right' is (ev_W (x) Id)(Id (x) f (x) Id)(Id (x) coev_V), the transpose in dual bases.
    'left' is the mirror built from the pivotal pair, phi_V^-T f^T phi_W^T.
    """
    if formula == 'right':
        mat = linalg.transpose(f.mat)
    elif formula == 'left':
        phi_v = linalg.diag([c.inverse() for c in f.dom.pivot()])
        phi_w = linalg.diag(f.cod.pivot())
        mat = linalg.transpose(linalg.chain(phi_w, f.mat, phi_v))
    else:
        raise ValueError(f'unknown dual formula {formula!r}')
    return Morphism(dual_module(f.cod), dual_module(f.dom), mat, f.unrolled, validate=False)


def dual_mor_composite(f: Morphism) -> Morphism:
    """The right dual of f assembled literally from duality morphisms, unitors and associators."""
    v, w = f.dom, f.cod
    dv, dw = dual_module(v), dual_module(w)
    unit = trivial_module(v.params)

    step1 = retype(tensor_mor(identity(dw), duality_morphisms(v).coev_r), dom=dw)
    step2 = tensor_mor(identity(dw), tensor_mor(f, identity(dv)))
    step2 = retype(step2, dom=step1.cod, cod=tensor_module(tensor_module(dw, w), dv))
    step3 = retype(tensor_mor(duality_morphisms(w).ev_r, identity(dv)), cod=dv)
    return compose(step3, compose(step2, step1))


def _split(f: Morphism, left: WeightModule = None, right: WeightModule = None):
    if not f.is_endomorphism():
        raise ShapeMismatch(f'{f!r} is not an endomorphism')
    if left is None or right is None:
        if len(f.dom.factors) != 2:
            raise ShapeMismatch(f'{f.dom.label} is not an explicit tensor product')
        left, right = f.dom.factors
    if left.dim * right.dim != f.dom.dim:
        raise ShapeMismatch(f'{left.label} (x) {right.label} does not match {f.dom.label}')
    return left, right


def ptr_right(f: Morphism, left: WeightModule = None, right: WeightModule = None) -> Morphism:
    """(Id_V (x) ev_l_W)(f (x) Id_W*)(Id_V (x) coev_r_W) on End(V (x) W)."""
    v, w = _split(f, left, right)
    phi = w.pivot()
    nw = w.dim
    out = linalg.zeros(v.dim, v.dim)
    for a in range(v.dim):
        for b in range(v.dim):
            acc = ZERO
            for j in range(nw):
                x = f.mat[a * nw + j, b * nw + j]
                if x:
                    acc = acc + x * phi[j]
            out[a, b] = acc
    return Morphism(v, v, out, f.unrolled, validate=False)


def ptr_left(f: Morphism, left: WeightModule = None, right: WeightModule = None) -> Morphism:
    """(ev_r_V (x) Id_W)(Id_V* (x) f)(coev_l_V (x) Id_W) on End(V (x) W)."""
    v, w = _split(f, left, right)
    phi_inv = [c.inverse() for c in v.pivot()]
    nw = w.dim
    out = linalg.zeros(nw, nw)
    for a in range(nw):
        for b in range(nw):
            acc = ZERO
            for i in range(v.dim):
                x = f.mat[i * nw + a, i * nw + b]
                if x:
                    acc = acc + x * phi_inv[i]
            out[a, b] = acc
    return Morphism(w, w, out, f.unrolled, validate=False)


def ptr_right_composite(f: Morphism) -> Morphism:
    v, w = _split(f)
    dw = dual_module(w)
    duality = duality_morphisms(w)
    vw_dw = tensor_module(tensor_module(v, w), dw)

    up = retype(tensor_mor(identity(v), duality.coev_r), dom=v, cod=vw_dw)
    middle = tensor_mor(f, identity(dw))
    down = retype(tensor_mor(identity(v), duality.ev_l), dom=vw_dw, cod=v)
    return compose(down, compose(middle, up))


def ptr_left_composite(f: Morphism) -> Morphism:
    v, w = _split(f)
    dv = dual_module(v)
    duality = duality_morphisms(v)
    dv_vw = tensor_module(dv, tensor_module(v, w))

    up = retype(tensor_mor(duality.coev_l, identity(w)), dom=w, cod=dv_vw)
    middle = tensor_mor(identity(dv), f)
    down = retype(tensor_mor(duality.ev_r, identity(w)), dom=dv_vw, cod=w)
    return compose(down, compose(middle, up))


def tr_right(f: Morphism) -> CycNumber:
    if not f.is_endomorphism():
        raise ShapeMismatch(f'{f!r} is not an endomorphism')
    phi = f.dom.pivot()
    return sum((f.mat[j, j] * phi[j] for j in range(f.dom.dim) if f.mat[j, j]), ZERO)


def tr_left(f: Morphism) -> CycNumber:
    if not f.is_endomorphism():
        raise ShapeMismatch(f'{f!r} is not an endomorphism')
    phi = f.dom.pivot()
    return sum((f.mat[j, j] / phi[j] for j in range(f.dom.dim) if f.mat[j, j]), ZERO)


def qdim_right(m: WeightModule) -> CycNumber:
    return tr_right(identity(m))


def qdim_left(m: WeightModule) -> CycNumber:
    return tr_left(identity(m))


def _weights_match(a, b, ell: int, unrolled: bool) -> bool:
    if unrolled:
        return a == b
    # K-eigenvalues q^a and q^b agree
    return ((a - b) / ell).denominator == 1


def hom_basis(m: WeightModule, n: WeightModule, unrolled: bool = True, reverse_pivots: bool = False) -> List[Morphism]:
    """
    Echelon basis of the intertwiners m -> n.

    Unknowns are restricted to entries joining equal weights (equal K-eigenvalues when
    unrolled=False), which imposes H (resp. K); the E and F equations are then solved.
    """
    if m.params != n.params:
        raise ParamsMismatch('hom spaces need modules over the same root of unity')
    ell = m.params.ell

    variables = [(i, j) for i in range(n.dim) for j in range(m.dim)
                 if _weights_match(n.weights[i], m.weights[j], ell, unrolled)]
    index = {v: k for k, v in enumerate(variables)}
    if not variables:
        return []

    rows = []
    for x in ('E', 'F'):
        am, an = m.action(x), n.action(x)
        # (X am - an X)[i, j] = sum_k X[i,k] am[k,j] - sum_k an[i,k] X[k,j]
        for i in range(n.dim):
            for j in range(m.dim):
                row = {}
                for k in range(m.dim):
                    c = am[k, j]
                    if c and (i, k) in index:
                        row[index[(i, k)]] = row.get(index[(i, k)], ZERO) + c
                for k in range(n.dim):
                    c = an[i, k]
                    if c and (k, j) in index:
                        row[index[(k, j)]] = row.get(index[(k, j)], ZERO) - c
                if any(row.values()):
                    dense = [ZERO] * len(variables)
                    for col, c in row.items():
                        dense[col] = c
                    rows.append(dense)

    order = list(range(len(variables)))
    if reverse_pivots:
        order.reverse()
    basis = []
    for vec in linalg.nullspace(rows, len(variables), order):
        mat = linalg.zeros(n.dim, m.dim)
        for col, c in enumerate(vec):
            if c:
                mat[variables[col]] = c
        basis.append(Morphism(m, n, mat, unrolled, validate=False))
    logging.debug(f'Hom({m.label}, {n.label}) has dimension {len(basis)}.')
    return basis


class Summand(NamedTuple):
    simple: WeightModule
    incl: Morphism
    proj: Morphism


def _highest_weight_vectors(m: WeightModule, reverse_pivots: bool):
    # E-kernel inside each weight space, heaviest weight first.
    found = []
    for w in sorted(set(m.weights), reverse=True):
        cols = [j for j, x in enumerate(m.weights) if x == w]
        rows = [[m.actE[i, j] for j in cols] for i in range(m.dim)]
        rows = [row for row in rows if any(row)]
        order = list(range(len(cols)))
        if reverse_pivots:
            order.reverse()
        for vec in linalg.nullspace(rows, len(cols), order):
            full = linalg.zeros(m.dim, 1)
            for k, c in zip(cols, vec):
                full[k, 0] = c
            found.append((w, full))
    return found


def decompose_semisimple(m: WeightModule, reverse_pivots: bool = False) -> List[Summand]:
    """
    Split m into simple nilpotent summands V_gamma with retracts.

    Highest-weight vectors u of weight gamma + r - 1 give inclusions v_k -> F^k u; the
    projections are the row blocks of the inverse of the assembled inclusion matrix.
    """
    return list(_decompose(m, reverse_pivots))


@functools.lru_cache(maxsize=256)
def _decompose(m: WeightModule, reverse_pivots: bool) -> Tuple[Summand, ...]:
    p = m.params
    r = p.r
    candidates = []
    for w, u in _highest_weight_vectors(m, reverse_pivots):
        gamma = w - (r - 1)
        if not is_generic_alpha(p.ell, gamma):
            raise NotSemisimple(f'{m.label} has a highest weight vector of non-generic weight {w}')
        omega = linalg.matmul(casimir_matrix(m), u)
        if not linalg.equal(omega, linalg.scale(u, nilpotent_casimir_value(p, gamma))):
            raise NotSemisimple(f'highest weight vector of weight {w} in {m.label} is not a Casimir eigenvector')

        simple = simple_nilpotent(p, gamma)
        cols = [u]
        for _ in range(r - 1):
            cols.append(linalg.matmul(m.actF, cols[-1]))
        mat = np.hstack(cols)
        try:
            incl = Morphism(simple, m, mat, validate=True)
        except NotAnIntertwiner:
            raise NotSemisimple(f'F^r does not vanish on the highest weight vector of weight {w} in {m.label}')
        candidates.append(incl)

    total = sum(i.dom.dim for i in candidates)
    if total != m.dim:
        raise NotSemisimple(f'{m.label}: highest weight vectors generate {total} of {m.dim} dimensions')
    try:
        pinv = linalg.inverse(np.hstack([i.mat for i in candidates]))
    except DivisionByZero:
        raise NotSemisimple(f'the summands of {m.label} are not independent')

    summands = []
    offset = 0
    for incl in candidates:
        d = incl.dom.dim
        proj = Morphism(m, incl.dom, pinv[offset:offset + d, :].copy(), validate=False)
        summands.append(Summand(incl.dom, incl, proj))
        offset += d
    logging.debug(f'{m.label} splits as ' + ' + '.join(s.simple.label for s in summands))
    return tuple(summands)


def morphism_to_json(f: Morphism) -> dict:
    def describe(x):
        try:
            return module_descriptor(x)
        except ValueError:
            return x.label
    return {'dom': describe(f.dom), 'cod': describe(f.cod), 'mat': linalg.to_json(f.mat)}
