import logging
import threading
from typing import Dict, List, Tuple

import numpy as np

from . import linalg
from .cyclo import CycNumber, quantum_factorial
from .moncat import Morphism, compose, dual_mor, identity, inverse, ptr_left, ptr_right, scalar_of, tensor_mor
from .uqsl2 import Params, WeightModule, _check_params, dual_module, simple_nilpotent, tensor_module


_CACHE: Dict[Tuple, Morphism] = {}
_CACHE_LOCK = threading.Lock()


def _cached(key, build):
    found = _CACHE.get(key)
    if found is not None:
        return found
    value = build()
    with _CACHE_LOCK:
        return _CACHE.setdefault(key, value)


def quasi_r_coefficients(params: Params, inverse: bool = False):
    """
    a_n with R-check = sum_{n<r} a_n E^n (x) F^n, the truncated exp_{q^-2}((q - q^-1) E (x) F).

    a_n = q^{n(n-1)/2} (q - q^-1)^n / {n}!; the inverse series has (-1)^n q^{-n(n-1)/2} instead.
    """
    coeffs = []
    for n in range(params.r):
        s = n * (n - 1) // 2
        c = params.unit ** n / quantum_factorial(params.ell, n)
        if inverse:
            c = c * params.q_pow(-s) * (-1) ** n
        else:
            c = c * params.q_pow(s)
        coeffs.append(c)
    return coeffs


def _power_columns(act: np.ndarray, count: int) -> List[List[List[Tuple[int, CycNumber]]]]:
    # [n][j] lists the nonzero (i, (act^n)[i, j])
    out = []
    p = linalg.identity(act.shape[0])
    for _ in range(count):
        out.append([[(i, p[i, j]) for i in range(p.shape[0]) if p[i, j]] for j in range(p.shape[1])])
        p = linalg.matmul(p, act)
    return out


def _braiding_matrix(v: WeightModule, w: WeightModule) -> np.ndarray:
    """
    tau o HH o R-check column by column.

    v_i (x) w_j goes to sum_n a_n q^{lambda mu / 2} F^n w_j (x) E^n v_i; each (k, l) output pair
    fixes n through its weight, so every entry is one term.
    """
    p = v.params
    coeffs = quasi_r_coefficients(p)
    e_cols, f_cols = _power_columns(v.actE, p.r), _power_columns(w.actF, p.r)
    mat = linalg.zeros(v.dim * w.dim, v.dim * w.dim)
    for i in range(v.dim):
        for j in range(w.dim):
            col = i * w.dim + j
            for n, a in enumerate(coeffs):
                for k, e in e_cols[n][i]:
                    for l, f in f_cols[n][j]:
                        mat[l * v.dim + k, col] = a * e * f * p.q_pow(v.weights[k] * w.weights[l] / 2)
    return mat


def _braiding_inverse_matrix(v: WeightModule, w: WeightModule) -> np.ndarray:
    # R-check^-1 o HH^-1 o tau^-1: w_j (x) v_i -> q^{-lambda mu / 2} sum_n b_n E^n v_i (x) F^n w_j
    p = v.params
    coeffs = quasi_r_coefficients(p, inverse=True)
    e_cols, f_cols = _power_columns(v.actE, p.r), _power_columns(w.actF, p.r)
    mat = linalg.zeros(v.dim * w.dim, v.dim * w.dim)
    for i in range(v.dim):
        for j in range(w.dim):
            col = j * v.dim + i
            cartan = p.q_pow(-v.weights[i] * w.weights[j] / 2)
            for n, b in enumerate(coeffs):
                for k, e in e_cols[n][i]:
                    for l, f in f_cols[n][j]:
                        mat[k * w.dim + l, col] = b * e * f * cartan
    return mat


def _twist_matrix(v: WeightModule, inverse: bool = False) -> np.ndarray:
    """
    ptr_R(c_{V,V}) (or of c_{V,V}^-1) contracted entry by entry, without the dim^2 square braiding.

    theta[a, b] = sum_j phi_j q^{w_j w_a / 2} a_n (F^n)[a, j] (E^n)[j, b]; the inverse has
    phi_j q^{-w_j w_b / 2} b_n (E^n)[a, j] (F^n)[j, b]. Here phi_j = q^{(1 - r) w_j}.
    """
    p = v.params
    coeffs = quasi_r_coefficients(p, inverse)
    e_cols, f_cols = _power_columns(v.actE, p.r), _power_columns(v.actF, p.r)
    first, second = (f_cols, e_cols) if inverse else (e_cols, f_cols)
    wt = v.weights
    out = linalg.zeros(v.dim, v.dim)
    for b in range(v.dim):
        for n, c in enumerate(coeffs):
            for j, x in first[n][b]:
                for a, y in second[n][j]:
                    exponent = (1 - p.r) * wt[j] + (-wt[j] * wt[b] if inverse else wt[j] * wt[a]) / 2
                    term = c * x * y * p.q_pow(exponent)
                    out[a, b] = out[a, b] + term if out[a, b] else term
    return out


def braiding(v: WeightModule, w: WeightModule) -> Morphism:
    """c_{V,W} = tau o HH o R-check on V (x) W."""
    _check_params(v, w)

    def build():
        mat = _braiding_matrix(v, w)
        logging.debug(f'Built braiding on {v.label} (x) {w.label}.')
        return Morphism(tensor_module(v, w), tensor_module(w, v), mat, validate=False)
    return _cached(('c', v, w), build)


def braiding_inverse(v: WeightModule, w: WeightModule, method: str = 'closed') -> Morphism:
    """c_{V,W}^-1: W (x) V -> V (x) W, from the inverse quasi-R-matrix or by elimination."""
    _check_params(v, w)
    if method == 'inverse':
        return inverse(braiding(v, w))
    if method != 'closed':
        raise ValueError(f'unknown inversion method {method!r}')

    def build():
        return Morphism(tensor_module(w, v), tensor_module(v, w), _braiding_inverse_matrix(v, w), validate=False)
    return _cached(('cinv', v, w), build)


def twist(v: WeightModule) -> Morphism:
    """theta_V = ptr_R(c_{V,V})."""
    return _cached(('theta', v), lambda: Morphism(v, v, _twist_matrix(v), validate=False))


def twist_inverse(v: WeightModule) -> Morphism:
    return _cached(('theta_inv', v), lambda: Morphism(v, v, _twist_matrix(v, inverse=True), validate=False))


def e_operator(v: WeightModule) -> Morphism:
    """ptr_R(c_{V,V}^-1) o ptr_R(c_{V,V})."""
    return compose(twist_inverse(v), twist(v))


def e_operator_left(v: WeightModule) -> Morphism:
    # the same construction with left partial traces
    return compose(ptr_left(braiding_inverse(v, v)), ptr_left(braiding(v, v)))


def check_e_duality(v: WeightModule) -> bool:
    """(E_V)* = (E_{V*})^-1."""
    return dual_mor(e_operator(v)) == inverse(e_operator(dual_module(v)))


def check_e_monoidal(v: WeightModule, w: WeightModule) -> bool:
    return e_operator(tensor_module(v, w)) == tensor_mor(e_operator(v), e_operator(w))


def check_twist_duality(v: WeightModule) -> bool:
    """theta_{V*} = (theta_V)*."""
    return twist(dual_module(v)) == dual_mor(twist(v))


def check_balanced(v: WeightModule, w: WeightModule) -> bool:
    """theta_{V (x) W} = (theta_V (x) theta_W) o c_{W,V} o c_{V,W}."""
    double = compose(braiding(w, v), braiding(v, w))
    return twist(tensor_module(v, w)) == compose(tensor_mor(twist(v), twist(w)), double)


def check_hexagons(u: WeightModule, v: WeightModule, w: WeightModule) -> Tuple[bool, bool]:
    """Both hexagon identities, compared as matrices on the flattened tensor basis."""
    c = braiding
    first = linalg.equal(c(u, tensor_module(v, w)).mat,
                         linalg.matmul(tensor_mor(identity(v), c(u, w)).mat, tensor_mor(c(u, v), identity(w)).mat))
    second = linalg.equal(c(tensor_module(u, v), w).mat,
                          linalg.matmul(tensor_mor(c(u, w), identity(v)).mat, tensor_mor(identity(u), c(v, w)).mat))
    return first, second


def check_naturality(f: Morphism, u: WeightModule) -> Tuple[bool, bool]:
    """c_{W,U} (f (x) Id) = (Id (x) f) c_{V,U} and c_{U,W} (Id (x) f) = (f (x) Id) c_{U,V} for f: V -> W."""
    v, w = f.dom, f.cod
    left = compose(braiding(w, u), tensor_mor(f, identity(u))) == compose(tensor_mor(identity(u), f), braiding(v, u))
    right = compose(braiding(u, w), tensor_mor(identity(u), f)) == compose(tensor_mor(f, identity(u)), braiding(u, v))
    return left, right


def check_reidemeister_two(v: WeightModule, w: WeightModule) -> bool:
    c, cinv = braiding(v, w), braiding_inverse(v, w)
    return (compose(c, cinv) == identity(tensor_module(w, v))
            and compose(cinv, c) == identity(tensor_module(v, w))
            and cinv == braiding_inverse(v, w, method='inverse'))


def double_braiding_f(v: WeightModule) -> Morphism:
    """f_V = c_{V,V_0} o c_{V_0,V} on V_0 (x) V."""
    v0 = simple_nilpotent(v.params, 0)
    return compose(braiding(v, v0), braiding(v0, v))


def hopf_pairing(v: WeightModule, w: WeightModule) -> CycNumber:
    """<ptr_R(c_{W,V} c_{V,W})>: the open Hopf link cut along V, closed along W."""
    return scalar_of(ptr_right(compose(braiding(w, v), braiding(v, w))))
