import logging
import multiprocessing
import time
from fractions import Fraction
from queue import Empty
from typing import Callable, Dict, List, NamedTuple, Optional, Sequence

import numpy as np

from . import ALL_SUITES, MAX_DRAWS, format_rational, linalg
from .braid import (check_balanced, check_e_duality, check_e_monoidal, check_hexagons, check_naturality,
                    check_reidemeister_two, check_twist_duality, double_braiding_f, e_operator, e_operator_left, twist)
from .cyclo import as_cyc
from .diagram import apply_move, evaluate, insert_kink, parse, renormalized_invariant
from .exceptions import EvenOrderUnsupported, ModtraceError, NotSemisimple, SamplingExhausted, SingularWeight
from .moncat import Morphism, compose, decompose_semisimple, hom_basis, identity, ptr_right, scalar_of
from .mtrace import (check_b_condition, check_casimir_determines_dimension, check_cut_invariance,
                     check_decomposition_independence, check_duality_trace, check_two_sided, modified_dim_closed,
                     modified_dim_hopf, modified_trace)
from .rootsys import build_root_system, general_modified_dimension, singular_roots
from .uqsl2 import (Params, casimir_matrix, casimir_scalar, chebyshev_check, check_relations, dual_module,
                    grading_of, is_generic_alpha, is_regular_pair, nilpotent_casimir_value, relation_failures,
                    simple_nilpotent, tensor_module)


class VerifyConfig(NamedTuple):
    ell: int
    samples: int
    seed: int
    max_denominator: int


# Classical counts of positive roots.
POSITIVE_ROOT_COUNTS = {('A', 1): 1, ('A', 2): 3, ('A', 3): 6, ('B', 2): 4, ('B', 3): 9, ('C', 3): 9, ('D', 4): 12,
                        ('G', 2): 6, ('F', 4): 24, ('E', 6): 36, ('E', 7): 63, ('E', 8): 120}

# Cyclicity t(gf) = t(fg) is checked on at least this many random (f, g).
MIN_CYCLICITY_PAIRS = 20

# Rank two types sampled for the weight symmetry of the general dimension.
ROOT_SAMPLE_TYPES = ('A', 'B', 'G')


def case(prop: str, inputs: dict, ok: bool, witness=None) -> dict:
    return {'property': prop, 'input': inputs, 'pass': bool(ok), 'witness': None if ok else witness}


def guarded(prop: str, inputs: dict, check: Callable) -> dict:
    """Run check() -> (ok, witness); an exception becomes a failing case."""
    try:
        ok, witness = check()
    except (ModtraceError, ArithmeticError, ValueError) as e:
        logging.debug(f'{prop} on {inputs} raised {type(e).__name__}: {e}')
        return case(prop, inputs, False, f'{type(e).__name__}: {e}')
    return case(prop, inputs, ok, witness)


def _equal(lhs, rhs):
    ok = lhs == rhs
    return ok, None if ok else f'{lhs} != {rhs}'


def _describe(**values) -> dict:
    return {k: format_rational(v) if isinstance(v, (Fraction, int)) else v for k, v in values.items()}


class Sampler:
    """
    Seeded rational parameters avoiding the non-generic locus.

    Every tuple shares one denominator in [2, max_denominator]; numerators are drawn so the
    values lie in (-ell, ell). Pairs and triples are regular two by two. A draw gives up with
    SamplingExhausted after MAX_DRAWS rejections.
    """
    def __init__(self, config: VerifyConfig, suite: str):
        self.config = config
        self.params = Params(config.ell)
        self.rng = np.random.default_rng(np.random.SeedSequence([config.seed, ALL_SUITES.index(suite)]))
        self.skipped = 0

    def draw(self, arity: int = 1) -> List[Fraction]:
        ell = self.config.ell
        for _ in range(MAX_DRAWS):
            den = int(self.rng.integers(2, self.config.max_denominator + 1))
            nums = self.rng.integers(-ell * den + 1, ell * den, size=arity)
            values = [Fraction(int(n), den) for n in nums]
            if acceptable(ell, values):
                return values
            self.skipped += 1
        raise SamplingExhausted(f'no generic {arity}-tuple with denominators <= {self.config.max_denominator} '
                                f'at ell={ell} in {MAX_DRAWS} draws')

    def batch(self, arity: int = 1) -> List[List[Fraction]]:
        return [self.draw(arity) for _ in range(self.config.samples)]

    def integers(self, count: int) -> List[int]:
        return [int(x) for x in self.rng.integers(-3, 4, size=count)]


def acceptable(ell: int, values: Sequence[Fraction]) -> bool:
    return all(v.denominator != 1 and is_generic_alpha(ell, v) for v in values) and \
        all(is_regular_pair(ell, a, b) for i, a in enumerate(values) for b in values[i + 1:])


def sampling_feasible(ell: int, max_denominator: int, arity: int = 2, accept: Callable = None) -> bool:
    """Whether some shared denominator <= max_denominator admits an acceptable arity-tuple passing accept."""
    for den in range(2, max_denominator + 1):
        generic = [Fraction(n, den) for n in range(-ell * den + 1, ell * den)]
        generic = [v for v in generic if acceptable(ell, [v])]

        def extend(chosen):
            if len(chosen) == arity:
                return accept is None or accept(chosen)
            return any(extend(chosen + [v]) for v in generic if acceptable(ell, chosen + [v]))

        if extend([]):
            return True
    return False


def infeasible_reason(config: VerifyConfig, suites: Sequence[str]) -> Optional[str]:
    """Why draws for these suites can never be accepted, or None when they can."""
    ell, top = config.ell, config.max_denominator
    # hexagon draws triples, every other suite pairs
    arity = 3 if 'hexagon' in suites else 2
    if not sampling_feasible(ell, top, arity):
        return f'no regular {arity}-tuples with denominators <= {top} at ell={ell}'
    if 'roots' in suites and ell % 2:
        for kind in ROOT_SAMPLE_TYPES:
            rs = build_root_system(kind, 2)
            if not sampling_feasible(ell, top, 2, lambda mu: not singular_roots(rs, ell, mu)):
                return f'every {kind}2 weight with denominators <= {top} is singular at ell={ell}'
    return None


def _random_hom(sampler: Sampler, dom, cod, basis: List[Morphism] = None) -> Morphism:
    # integer combination of a Hom basis, computed here unless given
    if basis is None:
        basis = hom_basis(dom, cod)
    if not basis:
        return Morphism(dom, cod, linalg.zeros(cod.dim, dom.dim), validate=False)
    coeffs = sampler.integers(len(basis))
    return Morphism(dom, cod, linalg.combine([(c, b.mat) for c, b in zip(coeffs, basis)]), validate=False)


# Suites. Each takes a Sampler and returns a list of cases.

def suite_relations(s: Sampler) -> List[dict]:
    p = s.params
    cases = []
    for a, b in s.batch(2):
        v, w = simple_nilpotent(p, a), simple_nilpotent(p, b)
        for name, m in (('simple', v), ('dual', dual_module(v)), ('tensor', tensor_module(v, w))):
            cases.append(guarded(f'relations_{name}', _describe(alpha=a, beta=b),
                                 lambda m=m: (check_relations(m), ', '.join(relation_failures(m)))))
    return cases


def suite_chebyshev(s: Sampler) -> List[dict]:
    p = s.params
    cases = []
    for a, b in s.batch(2):
        v, w = simple_nilpotent(p, a), simple_nilpotent(p, b)
        inputs = _describe(alpha=a, beta=b)
        cases.append(guarded('casimir_forms', inputs,
                             lambda: (linalg.equal(casimir_matrix(v, 'EF'), casimir_matrix(v, 'FE')),
                                      'EF and FE differ')))
        cases.append(guarded('chebyshev_simple', inputs, lambda: (chebyshev_check(v), 'identity fails on V')))
        cases.append(guarded('chebyshev_tensor', inputs,
                             lambda: (chebyshev_check(tensor_module(v, w)), 'identity fails on V (x) W')))
        cases.append(guarded('casimir_value', inputs,
                             lambda: _equal(casimir_scalar(v), nilpotent_casimir_value(p, a))))
        cases.append(guarded('casimir_determines_dimension', inputs,
                             lambda: (check_casimir_determines_dimension(p, a, -a)
                                      and check_casimir_determines_dimension(p, a, a + 2 * p.r), 'd differs')))
    return cases


def suite_hexagon(s: Sampler) -> List[dict]:
    p = s.params
    cases = []
    for a, b, c in s.batch(3):
        u, v, w = (simple_nilpotent(p, x) for x in (a, b, c))
        inputs = _describe(alpha=a, beta=b, gamma=c)

        def hexagons():
            first, second = check_hexagons(u, v, w)
            return first and second, f'first={first}, second={second}'

        def naturality():
            f = decompose_semisimple(tensor_module(v, w))[0].incl
            left, right = check_naturality(f, u)
            return left and right, f'left={left}, right={right}'

        cases.append(guarded('hexagons', inputs, hexagons))
        cases.append(guarded('naturality', inputs, naturality))
        cases.append(guarded('reidemeister_two', inputs, lambda: (check_reidemeister_two(u, v), 'c c^-1 != Id')))
    return cases


def suite_ribbon(s: Sampler) -> List[dict]:
    p = s.params
    r = p.r
    cases = []
    for a, b in s.batch(2):
        v, w = simple_nilpotent(p, a), simple_nilpotent(p, b)
        inputs = _describe(alpha=a, beta=b)
        cases.append(guarded('twist_duality', inputs, lambda: (check_twist_duality(v), 'theta_{V*} != theta_V*')))
        cases.append(guarded('twist_scalar', inputs,
                             lambda: _equal(scalar_of(twist(v)), p.q_pow((a * a - (r - 1) ** 2) / 2))))
        cases.append(guarded('e_identity_simple', inputs,
                             lambda: (e_operator(v) == identity(v), 'E_V != Id')))
        cases.append(guarded('e_identity_tensor', inputs,
                             lambda: (e_operator(tensor_module(v, w)) == identity(tensor_module(v, w)),
                                      'E_{V (x) W} != Id')))
        cases.append(guarded('balanced', inputs, lambda: (check_balanced(v, w), 'balancing fails')))
    return cases


def suite_e_op(s: Sampler) -> List[dict]:
    p = s.params
    cases = []
    for a, b in s.batch(2):
        v, w = simple_nilpotent(p, a), simple_nilpotent(p, b)
        inputs = _describe(alpha=a, beta=b)
        cases.append(guarded('e_duality', inputs, lambda: (check_e_duality(v), '(E_V)* != (E_{V*})^-1')))
        cases.append(guarded('e_monoidal', inputs,
                             lambda: (check_e_monoidal(v, w), 'E_{V (x) W} != E_V (x) E_W')))
        cases.append(guarded('e_left', inputs, lambda: (e_operator_left(v) == identity(v), 'left E_V != Id')))
    return cases


def suite_dims(s: Sampler) -> List[dict]:
    p = s.params
    r = p.r
    v0 = simple_nilpotent(p, 0)
    cases = [guarded('normalization', {'alpha': '0'},
                     lambda: _equal(modified_dim_closed(p, 0), as_cyc((-1) ** (r - 1))))]
    for a, b in s.batch(2):
        v, w = simple_nilpotent(p, a), simple_nilpotent(p, b)
        inputs = _describe(alpha=a, beta=b)
        cases.append(guarded('closed_equals_hopf', inputs,
                             lambda: _equal(modified_dim_closed(p, a), modified_dim_hopf(v))))
        cases.append(guarded('symmetry', inputs, lambda: _equal(modified_dim_closed(p, a), modified_dim_closed(p, -a))))
        cases.append(guarded('ptr_right_f', inputs,
                             lambda: _equal(scalar_of(ptr_right(double_braiding_f(v))), as_cyc(r))))
        cases.append(guarded('dual_dimension', inputs,
                             lambda: _equal(modified_trace(identity(dual_module(v))), modified_dim_closed(p, a))))
        cases.append(guarded('cut_invariance', inputs,
                             lambda: (check_cut_invariance(v, w) and check_cut_invariance(v, v0), 'cuts differ')))
    return cases


def suite_trace(s: Sampler) -> List[dict]:
    p = s.params
    r = p.r
    cases = []
    pairs = s.batch(2)
    homs = {}
    for k, (a, b) in enumerate(pairs):
        v, w = simple_nilpotent(p, a), simple_nilpotent(p, b)
        inputs = _describe(alpha=a, beta=b)
        vw, wv = tensor_module(v, w), tensor_module(w, v)
        homs[k] = (vw, wv, hom_basis(vw, wv), hom_basis(wv, vw))
        f = _random_hom(s, vw, wv, homs[k][2])
        g = _random_hom(s, wv, vw, homs[k][3])
        h = compose(g, f)
        c = s.integers(1)[0]

        def identity_trace():
            expected = as_cyc(0)
            for j in range(r):
                expected = expected + modified_dim_closed(p, a + b + r - 1 - 2 * j)
            return _equal(modified_trace(identity(vw)), expected)

        cases.append(guarded('identity', inputs, identity_trace))
        cases.append(guarded('partial_traces', inputs, lambda: (check_two_sided(h), 't(h) != t(ptr h)')))
        cases.append(guarded('duality', inputs, lambda: (check_duality_trace(h), 't(h) != t(h*)')))
        cases.append(guarded('decomposition_choice', inputs,
                             lambda: (check_decomposition_independence(h), 'depends on the decomposition')))
        cases.append(guarded('linearity', inputs,
                             lambda: _equal(modified_trace(h + identity(vw).scale(c)),
                                            modified_trace(h) + modified_trace(identity(vw)) * c)))
        if k == 0:
            # the Hom counts behind the b-condition are the slow part; one pair is enough
            cases.append(guarded('b_condition_zero', inputs,
                                 lambda: (check_b_condition(p.ell, lambda x: 0, a, b), 'b = 0 rejected')))
            cases.append(guarded('b_condition_constant', inputs,
                                 lambda: (check_b_condition(p.ell, lambda x: Fraction(1, r * r), a, b),
                                          'b = 1/r^2 rejected')))

    # several random (f, g) per module pair, cycling through the pairs
    for m in range(max(MIN_CYCLICITY_PAIRS, s.config.samples)):
        k = m % len(pairs)
        a, b = pairs[k]
        vw, wv, forward, backward = homs[k]
        f, g = _random_hom(s, vw, wv, forward), _random_hom(s, wv, vw, backward)
        cases.append(guarded('cyclicity', _describe(alpha=a, beta=b, draw=m),
                             lambda f=f, g=g: _equal(modified_trace(compose(g, f)), modified_trace(compose(f, g)))))
    return cases


def suite_decompose(s: Sampler) -> List[dict]:
    p = s.params
    r = p.r
    cases = []
    for a, b in s.batch(2):
        v, w = simple_nilpotent(p, a), simple_nilpotent(p, b)
        vw = tensor_module(v, w)
        inputs = _describe(alpha=a, beta=b)

        def summands():
            parts = decompose_semisimple(vw)
            dims = [x.simple.dim for x in parts]
            return len(parts) == r and sum(dims) == r * r and set(dims) == {r}, f'dims={dims}'

        def resolution():
            parts = decompose_semisimple(vw)
            total = None
            for x in parts:
                e = compose(x.incl, x.proj)
                total = e if total is None else total + e
            ok = total == identity(vw)
            for i, x in enumerate(parts):
                for j, y in enumerate(parts):
                    m = compose(x.proj, y.incl).mat
                    ok = ok and (linalg.equal(m, linalg.identity(x.simple.dim)) if i == j else linalg.is_zero(m))
            return ok, 'inclusions and projections are not complementary'

        def singular_tensor():
            singular = tensor_module(v, simple_nilpotent(p, -a))
            if not grading_of(singular).is_singular() or grading_of(vw).is_singular():
                return False, 'discriminant test disagrees with the weights'
            try:
                decompose_semisimple(singular)
            except NotSemisimple:
                return True, None
            return False, 'V (x) V_{-alpha} decomposed'

        cases.append(guarded('summands', inputs, summands))
        cases.append(guarded('resolution', inputs, resolution))
        cases.append(guarded('singular_locus', inputs, singular_tensor))
    return cases


def _unknot_text(ell: int, alpha) -> str:
    return f'param ell = {ell}\nlet V = nilpotent(alpha={format_rational(alpha)})\nslice id(V+)'


def _hopf_text(ell: int, cut, loop) -> str:
    return '\n'.join([f'param ell = {ell}',
                      f'let A = nilpotent(alpha={format_rational(cut)})',
                      f'let B = nilpotent(alpha={format_rational(loop)})',
                      'slice id(A+) cupr(B)',
                      'slice xp(A+,B+) id(B-)',
                      'slice xp(B+,A+) id(B-)',
                      'slice id(A+) capr(B)'])


def _braid_text(ell: int, a, b, c) -> str:
    return '\n'.join([f'param ell = {ell}',
                      f'let A = nilpotent(alpha={format_rational(a)})',
                      f'let B = nilpotent(alpha={format_rational(b)})',
                      f'let C = nilpotent(alpha={format_rational(c)})',
                      'slice xp(A+,B+) id(C+)',
                      'slice id(B+) xp(A+,C+)',
                      'slice xn(B+,C+) id(A+)'])


def suite_diagram(s: Sampler) -> List[dict]:
    p = s.params
    r = p.r
    cases = []
    expected_hopf = as_cyc((-1) ** (r - 1) * r)
    for a, b in s.batch(2):
        inputs = _describe(alpha=a, beta=b)
        hopf = parse(_hopf_text(p.ell, 0, a))
        v = simple_nilpotent(p, a)

        cases.append(guarded('unknot', inputs,
                             lambda: _equal(renormalized_invariant(parse(_unknot_text(p.ell, a))),
                                            modified_dim_closed(p, a))))
        cases.append(guarded('hopf_matrix', inputs,
                             lambda: (evaluate(hopf) == ptr_right(double_braiding_f(v)), 'F(T) != ptr_R(f_V)')))
        cases.append(guarded('hopf_invariant', inputs, lambda: _equal(renormalized_invariant(hopf), expected_hopf)))
        cases.append(guarded('rotate_cut', inputs,
                             lambda: _equal(renormalized_invariant(apply_move(hopf, 'rotate_cut')), expected_hopf)))
        cases.append(guarded('reidemeister_two', inputs,
                             lambda: (evaluate(apply_move(hopf, 'R2_insert', 1, 0)) == evaluate(hopf)
                                      and apply_move(apply_move(hopf, 'R2_insert', 1, 0), 'R2_delete', 1, 0) == hopf,
                                      'R2 changes the tangle')))
        cases.append(guarded('framed_kink_pair', inputs,
                             lambda: _equal(renormalized_invariant(apply_move(hopf, 'framed_R1_insert_pair', 0, 0)),
                                            renormalized_invariant(hopf))))

        def kink():
            plain = parse(_unknot_text(p.ell, a))
            return evaluate(insert_kink(plain, 0, 0, 1)) == twist(v), 'kink != theta_V'

        def reidemeister_three():
            braid = parse(_braid_text(p.ell, a, b, 0))
            return evaluate(apply_move(braid, 'R3_slide', 0, 0)) == evaluate(braid), 'R3 changes F(T)'

        cases.append(guarded('kink', inputs, kink))
        cases.append(guarded('reidemeister_three', inputs, reidemeister_three))
    return cases


def suite_roots(s: Sampler) -> List[dict]:
    p = s.params
    cases = []
    for (kind, rank), count in sorted(POSITIVE_ROOT_COUNTS.items()):
        cases.append(guarded('positive_root_count', {'type': kind, 'rank': rank},
                             lambda kind=kind, rank=rank, count=count:
                             _equal(build_root_system(kind, rank).num_positive_roots, count)))

    if p.ell % 2 == 0:
        def even_rejected():
            try:
                general_modified_dimension(build_root_system('A', 1), p.ell, [Fraction(1, 3)])
            except EvenOrderUnsupported:
                return True, None
            return False, 'even ell accepted'
        cases.append(guarded('even_order_rejected', {'ell': p.ell}, even_rejected))
        return cases

    a1 = build_root_system('A', 1)
    for (a,) in s.batch(1):
        cases.append(guarded('a1_reduction', _describe(mu=a),
                             lambda a=a: _equal(general_modified_dimension(a1, p.ell, [a]),
                                                modified_dim_closed(p, a, normalization=1))))

    for kind in ROOT_SAMPLE_TYPES:
        rs = build_root_system(kind, 2)
        done = attempts = 0
        while done < s.config.samples:
            attempts += 1
            if attempts > MAX_DRAWS:
                raise SamplingExhausted(f'no nonsingular {kind}2 weight with denominators '
                                        f'<= {s.config.max_denominator} at ell={p.ell} in {MAX_DRAWS} draws')
            mu = s.draw(2)
            try:
                plus = general_modified_dimension(rs, p.ell, mu)
            except SingularWeight:
                s.skipped += 1
                continue
            inputs = {'type': kind, 'rank': 2, 'mu': [format_rational(x) for x in mu]}
            cases.append(guarded('weight_symmetry', inputs,
                                 lambda plus=plus, mu=mu, rs=rs:
                                 _equal(general_modified_dimension(rs, p.ell, [-x for x in mu]), plus)))
            done += 1
    return cases


SUITES: Dict[str, Callable[[Sampler], List[dict]]] = {
    'chebyshev': suite_chebyshev,
    'decompose': suite_decompose,
    'diagram': suite_diagram,
    'dims': suite_dims,
    'e_op': suite_e_op,
    'hexagon': suite_hexagon,
    'relations': suite_relations,
    'ribbon': suite_ribbon,
    'roots': suite_roots,
    'trace': suite_trace,
}


def run_suite(name: str, config: VerifyConfig) -> dict:
    logging.info(f'Running suite {name} at ell={config.ell}...')
    t0 = time.time()
    sampler = Sampler(config, name)
    cases = SUITES[name](sampler)
    if sampler.skipped:
        logging.warning(f'{name}: skipped {sampler.skipped} non-generic draws.')
    failed = sum(not c['pass'] for c in cases)
    logging.info(f'Suite {name} finished in {time.time() - t0:.2f} seconds: {len(cases) - failed}/{len(cases)} passed.')
    return {'name': name, 'cases': cases}


def worker_function(inq: multiprocessing.Queue, outq: multiprocessing.Queue, config: VerifyConfig):
    while True:
        try:
            name = inq.get(block=True)
        except Empty:
            continue
        else:
            if name is None:
                # No more suites; every other worker gets its own signal.
                return
            try:
                outq.put(run_suite(name, config))
            except SamplingExhausted as e:
                # a configuration problem, not a failing case; the parent re-raises it
                logging.error(f'Suite {name}: {e}')
                outq.put({'name': name, 'error': str(e)})
            except Exception as e:
                logging.exception(f'Suite {name} crashed.')
                outq.put({'name': name, 'cases': [case('suite', {}, False, f'{type(e).__name__}: {e}')]})
