import logging
import time
from collections import Counter
from multiprocessing import Process, Queue
from typing import List, Optional, Sequence, Tuple

import pandas as pd

from . import format_rational
from .cyclo import CycNumber
from .diagram import evaluate, load, renormalized_invariant
from .exceptions import NotScalar, SamplingExhausted
from .moncat import decompose_semisimple, morphism_to_json, scalar_of
from .mtrace import modified_dim_closed, modified_dim_hopf
from .rootsys import build_root_system, general_modified_dimension
from .uqsl2 import Params, simple_nilpotent, tensor_module
from .worker import VerifyConfig, run_suite, worker_function


def number_json(x: CycNumber) -> dict:
    z = x.to_float()
    return {'scalar': x.to_json(), 'float': [z.real, z.imag]}


def cmd_verify(config: VerifyConfig, suites: Sequence[str], cores: int = 1) -> Tuple[int, dict]:
    """
    Run the named suites and assemble the report in suite-name order. With cores > 1 the
    suites are spread over worker processes fed from a queue.
    """
    t0 = time.time()
    names = sorted(set(suites))
    results = []
    if cores <= 1 or len(names) == 1:
        for name in names:
            results.append(run_suite(name, config))
    else:
        inq, outq = Queue(), Queue()
        processes = [Process(target=worker_function, args=(inq, outq, config)) for _ in range(min(cores, len(names)))]
        for p in processes:
            p.start()
        for name in names:
            inq.put(name)
        for _ in processes:
            inq.put(None)

        logging.info(f'Queued {len(names)} suites on {len(processes)} processes.')
        for _ in names:
            results.append(outq.get(block=True))
        for p in processes:
            p.join()
        errors = [s['error'] for s in results if 'error' in s]
        if errors:
            raise SamplingExhausted('; '.join(errors))

    results.sort(key=lambda s: s['name'])
    report = {
        'ell': config.ell,
        'seed': config.seed,
        'sampling': {
            'samples': config.samples,
            'max_denominator': config.max_denominator,
            'generator': 'numpy default_rng(SeedSequence([seed, suite index]))',
        },
        'suites': results,
    }
    failed = sum(not c['pass'] for s in results for c in s['cases'])
    logging.info(f'Verification finished in {time.time() - t0:.2f} seconds with {failed} failing cases.')
    return (0 if failed == 0 else 1), report


def report_frame(report: dict) -> pd.DataFrame:
    rows = []
    for suite in report['suites']:
        for c in suite['cases']:
            rows.append({'suite': suite['name'], 'property': c['property'],
                         'input': ', '.join(f'{k}={v}' for k, v in c['input'].items()),
                         'pass': c['pass'], 'witness': c['witness']})
    return pd.DataFrame(rows, columns=['suite', 'property', 'input', 'pass', 'witness'])


def summary_frame(report: dict) -> pd.DataFrame:
    df = report_frame(report)
    summary = df.groupby('suite')['pass'].agg(['count', 'sum'])
    summary.columns = ['cases', 'passed']
    summary['failed'] = summary['cases'] - summary['passed']
    return summary


def cmd_dim(ell: int, alpha=None, kind: Optional[str] = None, rank: Optional[int] = None,
            mu: Optional[List] = None, d0=None, cross_check: bool = False, basis: str = 'fundamental') -> dict:
    params = Params(ell)
    if alpha is not None:
        value = modified_dim_closed(params, alpha, d0)
        out = {'ell': ell, 'alpha': format_rational(alpha), **number_json(value)}
        if cross_check:
            hopf = modified_dim_hopf(simple_nilpotent(params, alpha), d0)
            out['cross_check'] = {'hopf': number_json(hopf), 'equal': hopf == value}
        return out

    rs = build_root_system(kind, rank)
    value = general_modified_dimension(rs, ell, mu, 1 if d0 is None else d0, basis)
    out = {'ell': ell, 'type': rs.type, 'rank': rs.rank, 'mu': [format_rational(x) for x in mu],
           'basis': basis, **number_json(value)}
    if cross_check:
        if rs.type == 'A' and rs.rank == 1:
            mu0 = mu[0] if basis == 'fundamental' else rs.to_fundamental(mu)[0]
            closed = modified_dim_closed(params, mu0, 1 if d0 is None else d0)
            out['cross_check'] = {'sl2': number_json(closed), 'equal': closed == value}
        else:
            logging.warning('--cross-check compares against sl(2) and only applies to type A1.')
    return out


def cmd_eval(path: str, ell: Optional[int] = None) -> dict:
    T = load(path, ell)
    f = evaluate(T)
    try:
        out = number_json(scalar_of(f))
    except NotScalar:
        out = {'matrix': morphism_to_json(f)}
    out['ell'] = T.params.ell
    if T.is_one_one():
        out['renormalized'] = number_json(renormalized_invariant(T))
    return out


def cmd_decompose(ell: int, alpha, beta) -> dict:
    params = Params(ell)
    m = tensor_module(simple_nilpotent(params, alpha), simple_nilpotent(params, beta))
    summands = decompose_semisimple(m)
    counts = Counter(s.simple.alpha for s in summands)
    rows = [{'gamma': format_rational(g), 'dim': simple_nilpotent(params, g).dim, 'multiplicity': n}
            for g, n in sorted(counts.items(), reverse=True)]
    total = sum(s.simple.dim for s in summands)
    return {'ell': ell, 'alpha': format_rational(alpha), 'beta': format_rational(beta), 'summands': rows,
            'dimension': {'tensor': m.dim, 'sum': total, 'ok': total == m.dim}}


def cmd_roots(kind: str, rank: int) -> dict:
    rs = build_root_system(kind, rank)
    return {**rs.to_json(),
            'cartan': [list(row) for row in rs.cartan],
            'num_positive_roots': rs.num_positive_roots,
            'dimension': rs.dimension,
            'rho': [format_rational(x) for x in rs.rho]}
