import argparse
import json
import logging
import os
import sys
import time
from datetime import datetime
from multiprocessing import cpu_count

from modtrace import (ALL_SUITES, DEFAULT_SAMPLES, DEFAULT_SEED, LOG_DIR, MAX_DENOMINATOR, MIN_ELL, OUTPUT_DIR,
                      parse_rational)
from modtrace.exceptions import ModtraceError, SamplingExhausted


CPU_CORES = 1


def _rational(text):
    try:
        return parse_rational(text)
    except ValueError as e:
        raise argparse.ArgumentTypeError(str(e))


def _rational_list(text):
    return [_rational(x) for x in text.split(',') if x.strip()]


def _suite_list(text):
    names = [x.strip() for x in text.split(',') if x.strip()]
    unknown = [x for x in names if x not in ALL_SUITES]
    if unknown or not names:
        raise argparse.ArgumentTypeError(f'unknown suites {unknown}; choose from {", ".join(ALL_SUITES)}')
    return names


def parse_config(argv=None):
    global CPU_CORES
    parser = argparse.ArgumentParser(description='Exact modified traces for unrolled quantum sl(2) at roots of unity.')
    parser.add_argument('--cores', nargs=1, default=[1], type=int, help='Number of cores to use.')
    parser.add_argument('--quiet', action='store_true', help='Only log warnings and errors.')
    parser.add_argument('--pretty', action='store_true', help='Print tables instead of JSON.')
    sub = parser.add_subparsers(dest='command', required=True)

    verify = sub.add_parser('verify', help='Run the seeded verification suites.')
    verify.add_argument('--ell', type=int, required=True)
    verify.add_argument('--samples', type=int, default=DEFAULT_SAMPLES)
    verify.add_argument('--seed', type=int, default=DEFAULT_SEED)
    verify.add_argument('--suites', type=_suite_list, default=list(ALL_SUITES),
                        help=f'Comma separated subset of {", ".join(ALL_SUITES)}.')
    verify.add_argument('--max-denominator', type=int, default=MAX_DENOMINATOR)
    verify.add_argument('--csv', action='store_true', help='Also write every case to a CSV file under SCRATCH.')

    dim = sub.add_parser('dim', help='Modified dimension of a generic simple module.')
    dim.add_argument('--ell', type=int, required=True)
    dim.add_argument('--alpha', type=_rational)
    dim.add_argument('--type', dest='kind')
    dim.add_argument('--rank', type=int)
    dim.add_argument('--mu', type=_rational_list)
    dim.add_argument('--basis', choices=['fundamental', 'simple'], default='fundamental')
    dim.add_argument('--d0', type=_rational, help='Value of d(V_0); defaults to (-1)^(r-1) for sl(2), 1 otherwise.')
    dim.add_argument('--cross-check', action='store_true', help='Recompute the value through the open Hopf link.')

    ev = sub.add_parser('eval', help='Evaluate a tangle file.')
    ev.add_argument('file')
    ev.add_argument('--ell', type=int, help='Root of unity order when the file has no param line.')

    dec = sub.add_parser('decompose', help='Split V_alpha (x) V_beta into simples.')
    dec.add_argument('--ell', type=int, required=True)
    dec.add_argument('--alpha', type=_rational, required=True)
    dec.add_argument('--beta', type=_rational, required=True)

    roots = sub.add_parser('roots', help='List the positive roots of a simple Lie algebra.')
    roots.add_argument('--type', dest='kind', required=True)
    roots.add_argument('--rank', type=int, required=True)

    args = parser.parse_args(argv)

    CPU_CORES = args.cores[0]
    if CPU_CORES < 1 or CPU_CORES > cpu_count():
        parser.error('Invalid core number specified.')
    ell = getattr(args, 'ell', None)
    if ell is not None and ell < MIN_ELL:
        parser.error(f'--ell must be at least {MIN_ELL}, got {ell}')
    if args.command == 'verify':
        if args.samples < 1:
            parser.error('--samples must be positive')
        if args.max_denominator < 2:
            parser.error('--max-denominator must be at least 2')
        from modtrace.worker import VerifyConfig, infeasible_reason
        reason = infeasible_reason(VerifyConfig(args.ell, args.samples, args.seed, args.max_denominator), args.suites)
        if reason:
            parser.error(f'{reason}; raise --max-denominator')
    if args.command == 'dim':
        if (args.alpha is None) == (args.kind is None):
            parser.error('dim needs either --alpha or --type/--rank/--mu')
        if args.kind is not None and (args.rank is None or args.mu is None):
            parser.error('--type needs --rank and --mu')
    return args


def init_logging(quiet=False):
    if not os.path.isdir(LOG_DIR):
        os.makedirs(LOG_DIR)

    logging.basicConfig(filename=os.path.join(LOG_DIR, '{:%y%m%d_%H%M%S}.log'.format(datetime.now())),
                        format='%(asctime)s|%(levelname)s|%(message)s',
                        datefmt='%H:%M:%S',
                        level=logging.DEBUG)

    # stdout carries the JSON output.
    handler = logging.StreamHandler(sys.stderr)
    handler.setLevel(logging.WARNING if quiet else logging.INFO)
    logging.getLogger().addHandler(handler)

    logging.debug('Initializing...')
    logging.debug(f'Utilizing {CPU_CORES} cores...')


def emit(obj, pretty=False, frame=None):
    if pretty and frame is not None:
        print(frame.to_string())
    else:
        print(json.dumps(obj, indent=2 if pretty else None, sort_keys=False))


def run_verify(args):
    from modtrace.commands import cmd_verify, report_frame, summary_frame
    from modtrace.worker import VerifyConfig

    t0 = time.time()
    config = VerifyConfig(args.ell, args.samples, args.seed, args.max_denominator)
    try:
        code, report = cmd_verify(config, args.suites, CPU_CORES)
    except SamplingExhausted as e:
        logging.error(f'{type(e).__name__}: {e}')
        return 2

    if args.csv:
        output_fp = os.path.join(OUTPUT_DIR, f'verify_ell{args.ell}_seed{args.seed}.csv')
        report_frame(report).to_csv(output_fp, index=False)
        logging.info(f'Wrote cases to {output_fp}.')

    emit(report, args.pretty, summary_frame(report) if args.pretty else None)

    SLACK_SECRET = os.environ.get('SLACK_SECRET')
    if SLACK_SECRET:
        from util.slackbot import send_slack_post, verify_blocks
        send_slack_post(SLACK_SECRET, verify_blocks(report, time.time() - t0))
    else:
        logging.debug('verify: Slack updates not enabled.')
    return code


def main(argv=None):
    args = parse_config(argv)
    init_logging(args.quiet)

    if args.command == 'verify':
        return run_verify(args)

    import pandas as pd
    from modtrace.commands import cmd_decompose, cmd_dim, cmd_eval, cmd_roots

    try:
        if args.command == 'dim':
            out = cmd_dim(args.ell, args.alpha, args.kind, args.rank, args.mu, args.d0, args.cross_check, args.basis)
            row = {k: v for k, v in out.items() if k not in ('scalar', 'cross_check')}
            emit(out, args.pretty, pd.DataFrame([row]))
        elif args.command == 'eval':
            emit(cmd_eval(args.file, args.ell), args.pretty)
        elif args.command == 'decompose':
            out = cmd_decompose(args.ell, args.alpha, args.beta)
            emit(out, args.pretty, pd.DataFrame(out['summands']))
        else:
            out = cmd_roots(args.kind, args.rank)
            emit(out, args.pretty, pd.DataFrame({'positive_root': [str(tuple(a)) for a in out['positive_roots']]}))
    except (ModtraceError, OSError) as e:
        logging.error(f'{type(e).__name__}: {e}')
        return 1
    return 0


if __name__ == '__main__':
    sys.exit(main())
