import os
import re
from fractions import Fraction


OUTPUT_DIR = os.environ.get('SCRATCH', '.')
LOG_DIR = os.path.join(OUTPUT_DIR, 'logs')

# Intertwiner validation of every Morphism built. '0' turns it off globally.
VALIDATE_MORPHISMS = os.environ.get('MODTRACE_VALIDATE', '1') != '0'

MIN_ELL = 3

MAX_DENOMINATOR = 12
# Rejection sampling gives up after this many draws.
MAX_DRAWS = 1000
DEFAULT_SAMPLES = 5
DEFAULT_SEED = 1

ALL_SUITES = ('chebyshev', 'decompose', 'diagram', 'dims', 'e_op', 'hexagon', 'relations', 'ribbon', 'roots', 'trace')

RATIONAL_PATTERN = re.compile(r'^\s*([+-]?\d+)\s*(?:/\s*(\d+))?\s*$')


def parse_rational(s) -> Fraction:
    if isinstance(s, Fraction):
        return s
    if isinstance(s, int):
        return Fraction(s)
    match = RATIONAL_PATTERN.match(str(s))
    if not match:
        raise ValueError(f'not a rational number: {s!r}')
    num, den = match.groups()
    return Fraction(int(num), int(den) if den else 1)


def format_rational(x: Fraction) -> str:
    x = Fraction(x)
    if x.denominator == 1:
        return str(x.numerator)
    return f'{x.numerator}/{x.denominator}'
