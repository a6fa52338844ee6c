"""
Ribbon tangles as bottom-to-top sequences of slices, read from a small line-oriented language:

    param ell = 5
    let V = nilpotent(alpha=1/3)
    let W = dual(V)
    slice id(V+) cupr(W)
    slice xp(V+,W+) id(W-)

Each slice is a left-to-right row of generators. A strand is an object name with an
orientation; (V,+) carries V and (V,-) carries V*.
"""
import functools
import logging
import re
from dataclasses import dataclass, field, replace
from types import MappingProxyType
from typing import Dict, List, Mapping, NamedTuple, Optional, Sequence, Tuple

import numpy as np

from . import format_rational, linalg, parse_rational
from .braid import braiding, braiding_inverse
from .cyclo import CycNumber
from .exceptions import (DomainMismatch, MoveNotApplicable, OrientationUnsupported, ShapeMismatch, TangleSyntaxError,
                         TypeMismatch, UnboundCoupon)
from .moncat import Morphism, duality_morphisms
from .mtrace import modified_trace
from .uqsl2 import Params, WeightModule, dual_module, simple_nilpotent, tensor_many, tensor_module, trivial_module


PARAM_PATTERN = re.compile(r'^param\s+ell\s*=\s*(\d+)$')
LET_PATTERN = re.compile(r'^let\s+([A-Za-z_]\w*)\s*=\s*(.+)$')
NILPOTENT_PATTERN = re.compile(r'^nilpotent\(\s*alpha\s*=\s*([^()]+?)\s*\)$')
DUAL_PATTERN = re.compile(r'^dual\(\s*([A-Za-z_]\w*)\s*\)$')
TENSOR_PATTERN = re.compile(r'^tensor\(\s*([A-Za-z_]\w*)\s*,\s*([A-Za-z_]\w*)\s*\)$')
SLICE_PATTERN = re.compile(r'^slice(?:\s+|$)')
GENERATOR_PATTERN = re.compile(r'([a-z]+)\(([^()]*)\)')
STRAND_PATTERN = re.compile(r'^([A-Za-z_]\w*)\s*([+-])$')
CUP_PATTERN = re.compile(r'^([A-Za-z_]\w*)\s*([+-]?)$')
COUPON_PATTERN = re.compile(r'^([A-Za-z_]\w*)\s*:(.*)->(.*)$')

CROSSINGS = ('xp', 'xn')
CUPS = ('cupr', 'cupl')
CAPS = ('capr', 'capl')
MOVES = ('R2_insert', 'R2_delete', 'R3_slide', 'framed_R1_insert_pair', 'rotate_cut')


class Strand(NamedTuple):
    name: str
    sign: int

    def __str__(self):
        return f'{self.name}{"+" if self.sign > 0 else "-"}'


def _plus(name):
    return Strand(name, 1)


def _minus(name):
    return Strand(name, -1)


@dataclass(frozen=True)
class Generator:
    """
    One box of a slice. `strands` holds the arguments as written: one strand for id, cups
    and caps, two for crossings, the inputs of a coupon. `outs` is only used by coupons.
    """
    kind: str
    strands: Tuple[Strand, ...]
    name: Optional[str] = None
    outs: Tuple[Strand, ...] = ()

    @property
    def inputs(self) -> Tuple[Strand, ...]:
        if self.kind == 'id' or self.kind == 'coupon':
            return self.strands
        if self.kind in CROSSINGS:
            return self.strands
        if self.kind in CUPS:
            return ()
        v = self.strands[0].name
        return (_plus(v), _minus(v)) if self.kind == 'capr' else (_minus(v), _plus(v))

    @property
    def outputs(self) -> Tuple[Strand, ...]:
        if self.kind == 'id':
            return self.strands
        if self.kind == 'coupon':
            return self.outs
        if self.kind in CROSSINGS:
            return self.strands[1], self.strands[0]
        if self.kind in CAPS:
            return ()
        v = self.strands[0].name
        return (_plus(v), _minus(v)) if self.kind == 'cupr' else (_minus(v), _plus(v))

    def __str__(self):
        if self.kind == 'coupon':
            ins = ' '.join(map(str, self.strands))
            outs = ' '.join(map(str, self.outs))
            return f'coupon({self.name}: {ins} -> {outs})'
        if self.kind in CUPS or self.kind in CAPS:
            s = self.strands[0]
            return f'{self.kind}({s.name}{"-" if s.sign < 0 else ""})'
        return f'{self.kind}({",".join(map(str, self.strands))})'


def ident(strand: Strand) -> Generator:
    return Generator('id', (strand,))


def crossing(kind: str, left: Strand, right: Strand) -> Generator:
    return Generator(kind, (left, right))


def cup_or_cap(kind: str, name: str) -> Generator:
    return Generator(kind, (_plus(name),))


Slice = Tuple[Generator, ...]


def slice_inputs(s: Slice) -> Tuple[Strand, ...]:
    return tuple(x for g in s for x in g.inputs)


def slice_outputs(s: Slice) -> Tuple[Strand, ...]:
    return tuple(x for g in s for x in g.outputs)


def _first_difference(a: Sequence, b: Sequence) -> int:
    for i, (x, y) in enumerate(zip(a, b)):
        if x != y:
            return i
    return min(len(a), len(b))


@dataclass(frozen=True)
class TangleDiagram:
    """A type-checked tangle. Construction fails with TypeMismatch on boundary mismatches."""
    params: Params
    definitions: Tuple[Tuple[str, str], ...]
    modules: Mapping[str, WeightModule] = field(compare=False)
    slices: Tuple[Slice, ...]
    lines: Tuple[int, ...] = field(default=(), compare=False)

    def __post_init__(self):
        if not self.slices:
            raise TypeMismatch('a tangle needs at least one slice')
        for k, s in enumerate(self.slices):
            for g in s:
                for strand in g.strands + g.outs:
                    if strand.name not in self.modules:
                        raise TypeMismatch(f'unknown object {strand.name!r}', k, None)
            if k == 0:
                continue
            below, above = slice_outputs(self.slices[k - 1]), slice_inputs(s)
            if below != above:
                pos = _first_difference(below, above)
                where = f' (line {self.lines[k]})' if len(self.lines) == len(self.slices) else ''
                raise TypeMismatch(f'inputs {" ".join(map(str, above))} do not match the outputs '
                                   f'{" ".join(map(str, below))} of the slice below{where}', k, pos)

    @property
    def bottom(self) -> Tuple[Strand, ...]:
        return slice_inputs(self.slices[0])

    @property
    def top(self) -> Tuple[Strand, ...]:
        return slice_outputs(self.slices[-1])

    def boundary_at(self, index: int) -> Tuple[Strand, ...]:
        """Strands below slice `index`; index == len(slices) gives the top boundary."""
        if not 0 <= index <= len(self.slices):
            raise MoveNotApplicable(f'no level {index} in a tangle with {len(self.slices)} slices')
        if index == len(self.slices):
            return self.top
        return slice_inputs(self.slices[index])

    def is_one_one(self) -> bool:
        return len(self.bottom) == 1 and self.bottom == self.top and self.bottom[0].sign > 0

    def object_of(self, strand: Strand) -> WeightModule:
        m = self.modules[strand.name]
        return m if strand.sign > 0 else dual_module(m)

    def with_slices(self, slices: Sequence[Slice]) -> 'TangleDiagram':
        return replace(self, slices=tuple(tuple(s) for s in slices), lines=())

    def to_text(self) -> str:
        out = [f'param ell = {self.params.ell}']
        out += [f'let {name} = {expr}' for name, expr in self.definitions]
        out += ['slice ' + ' '.join(map(str, s)) for s in self.slices]
        return '\n'.join(out) + '\n'


def _module_expression(expr: str, modules: Dict[str, WeightModule], params: Params, line: int, col: int):
    expr = expr.strip()
    if expr == 'trivial':
        return trivial_module(params), 'trivial'
    match = NILPOTENT_PATTERN.match(expr)
    if match:
        try:
            alpha = parse_rational(match.group(1))
        except ValueError:
            raise TangleSyntaxError(f'bad rational {match.group(1)!r}', line, col)
        return simple_nilpotent(params, alpha), f'nilpotent(alpha={format_rational(alpha)})'

    def lookup(name):
        if name not in modules:
            raise TangleSyntaxError(f'unknown object {name!r}', line, col)
        return modules[name]

    match = DUAL_PATTERN.match(expr)
    if match:
        return dual_module(lookup(match.group(1))), f'dual({match.group(1)})'
    match = TENSOR_PATTERN.match(expr)
    if match:
        a, b = match.groups()
        return tensor_module(lookup(a), lookup(b)), f'tensor({a},{b})'
    raise TangleSyntaxError(f'cannot read object definition {expr!r}', line, col)


def _strand(text: str, line: int, col: int) -> Strand:
    match = STRAND_PATTERN.match(text.strip())
    if not match:
        raise TangleSyntaxError(f'expected a strand like V+ or V-, got {text.strip()!r}', line, col)
    return Strand(match.group(1), 1 if match.group(2) == '+' else -1)


def _strand_list(text: str, line: int, col: int) -> Tuple[Strand, ...]:
    parts = [p for p in re.split(r'[\s,]+', text.strip()) if p]
    return tuple(_strand(p, line, col) for p in parts)


def _generator(kind: str, args: str, line: int, col: int) -> Generator:
    if kind == 'id':
        return Generator('id', (_strand(args, line, col),))
    if kind in CUPS or kind in CAPS:
        match = CUP_PATTERN.match(args.strip())
        if not match:
            raise TangleSyntaxError(f'{kind} takes one object name, got {args.strip()!r}', line, col)
        return Generator(kind, (Strand(match.group(1), -1 if match.group(2) == '-' else 1),))
    if kind in CROSSINGS:
        parts = args.split(',')
        if len(parts) != 2:
            raise TangleSyntaxError(f'{kind} takes two strands', line, col)
        return Generator(kind, (_strand(parts[0], line, col), _strand(parts[1], line, col)))
    if kind == 'coupon':
        match = COUPON_PATTERN.match(args.strip())
        if not match:
            raise TangleSyntaxError('coupon must read coupon(name: ins -> outs)', line, col)
        return Generator('coupon', _strand_list(match.group(2), line, col), name=match.group(1),
                         outs=_strand_list(match.group(3), line, col))
    raise TangleSyntaxError(f'unknown generator {kind!r}', line, col)


def _slice(body: str, offset: int, line: int) -> Slice:
    gens = []
    pos = 0
    while pos < len(body):
        if body[pos].isspace():
            pos += 1
            continue
        match = GENERATOR_PATTERN.match(body, pos)
        if not match:
            raise TangleSyntaxError(f'unexpected text {body[pos:pos + 10]!r}', line, offset + pos + 1)
        gens.append(_generator(match.group(1), match.group(2), line, offset + pos + 1))
        pos = match.end()
    if not gens:
        raise TangleSyntaxError('empty slice', line, offset + 1)
    return tuple(gens)


def parse(text: str, ell: Optional[int] = None) -> TangleDiagram:
    """Read and type-check a tangle. `ell` is used when the text has no `param ell` line."""
    params = Params(ell) if ell is not None else None
    modules: Dict[str, WeightModule] = {}
    definitions: List[Tuple[str, str]] = []
    slices: List[Slice] = []
    lines: List[int] = []

    for lineno, raw in enumerate(text.splitlines(), start=1):
        content = raw.split('#', 1)[0]
        stripped = content.strip()
        if not stripped:
            continue
        col = len(content) - len(content.lstrip()) + 1

        match = PARAM_PATTERN.match(stripped)
        if match:
            if modules or slices:
                raise TangleSyntaxError('param ell must come before every let and slice line', lineno, col)
            params = Params(int(match.group(1)))
            continue
        if stripped.startswith('param'):
            raise TangleSyntaxError('expected param ell = <int>', lineno, col)

        match = LET_PATTERN.match(stripped)
        if match:
            if params is None:
                raise TangleSyntaxError('no param ell line before the first let', lineno, col)
            name, expr = match.groups()
            if name in modules:
                raise TangleSyntaxError(f'object {name!r} defined twice', lineno, col)
            expr_col = col + stripped.index(expr)
            modules[name], normal = _module_expression(expr, modules, params, lineno, expr_col)
            definitions.append((name, normal))
            continue

        match = SLICE_PATTERN.match(stripped)
        if match:
            s = _slice(stripped[match.end():], col - 1 + match.end(), lineno)
            for g in s:
                for strand in g.strands + g.outs:
                    if strand.name not in modules:
                        raise TangleSyntaxError(f'unknown object {strand.name!r}', lineno, col)
            slices.append(s)
            lines.append(lineno)
            continue
        raise TangleSyntaxError(f'cannot read {stripped[:20]!r}', lineno, col)

    if params is None:
        raise TangleSyntaxError('missing param ell line')
    if not slices:
        raise TangleSyntaxError('no slice lines')
    diagram = TangleDiagram(params, tuple(definitions), MappingProxyType(modules), tuple(slices), tuple(lines))
    logging.debug(f'Parsed a tangle with {len(slices)} slices: {len(diagram.bottom)} -> {len(diagram.top)} strands.')
    return diagram


def load(path: str, ell: Optional[int] = None) -> TangleDiagram:
    with open(path) as f:
        return parse(f.read(), ell)


def _boundary_module(T: TangleDiagram, strands: Sequence[Strand]) -> WeightModule:
    if not strands:
        return trivial_module(T.params)
    return tensor_many(T.object_of(s) for s in strands)


def _generator_matrix(T: TangleDiagram, g: Generator, bindings: Mapping[str, Morphism]) -> np.ndarray:
    if g.kind == 'id':
        return linalg.identity(T.object_of(g.strands[0]).dim)
    if g.kind in CUPS or g.kind in CAPS:
        if g.strands[0].sign < 0:
            raise OrientationUnsupported(f'{g.kind} is only defined on a positively named object, got {g}')
        duality = duality_morphisms(T.modules[g.strands[0].name])
        # capr = ev_l on (V+,V-), capl = ev_r on (V-,V+), cupr = coev_r, cupl = coev_l
        return {'capr': duality.ev_l, 'capl': duality.ev_r, 'cupr': duality.coev_r, 'cupl': duality.coev_l}[g.kind].mat
    if g.kind == 'xp':
        return braiding(T.object_of(g.strands[0]), T.object_of(g.strands[1])).mat
    if g.kind == 'xn':
        return braiding_inverse(T.object_of(g.strands[1]), T.object_of(g.strands[0])).mat
    if g.name not in bindings:
        raise UnboundCoupon(f'no morphism bound to coupon {g.name!r}')
    f = bindings[g.name]
    dom, cod = _boundary_module(T, g.inputs), _boundary_module(T, g.outputs)
    if f.dom.weights != dom.weights or f.cod.weights != cod.weights:
        raise DomainMismatch(f'coupon {g.name!r} needs {dom.label} -> {cod.label}, got {f!r}')
    return f.mat


def evaluate(T: TangleDiagram, bindings: Optional[Mapping[str, Morphism]] = None) -> Morphism:
    """F(T): slices tensor horizontally and compose from the bottom up."""
    bindings = bindings or {}
    dom = _boundary_module(T, T.bottom)
    mat = linalg.identity(dom.dim)
    for s in T.slices:
        mat = linalg.matmul(functools.reduce(linalg.kron, [_generator_matrix(T, g, bindings) for g in s]), mat)
    return Morphism(dom, _boundary_module(T, T.top), mat)


def renormalized_invariant(T: TangleDiagram, bindings: Optional[Mapping[str, Morphism]] = None,
                           normalization=None) -> CycNumber:
    if not T.is_one_one():
        raise ShapeMismatch('the renormalized invariant needs a (1,1)-tangle on a positive strand')
    return modified_trace(evaluate(T, bindings), normalization)


def _pad(boundary: Sequence[Strand], position: int, gens: Sequence[Generator]) -> Slice:
    width = sum(len(g.inputs) for g in gens)
    consumed = tuple(x for g in gens for x in g.inputs)
    if position < 0 or tuple(boundary[position:position + width]) != consumed:
        raise MoveNotApplicable(f'{" ".join(map(str, gens))} does not fit at position {position}')
    return tuple(ident(s) for s in boundary[:position]) + tuple(gens) + \
        tuple(ident(s) for s in boundary[position + width:])


def _lone_crossing(s: Slice):
    """(position, generator) if the slice is identities around a single crossing."""
    found = None
    pos = 0
    for g in s:
        if g.kind in CROSSINGS:
            if found is not None:
                return None
            found = (pos, g)
        elif g.kind != 'id':
            return None
        pos += len(g.inputs)
    return found


def kink(strand: Strand, sign: int) -> List[Tuple[Generator, ...]]:
    """Three slices on a single strand: a curl whose crossing is xp (sign 1) or xn (sign -1)."""
    kind = 'xp' if sign > 0 else 'xn'
    v = strand.name
    if strand.sign > 0:
        return [(ident(strand), cup_or_cap('cupr', v)),
                (crossing(kind, strand, strand), ident(_minus(v))),
                (ident(strand), cup_or_cap('capr', v))]
    return [(ident(strand), cup_or_cap('cupl', v)),
            (crossing(kind, strand, strand), ident(_plus(v))),
            (ident(strand), cup_or_cap('capl', v))]


def insert_kink(T: TangleDiagram, index: int, position: int, sign: int = 1) -> TangleDiagram:
    boundary = T.boundary_at(index)
    if not 0 <= position < len(boundary):
        raise MoveNotApplicable(f'no strand at position {position}')
    strand = boundary[position]
    before = tuple(ident(s) for s in boundary[:position])
    after = tuple(ident(s) for s in boundary[position + 1:])
    new = [before + gens + after for gens in kink(strand, sign)]
    slices = list(T.slices)
    return T.with_slices(slices[:index] + new + slices[index:])


def _r2_insert(T, index, position, sign):
    boundary = T.boundary_at(index)
    if position + 1 >= len(boundary) or position < 0:
        raise MoveNotApplicable(f'R2 needs two strands at position {position}')
    a, b = boundary[position], boundary[position + 1]
    first, second = ('xp', 'xn') if sign > 0 else ('xn', 'xp')
    lower = _pad(boundary, position, [crossing(first, a, b)])
    upper = _pad(slice_outputs(lower), position, [crossing(second, b, a)])
    slices = list(T.slices)
    return T.with_slices(slices[:index] + [lower, upper] + slices[index:])


def _r2_delete(T, index, position):
    if index + 1 >= len(T.slices):
        raise MoveNotApplicable(f'no pair of slices at {index}')
    lower, upper = _lone_crossing(T.slices[index]), _lone_crossing(T.slices[index + 1])
    if lower is None or upper is None or lower[0] != position or upper[0] != position \
            or lower[1].kind == upper[1].kind:
        raise MoveNotApplicable(f'slices {index} and {index + 1} are not an R2 pair at position {position}')
    return T.with_slices(T.slices[:index] + T.slices[index + 2:])


def _r3_slide(T, index, position):
    if index + 2 >= len(T.slices):
        raise MoveNotApplicable(f'no triple of slices at {index}')
    found = [_lone_crossing(s) for s in T.slices[index:index + 3]]
    if any(x is None for x in found):
        raise MoveNotApplicable(f'slices {index}..{index + 2} are not three lone crossings')
    positions = tuple(x[0] for x in found)
    p = position
    if positions == (p, p + 1, p):
        shift = 1
    elif positions == (p + 1, p, p + 1):
        shift = -1
    else:
        raise MoveNotApplicable(f'crossings at {positions} do not form a triangle at position {p}')
    a, b, c = (x[1].kind for x in found)
    # the third strand must pass entirely over or under the crossing it slides across
    if a == c and b != a:
        raise MoveNotApplicable('the three crossings do not admit a consistent height order')

    boundary = T.boundary_at(index)
    s0, s1, s2 = boundary[p:p + 3]
    new = []
    current = boundary
    if shift == 1:
        plan = [(p + 1, c, s1, s2), (p, b, s0, s2), (p + 1, a, s0, s1)]
    else:
        plan = [(p, c, s0, s1), (p + 1, b, s0, s2), (p, a, s1, s2)]
    for pos, kind, left, right in plan:
        s = _pad(current, pos, [crossing(kind, left, right)])
        new.append(s)
        current = slice_outputs(s)
    return T.with_slices(T.slices[:index] + tuple(new) + T.slices[index + 3:])


def _matches(g: Generator, kind: str, sign: Optional[int] = None) -> bool:
    return g.kind == kind and (sign is None or g.strands[0].sign == sign)


def _rotate_cut(T: TangleDiagram) -> TangleDiagram:
    first, last, middle = T.slices[0], T.slices[-1], T.slices[1:-1]
    if len(T.slices) < 3 or len(first) != 2 or len(last) != 2:
        raise MoveNotApplicable('rotate_cut needs a closure of a two-strand tangle')

    if _matches(first[0], 'id', 1) and _matches(first[1], 'cupr') \
            and _matches(last[0], 'id', 1) and _matches(last[1], 'capr') \
            and all(s and s[-1] == ident(_minus(first[1].strands[0].name)) for s in middle):
        a, b = first[0].strands[0].name, first[1].strands[0].name
        body = [s[:-1] for s in middle]
        slices = [(cup_or_cap('cupl', a), ident(_plus(b)))]
        slices += [(ident(_minus(a)),) + s for s in body]
        slices += [(cup_or_cap('capl', a), ident(_plus(b)))]
        return T.with_slices(slices)

    if _matches(first[0], 'cupl') and _matches(first[1], 'id', 1) \
            and _matches(last[0], 'capl') and _matches(last[1], 'id', 1) \
            and all(s and s[0] == ident(_minus(first[0].strands[0].name)) for s in middle):
        a, b = first[0].strands[0].name, first[1].strands[0].name
        body = [s[1:] for s in middle]
        slices = [(ident(_plus(a)), cup_or_cap('cupr', b))]
        slices += [s + (ident(_minus(b)),) for s in body]
        slices += [(ident(_plus(a)), cup_or_cap('capr', b))]
        return T.with_slices(slices)

    raise MoveNotApplicable('the tangle is not a left or right closure of a two-strand tangle')


def apply_move(T: TangleDiagram, move: str, index: int = 0, position: int = 0, sign: int = 1) -> TangleDiagram:
    """
    Rewrite T into an isotopic framed tangle.

    R2_insert and framed_R1_insert_pair add slices below slice `index` on the strand(s) at
    `position`; R2_delete and R3_slide act on the slices starting at `index`. rotate_cut
    moves the cut of a closed two-strand tangle from one component to the other.
    """
    if move == 'R2_insert':
        return _r2_insert(T, index, position, sign)
    if move == 'R2_delete':
        return _r2_delete(T, index, position)
    if move == 'R3_slide':
        return _r3_slide(T, index, position)
    if move == 'framed_R1_insert_pair':
        return insert_kink(insert_kink(T, index, position, -sign), index, position, sign)
    if move == 'rotate_cut':
        return _rotate_cut(T)
    raise MoveNotApplicable(f'unknown move {move!r}, expected one of {", ".join(MOVES)}')
