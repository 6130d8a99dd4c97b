# ----------------------------------------------------------------------------
# Copyright (c) 2022, Bokulich Laboratories.
#
# Distributed under the terms of the Modified BSD License.
#
# The full license is in the file LICENSE, distributed with this software.
# ----------------------------------------------------------------------------

from enum import Enum
from itertools import combinations
from types import MappingProxyType
from typing import Dict, List, Sequence, Tuple, Union

from sympy.polys.monomials import monomial_div, monomial_mul
from sympy.polys.orderings import grevlex, lex

from grassmeet.ffield import PrimeField
from grassmeet.utils import DegreeOverflowError, InvalidInput

Monomial = Tuple[int, ...]

MAX_EXPONENT = 255


class MonomialOrder(Enum):
    DEGREVLEX = 'degrevlex'
    LEX = 'lex'

    @property
    def sympy_order(self):
        return grevlex if self is MonomialOrder.DEGREVLEX else lex

    def key(self, monom: Monomial):
        return self.sympy_order(monom)

    def heap_key(self, monom: Monomial) -> tuple:
        """Flat key whose ascending order is the descending monomial order."""
        if self is MonomialOrder.DEGREVLEX:
            # grevlex key is (deg, (-m_n, ..., -m_1))
            return (-sum(monom),) + tuple(reversed(monom))
        return tuple(-e for e in monom)

    @classmethod
    def parse(cls, value: Union[str, 'MonomialOrder']) -> 'MonomialOrder':
        if isinstance(value, cls):
            return value
        try:
            return cls(str(value).lower())
        except ValueError:
            raise InvalidInput(f'Unknown monomial order "{value}"; use '
                               f'degrevlex or lex.')


class PolyRing:
    """Polynomial ring F_p[x_1, ..., x_n] with named variables."""

    def __init__(self, field: PrimeField, names: Sequence[str],
                 order: MonomialOrder = MonomialOrder.DEGREVLEX):
        names = tuple(names)
        if not names:
            raise InvalidInput('A polynomial ring needs at least one '
                               'variable.')
        if len(set(names)) != len(names):
            raise InvalidInput(f'Variable names must be distinct: {names}.')
        self.field = field
        self.names = names
        self.order = MonomialOrder.parse(order)
        self._index = {name: i for i, name in enumerate(names)}

    @property
    def nvars(self) -> int:
        return len(self.names)

    @property
    def p(self) -> int:
        return self.field.p

    def __eq__(self, other):
        if not isinstance(other, PolyRing):
            return NotImplemented
        return (self.field, self.names, self.order) == \
            (other.field, other.names, other.order)

    def __hash__(self):
        return hash((self.field.p, self.names, self.order))

    def __repr__(self):
        return f'PolyRing(F_{self.p}[{", ".join(self.names)}])'

    def index(self, name: str) -> int:
        try:
            return self._index[name]
        except KeyError:
            raise InvalidInput(f'Unknown variable "{name}" in {self!r}.')

    def zero_monomial(self) -> Monomial:
        return (0,) * self.nvars

    def zero(self) -> 'Polynomial':
        return Polynomial(self, {})

    def one(self) -> 'Polynomial':
        return self.constant(1)

    def constant(self, c: int) -> 'Polynomial':
        return Polynomial(self, {self.zero_monomial(): c})

    def variable(self, which: Union[int, str]) -> 'Polynomial':
        i = self.index(which) if isinstance(which, str) else which
        exps = [0] * self.nvars
        exps[i] = 1
        return Polynomial(self, {tuple(exps): 1})

    def gens(self) -> List['Polynomial']:
        return [self.variable(i) for i in range(self.nvars)]

    def __call__(self, name: str) -> 'Polynomial':
        return self.variable(name)

    def with_order(self, order: MonomialOrder) -> 'PolyRing':
        return PolyRing(self.field, self.names, order)


def _check_exponents(terms: Dict[Monomial, int]):
    for m in terms:
        if m and max(m) > MAX_EXPONENT:
            raise DegreeOverflowError(
                f'Exponent above {MAX_EXPONENT} in monomial {m}.')


class Polynomial:
    """Immutable sparse polynomial: a map monomial -> nonzero coefficient."""

    __slots__ = ('ring', '_terms', '_lead')

    def __init__(self, ring: PolyRing, terms: Dict[Monomial, int] = None):
        p = ring.p
        clean = {}
        for m, c in (terms or {}).items():
            m = tuple(int(e) for e in m)
            if len(m) != ring.nvars or min(m, default=0) < 0:
                raise InvalidInput(
                    f'Monomial {m} does not fit {ring!r}.')
            c = (clean.get(m, 0) + int(c)) % p
            if c:
                clean[m] = c
            else:
                clean.pop(m, None)
        _check_exponents(clean)
        self.ring = ring
        self._terms = clean
        self._lead = {}

    @classmethod
    def _raw(cls, ring: PolyRing, terms: Dict[Monomial, int]):
        # terms must already be reduced and free of zero coefficients
        poly = cls.__new__(cls)
        poly.ring = ring
        poly._terms = terms
        poly._lead = {}
        return poly

    @property
    def terms(self):
        """Read-only terms, largest monomial first in the ring's order."""
        return MappingProxyType(dict(self.sorted_terms()))

    def __len__(self):
        return len(self._terms)

    def __bool__(self):
        return bool(self._terms)

    def is_zero(self) -> bool:
        return not self._terms

    def is_constant(self) -> bool:
        return all(not any(m) for m in self._terms)

    def constant_coefficient(self) -> int:
        return self._terms.get(self.ring.zero_monomial(), 0)

    def degree(self) -> int:
        """Total degree; -1 for the zero polynomial."""
        return max((sum(m) for m in self._terms), default=-1)

    def leading_monomial(self, order: MonomialOrder = None) -> Monomial:
        order = order or self.ring.order
        if not self._terms:
            raise ValueError('The zero polynomial has no leading monomial.')
        lead = self._lead.get(order)
        if lead is None:
            lead = max(self._terms, key=order.sympy_order)
            self._lead[order] = lead
        return lead

    def leading_coefficient(self, order: MonomialOrder = None) -> int:
        return self._terms[self.leading_monomial(order)]

    def sorted_terms(self, order: MonomialOrder = None):
        order = order or self.ring.order
        return sorted(self._terms.items(),
                      key=lambda t: order.sympy_order(t[0]), reverse=True)

    def monic(self, order: MonomialOrder = None) -> 'Polynomial':
        if not self._terms:
            return self
        inv = self.ring.field.inverse(self.leading_coefficient(order))
        return self.scale(inv)

    def _coerce(self, other) -> 'Polynomial':
        if isinstance(other, Polynomial):
            if other.ring != self.ring:
                raise InvalidInput(
                    f'Ring mismatch: {self.ring!r} vs {other.ring!r}.')
            return other
        if isinstance(other, int):
            return self.ring.constant(other)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        p = self.ring.p
        terms = dict(self._terms)
        for m, c in other._terms.items():
            s = (terms.get(m, 0) + c) % p
            if s:
                terms[m] = s
            else:
                terms.pop(m, None)
        return Polynomial._raw(self.ring, terms)

    __radd__ = __add__

    def __neg__(self):
        p = self.ring.p
        return Polynomial._raw(
            self.ring, {m: p - c for m, c in self._terms.items()})

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def scale(self, c: int) -> 'Polynomial':
        p = self.ring.p
        c = int(c) % p
        if c == 0:
            return self.ring.zero()
        return Polynomial._raw(
            self.ring, {m: (v * c) % p for m, v in self._terms.items()})

    def mul_term(self, monom: Monomial, coeff: int) -> 'Polynomial':
        p = self.ring.p
        coeff %= p
        if coeff == 0:
            return self.ring.zero()
        terms = {monomial_mul(m, monom): (c * coeff) % p
                 for m, c in self._terms.items()}
        _check_exponents(terms)
        return Polynomial._raw(self.ring, terms)

    def __mul__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        if len(other) == 1 and len(self) > 1:
            (m, c), = other._terms.items()
            return self.mul_term(m, c)
        p = self.ring.p
        terms = {}
        for m1, c1 in self._terms.items():
            for m2, c2 in other._terms.items():
                m = monomial_mul(m1, m2)
                s = (terms.get(m, 0) + c1 * c2) % p
                if s:
                    terms[m] = s
                else:
                    terms.pop(m, None)
        _check_exponents(terms)
        return Polynomial._raw(self.ring, terms)

    __rmul__ = __mul__

    def __pow__(self, e: int):
        if e < 0:
            raise ValueError('Negative powers are not polynomials.')
        result, base = self.ring.one(), self
        while e:
            if e & 1:
                result = result * base
            e >>= 1
            if e:
                base = base * base
        return result

    def __eq__(self, other):
        if isinstance(other, int):
            other = self.ring.constant(other)
        if not isinstance(other, Polynomial):
            return NotImplemented
        return self.ring == other.ring and self._terms == other._terms

    def __hash__(self):
        return hash((self.ring, frozenset(self._terms.items())))

    def diff(self, i: int) -> 'Polynomial':
        p = self.ring.p
        terms = {}
        for m, c in self._terms.items():
            if m[i] == 0:
                continue
            c = (c * m[i]) % p
            if c:
                d = list(m)
                d[i] -= 1
                terms[tuple(d)] = c
        return Polynomial._raw(self.ring, terms)

    def evaluate(self, point: Sequence[int]) -> int:
        p = self.ring.p
        if len(point) != self.ring.nvars:
            raise InvalidInput('Point has the wrong number of coordinates.')
        point = [int(x) % p for x in point]
        total = 0
        for m, c in self._terms.items():
            v = c
            for x, e in zip(point, m):
                if e:
                    v = (v * pow(x, e, p)) % p
            total += v
        return total % p

    def substitute(self, images: Sequence['Polynomial']) -> 'Polynomial':
        return substitute(self, images)

    def divides_leading(self, other: 'Polynomial',
                        order: MonomialOrder = None) -> bool:
        return monomial_div(other.leading_monomial(order),
                            self.leading_monomial(order)) is not None

    def __repr__(self):
        return self.format()

    def format(self, order: MonomialOrder = None) -> str:
        if not self._terms:
            return '0'
        parts = []
        for m, c in self.sorted_terms(order):
            factors = [name if e == 1 else f'{name}^{e}'
                       for name, e in zip(self.ring.names, m) if e]
            if not factors:
                parts.append(str(c))
            elif c == 1:
                parts.append('*'.join(factors))
            else:
                parts.append('*'.join([str(c)] + factors))
        return ' + '.join(parts)


def poly_arith(a: Polynomial, b: Union[Polynomial, int],
               op: str) -> Polynomial:
    """Applies `op` (add, sub, mul or scale) to two polynomials.

    For `scale`, `b` is a field element rather than a polynomial.
    """
    if op == 'scale':
        return a.scale(b)
    if not isinstance(b, Polynomial) or a.ring != b.ring:
        raise InvalidInput('Both operands must live in the same ring.')
    if op == 'add':
        return a + b
    if op == 'sub':
        return a - b
    if op == 'mul':
        return a * b
    raise InvalidInput(f'Unknown polynomial operation "{op}".')


def substitute(f: Polynomial, images: Sequence[Polynomial]) -> Polynomial:
    """Applies the ring homomorphism x_i -> images[i] to `f`.

    Args:
        f (Polynomial): Polynomial in the source ring.
        images (Sequence[Polynomial]): One image per source variable, all
            in one target ring.

    Returns:
        Polynomial: The image of `f` in the target ring.
    """
    if len(images) != f.ring.nvars:
        raise InvalidInput(
            f'Expected {f.ring.nvars} images, got {len(images)}.')
    target = images[0].ring
    if any(img.ring != target for img in images):
        raise InvalidInput('All images must live in the same target ring.')
    if target.field != f.ring.field:
        raise InvalidInput('Source and target rings differ in the field.')

    powers = {}

    def power(i, e):
        if (i, e) not in powers:
            powers[(i, e)] = images[i] if e == 1 else \
                power(i, e - 1) * images[i]
        return powers[(i, e)]

    result = target.zero()
    for m, c in f.terms.items():
        term = target.constant(c)
        for i, e in enumerate(m):
            if e:
                term = term * power(i, e)
        result = result + term
    return result


def jacobian(gens: Sequence[Polynomial]) -> List[List[Polynomial]]:
    """Jacobian in the nvars x ngens layout: entry (i, j) = d gens[j]/dx_i."""
    if not gens:
        raise InvalidInput('Jacobian needs at least one polynomial.')
    ring = gens[0].ring
    if any(g.ring != ring for g in gens):
        raise InvalidInput('All generators must live in the same ring.')
    return [[g.diff(i) for g in gens] for i in range(ring.nvars)]


def minors(m: Sequence[Sequence[Polynomial]], k: int) -> List[Polynomial]:
    """All k x k minors, rows-major over index combinations.

    Sub-determinants are memoized by their (row set, column set) so
    overlapping minors share work.
    """
    rows = len(m)
    cols = len(m[0]) if rows else 0
    if not 1 <= k <= min(rows, cols):
        raise InvalidInput(
            f'Minor size {k} out of range for a {rows}x{cols} matrix.')
    memo = {}

    def det(rset, cset):
        if len(rset) == 1:
            return m[rset[0]][cset[0]]
        key = (rset, cset)
        if key not in memo:
            total = None
            for j, c in enumerate(cset):
                entry = m[rset[0]][c]
                if entry.is_zero():
                    continue
                sub = det(rset[1:], cset[:j] + cset[j + 1:])
                term = entry * sub
                if j % 2:
                    term = -term
                total = term if total is None else total + term
            memo[key] = total if total is not None else \
                m[rset[0]][cset[0]].ring.zero()
        return memo[key]

    return [det(r, c) for r in combinations(range(rows), k)
            for c in combinations(range(cols), k)]


class SkewMatrixSymbolic:
    """Skew-symmetric n x n matrix given by its strictly upper entries."""

    def __init__(self, ring: PolyRing, n: int,
                 upper: Dict[Tuple[int, int], Polynomial]):
        for (i, j), v in upper.items():
            if not 0 <= i < j < n:
                raise InvalidInput(f'Entry ({i}, {j}) is not strictly upper '
                                   f'triangular in a {n}x{n} matrix.')
            if v.ring != ring:
                raise InvalidInput('Entries must live in the matrix ring.')
        self.ring = ring
        self.n = n
        self._upper = dict(upper)
        self._pf_cache = {}

    @classmethod
    def generic(cls, ring: PolyRing, n: int = 5,
                prefix: str = 'x') -> 'SkewMatrixSymbolic':
        upper = {(i, j): ring.variable(f'{prefix}{i}{j}')
                 for i, j in combinations(range(n), 2)}
        return cls(ring, n, upper)

    @classmethod
    def from_numeric(cls, ring: PolyRing, values) -> 'SkewMatrixSymbolic':
        n = len(values)
        upper = {(i, j): ring.constant(int(values[i][j]))
                 for i, j in combinations(range(n), 2)}
        return cls(ring, n, upper)

    def entry(self, i: int, j: int) -> Polynomial:
        if i == j:
            return self.ring.zero()
        if i > j:
            return -self.entry(j, i)
        return self._upper.get((i, j), self.ring.zero())

    def pfaffian(self, indices: Sequence[int]) -> Polynomial:
        return pfaffian(self, indices)


def pfaffian(m: SkewMatrixSymbolic, indices: Sequence[int]) -> Polynomial:
    """Pfaffian of the principal submatrix on `indices`.

    Expands along the first index:
    Pf = sum_j (-1)^(j+1) m[i0, ij] Pf(indices without i0, ij), with j
    counted from the position right after i0.
    """
    indices = tuple(sorted(indices))
    if len(indices) % 2:
        raise InvalidInput(f'Pfaffians need an even index set, got '
                           f'{indices}.')
    if any(not 0 <= i < m.n for i in indices) or \
            len(set(indices)) != len(indices):
        raise InvalidInput(f'Invalid index set {indices} for size {m.n}.')
    if not indices:
        return m.ring.one()
    if indices in m._pf_cache:
        return m._pf_cache[indices]
    i0, rest = indices[0], indices[1:]
    total = m.ring.zero()
    for j, ij in enumerate(rest):
        entry = m.entry(i0, ij)
        if entry.is_zero():
            continue
        term = entry * pfaffian(m, rest[:j] + rest[j + 1:])
        total = total - term if j % 2 else total + term
    m._pf_cache[indices] = total
    return total
