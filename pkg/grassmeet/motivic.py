# ----------------------------------------------------------------------------
# Copyright (c) 2022, Bokulich Laboratories.
#
# Distributed under the terms of the Modified BSD License.
#
# The full license is in the file LICENSE, distributed with this software.
# ----------------------------------------------------------------------------

from dataclasses import dataclass, field
from typing import Dict, Mapping, NamedTuple, Optional, Sequence, Union

import numpy as np
from sympy import Poly, Symbol, ZZ

from grassmeet.ffield import MatrixFF
from grassmeet.grassmann import (
    ENUMERATION_MAX_Q, PAIR_INDEX, DIM_W, count_hyperplane_section,
    enumerate_rank2_points, incidence_pairs, rank2_points
)
from grassmeet.utils import InternalCheckError, InvalidInput, set_up_logger

LOGGER = set_up_logger('INFO', logger_name=__name__)

L_SYMBOL = Symbol('L')
BASIS = ('1', 'X', 'Y')
# q above which the incidence pairs are not enumerated by default
INCIDENCE_MAX_Q = 2


class LPolynomial:
    """Integer polynomial in the class L of the affine line."""
    __slots__ = ('_poly',)

    def __init__(self, expr=0):
        if isinstance(expr, LPolynomial):
            expr = expr._poly
        self._poly = Poly(expr, L_SYMBOL, domain=ZZ)

    @classmethod
    def from_coefficients(cls, coefficients: Sequence[int]) -> 'LPolynomial':
        """Builds c_0 + c_1 L + c_2 L² + … from ascending coefficients."""
        if not coefficients:
            return cls(0)
        return cls(Poly([int(c) for c in reversed(coefficients)], L_SYMBOL,
                        domain=ZZ))

    @classmethod
    def gen(cls) -> 'LPolynomial':
        return cls(L_SYMBOL)

    @property
    def coefficients(self) -> tuple:
        if self._poly.is_zero:
            return ()
        return tuple(int(c) for c in reversed(self._poly.all_coeffs()))

    @property
    def degree(self) -> int:
        return -1 if self._poly.is_zero else int(self._poly.degree())

    def is_zero(self) -> bool:
        return bool(self._poly.is_zero)

    def evaluate(self, q: int) -> int:
        return int(self._poly.eval(int(q)))

    @staticmethod
    def _coerce(other) -> Optional['LPolynomial']:
        if isinstance(other, LPolynomial):
            return other
        if isinstance(other, (int, np.integer)):
            return LPolynomial(int(other))
        return None

    def __add__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return LPolynomial(self._poly + other._poly)

    __radd__ = __add__

    def __sub__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return LPolynomial(self._poly - other._poly)

    def __rsub__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return LPolynomial(other._poly - self._poly)

    def __neg__(self):
        return LPolynomial(-self._poly)

    def __mul__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return LPolynomial(self._poly * other._poly)

    __rmul__ = __mul__

    def __pow__(self, n: int):
        if n < 0:
            raise InvalidInput('Only non-negative powers of L-classes.')
        return LPolynomial(self._poly ** n)

    def __eq__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return self.coefficients == other.coefficients

    def __hash__(self):
        return hash(self.coefficients)

    def __str__(self):
        terms = []
        for power, coef in enumerate(self.coefficients):
            if coef == 0:
                continue
            if power == 0:
                mono = str(abs(coef))
            else:
                mono = 'L' if power == 1 else f'L^{power}'
                if abs(coef) != 1:
                    mono = f'{abs(coef)}*{mono}'
            sign = '-' if coef < 0 else '+'
            terms.append((sign, mono))
        if not terms:
            return '0'
        head_sign, head = terms[0]
        out = ('-' if head_sign == '-' else '') + head
        return out + ''.join(f' {s} {m}' for s, m in terms[1:])

    def __repr__(self):
        return f'LPolynomial({self})'


Scalar = Union[LPolynomial, int]


class MotivicClass:
    """A Z[L]-linear combination of the formal classes 1, [X] and [Y].

    Classes with a nonzero [X] or [Y] part cannot be multiplied with each
    other.
    """
    __slots__ = ('_coefficients',)

    def __init__(self, coefficients: Mapping[str, Scalar] = None):
        coefficients = coefficients or {}
        unknown = set(coefficients) - set(BASIS)
        if unknown:
            raise InvalidInput(f'Unknown basis classes: {sorted(unknown)}.')
        self._coefficients: Dict[str, LPolynomial] = {}
        for name in BASIS:
            coef = LPolynomial(coefficients.get(name, 0))
            if not coef.is_zero():
                self._coefficients[name] = coef

    @classmethod
    def basis(cls, name: str) -> 'MotivicClass':
        return cls({name: 1})

    @classmethod
    def constant(cls, value: Scalar) -> 'MotivicClass':
        return cls({'1': value})

    def coefficient(self, name: str) -> LPolynomial:
        if name not in BASIS:
            raise InvalidInput(f'Unknown basis class "{name}".')
        return self._coefficients.get(name, LPolynomial(0))

    @property
    def is_constant(self) -> bool:
        return set(self._coefficients) <= {'1'}

    def is_zero(self) -> bool:
        return not self._coefficients

    @staticmethod
    def _coerce(other) -> Optional['MotivicClass']:
        if isinstance(other, MotivicClass):
            return other
        if isinstance(other, (LPolynomial, int, np.integer)):
            return MotivicClass.constant(LPolynomial._coerce(other))
        return None

    def __add__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return MotivicClass({n: self.coefficient(n) + other.coefficient(n)
                             for n in BASIS})

    __radd__ = __add__

    def __neg__(self):
        return MotivicClass({n: -c for n, c in self._coefficients.items()})

    def __sub__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return other + (-self)

    def _scale(self, factor: LPolynomial) -> 'MotivicClass':
        return MotivicClass({n: c * factor
                             for n, c in self._coefficients.items()})

    def __mul__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        if other.is_constant:
            return self._scale(other.coefficient('1'))
        if self.is_constant:
            return other._scale(self.coefficient('1'))
        raise TypeError('Products of the classes [X] and [Y] are not '
                        'representable.')

    __rmul__ = __mul__

    def substitute(self, **images: Union['MotivicClass', Scalar]
                   ) -> 'MotivicClass':
        """Replaces basis classes, e.g. `substitute(Y=MotivicClass.basis('X'))`."""
        out = MotivicClass()
        for name, coef in self._coefficients.items():
            image = self._coerce(images.get(name, MotivicClass.basis(name)))
            out = out + image * coef
        return out

    def evaluate(self, q: int, n_x: int = None, n_y: int = None) -> int:
        values = {'1': 1, 'X': n_x, 'Y': n_y}
        total = 0
        for name, coef in self._coefficients.items():
            if values[name] is None:
                raise InvalidInput(f'A point count for [{name}] is needed.')
            total += coef.evaluate(q) * values[name]
        return total

    def __eq__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return all(self.coefficient(n) == other.coefficient(n)
                   for n in BASIS)

    def __hash__(self):
        return hash(tuple(self.coefficient(n) for n in BASIS))

    def __str__(self):
        parts = []
        for name in BASIS:
            if name not in self._coefficients:
                continue
            coef = str(self._coefficients[name])
            parts.append(coef if name == '1' else f'[{name}]·({coef})')
        return ' + '.join(parts) if parts else '0'

    def __repr__(self):
        return f'MotivicClass({self})'


def class_pn(n: int) -> LPolynomial:
    if n < 0:
        raise InvalidInput('Projective spaces need n ≥ 0.')
    return LPolynomial.from_coefficients([1] * (n + 1))


def class_grassmannian_25() -> LPolynomial:
    """(1+L+L²+L³+L⁴)(1+L²), the Gaussian binomial [5 choose 2]_L."""
    return class_pn(4) * LPolynomial.from_coefficients([1, 0, 1])


def class_section(rank: int) -> LPolynomial:
    """Class of a hyperplane section of Gr(2,5) by a form of given rank."""
    if rank == 2:
        return LPolynomial.from_coefficients([1, 1, 1]) * \
            LPolynomial.from_coefficients([1, 0, 1, 1])
    if rank == 4:
        return LPolynomial.from_coefficients([1, 0, 1]) * class_pn(3)
    raise InvalidInput(f'Sections are defined for forms of rank 2 or 4, '
                       f'not {rank}.')


def section_class_by_strata(rank: int) -> LPolynomial:
    """The section class rebuilt from its stratification.

    Rank 2: planes meeting ker(ω) in a line over P², plus the P² of planes
    inside ker(ω). Rank 4: planes through the kernel line, plus the
    remaining isotropic planes fibred over P³.
    """
    if rank == 2:
        return class_pn(2) + class_pn(2) * (class_pn(3) - class_pn(1))
    if rank == 4:
        return class_pn(3) + class_pn(3) * (class_pn(2) - class_pn(1))
    raise InvalidInput(f'Sections are defined for forms of rank 2 or 4, '
                       f'not {rank}.')


def _canonical_form(rank: int) -> np.ndarray:
    y = np.zeros(DIM_W, dtype=np.int64)
    y[PAIR_INDEX[(0, 1)]] = 1
    if rank == 4:
        y[PAIR_INDEX[(2, 3)]] = 1
    elif rank != 2:
        raise InvalidInput(f'Sections are defined for forms of rank 2 or 4, '
                           f'not {rank}.')
    return y


def count_section(q: int, rank: int,
                  max_q: int = ENUMERATION_MAX_Q) -> int:
    """#{x ∈ Gr(2,5)(F_q) : ω(x) = 0} for e₀∧e₁ (rank 2) or
    e₀∧e₁ + e₂∧e₃ (rank 4)."""
    return count_hyperplane_section(q, _canonical_form(rank), max_q=max_q)


class IncidenceIdentity(NamedTuple):
    via_p1: MotivicClass
    via_p2: MotivicClass
    factor: LPolynomial

    @property
    def difference(self) -> MotivicClass:
        return self.via_p1 - self.via_p2


def incidence_identity() -> IncidenceIdentity:
    """Computes [Q(Gr₁, Gr₂∨)] through both projections.

    Over Gr₁ the fibre is a rank-2 section exactly above X and a rank-4
    section elsewhere; over Gr₂∨ the same holds with Y. The returned
    factor f satisfies via_p1 − via_p2 = ([X] − [Y])·f.
    """
    s2, s4 = class_section(2), class_section(4)
    factor = LPolynomial.gen() ** 4
    if s2 - s4 != factor:
        raise InternalCheckError(f'S₂ − S₄ = {s2 - s4}, expected L^4.')
    gr = MotivicClass.constant(class_grassmannian_25())
    expansions = []
    for name in ('X', 'Y'):
        locus = MotivicClass.basis(name)
        fibred = locus * s2 + (gr - locus) * s4
        if fibred != locus * factor + gr * s4:
            raise InternalCheckError(
                f'Fibration over the {name} side does not simplify.')
        expansions.append(fibred)
    identity = IncidenceIdentity(expansions[0], expansions[1], factor)
    expected = (MotivicClass.basis('X') - MotivicClass.basis('Y')) * factor
    if identity.difference != expected:
        raise InternalCheckError('The two expansions differ by more than '
                                 '([X] − [Y])·L^4.')
    return identity


def identity_derivation() -> Sequence[str]:
    """Human-readable steps of the incidence computation."""
    ident = incidence_identity()
    s2, s4 = class_section(2), class_section(4)
    return [
        f'[Gr(2,5)] = {class_grassmannian_25()}',
        f'S2 = {s2}',
        f'S4 = {s4}',
        f'S2 - S4 = {s2 - s4}',
        f'[Q] via p1 = {ident.via_p1}',
        f'[Q] via p2 = {ident.via_p2}',
        f'difference = {ident.difference}',
        f'hence ([X] - [Y])·({ident.factor}) = 0',
    ]


@dataclass
class PointCountReport:
    q: int
    n_x: int
    n_y: int
    n_gr: int
    n_q: Optional[int] = None
    checks: Dict[str, bool] = field(default_factory=dict)

    @property
    def verdict(self) -> bool:
        return all(self.checks.values())

    def to_dict(self) -> dict:
        return {'q': self.q, 'n_X': self.n_x, 'n_Y': self.n_y,
                'n_Gr': self.n_gr, 'n_Q': self.n_q,
                'checks': dict(self.checks),
                'verdict': 'PASS' if self.verdict else 'FAIL'}


def count_and_compare(q: int, g: MatrixFF, incidence: bool = None,
                      n_jobs: int = 1, max_q: int = ENUMERATION_MAX_Q,
                      log_level: str = 'INFO') -> PointCountReport:
    """Point counts of X_{1,g}, its double mirror and the incidence variety
    over F_q, checked against the fibration formulas."""
    LOGGER.setLevel(log_level.upper())
    if incidence is None:
        incidence = q <= INCIDENCE_MAX_Q

    n_x = enumerate_rank2_points(q, g, 'X', n_jobs=n_jobs, max_q=max_q)
    n_y = enumerate_rank2_points(q, g, 'Y', n_jobs=n_jobs, max_q=max_q)
    n_gr = int(rank2_points(q, max_q=max_q).shape[0])
    LOGGER.info('Counted n_X=%s, n_Y=%s, n_Gr=%s over F_%s.',
                n_x, n_y, n_gr, q)

    report = PointCountReport(q, n_x, n_y, n_gr)
    report.checks['n_Gr = [Gr(2,5)](q)'] = \
        n_gr == class_grassmannian_25().evaluate(q)
    report.checks['n_X = n_Y'] = n_x == n_y

    if incidence:
        report.n_q = incidence_pairs(q, g, max_q=max_q)
        ident = incidence_identity()
        report.checks['n_Q = p1 fibration count'] = \
            report.n_q == ident.via_p1.evaluate(q, n_x=n_x)
        report.checks['n_Q = p2 fibration count'] = \
            report.n_q == ident.via_p2.evaluate(q, n_y=n_y)
    else:
        LOGGER.debug('Skipping incidence enumeration at q=%s.', q)

    if not report.verdict:
        LOGGER.warning('Point-count checks failed: %s', report.checks)
    return report
