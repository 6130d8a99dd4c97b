# ----------------------------------------------------------------------------
# Copyright (c) 2022, Bokulich Laboratories.
#
# Distributed under the terms of the Modified BSD License.
#
# The full license is in the file LICENSE, distributed with this software.
# ----------------------------------------------------------------------------

from collections import Counter
from dataclasses import dataclass
from functools import lru_cache
from itertools import combinations, product
from math import comb
from typing import Sequence, Set, Tuple

import pandas as pd
from sympy import Matrix, Rational, diag, zeros

from grassmeet.ffield import RandomState
from grassmeet.grassmann import PLUECKER_PAIRS
from grassmeet.utils import (
    BudgetExceeded, InternalCheckError, InvalidInput, set_up_logger
)

LOGGER = set_up_logger('INFO', logger_name=__name__)

DIM_V = 5
DIM_W = 10
# dim of the tangent space of the moduli of pairs: 2·dim(g/h) − dim g
DIM_T = 51
CONJUGATOR_ENTRIES = 3


class ImpossibleInvolutionType(ValueError):
    pass


@dataclass(frozen=True)
class InvolutionType:
    """Unordered eigenvalue multiplicities {p, q} of a diagonalizable
    involution, stored with p ≥ q."""
    p: int
    q: int

    def __post_init__(self):
        p, q = sorted((int(self.p), int(self.q)), reverse=True)
        if q < 1:
            raise InvalidInput(f'Involution types need p, q ≥ 1, got '
                               f'{{{self.p},{self.q}}}.')
        if p + q not in (DIM_V, DIM_W):
            raise InvalidInput(f'p + q must be {DIM_V} or {DIM_W}, got '
                               f'{p + q}.')
        object.__setattr__(self, 'p', p)
        object.__setattr__(self, 'q', q)

    @property
    def total(self) -> int:
        return self.p + self.q

    @classmethod
    def parse(cls, text: str) -> 'InvolutionType':
        try:
            p, q = (int(x) for x in text.strip('{} ').split(','))
        except ValueError:
            raise InvalidInput(f'Cannot read an involution type from '
                               f'"{text}"; expected "p,q".')
        return cls(p, q)

    @classmethod
    def of_diagonal(cls, signs: Sequence[int]) -> 'InvolutionType':
        if any(s not in (1, -1) for s in signs):
            raise InvalidInput('Involutions are given by ±1 diagonals.')
        return cls(sum(1 for s in signs if s == 1),
                   sum(1 for s in signs if s == -1))

    def __str__(self):
        return f'{{{self.p},{self.q}}}'


def wedge2_type(t: InvolutionType) -> InvolutionType:
    """Type of ∧²ψ on ∧²V for ψ of type {p, q} on V."""
    if t.total != DIM_V:
        raise InvalidInput('∧² types are defined for p + q = 5.')
    return InvolutionType(comb(t.p, 2) + comb(t.q, 2), t.p * t.q)


def ad_fixed_mult(t: InvolutionType) -> int:
    return t.p ** 2 + t.q ** 2


@dataclass(frozen=True)
class EigenExponents:
    """Eigenvalues ζ^e_i for a primitive m-th root of unity ζ."""
    modulus: int
    exponents: Tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, 'exponents',
                           tuple(int(e) for e in self.exponents))
        if self.modulus < 1:
            raise InvalidInput('The modulus must be positive.')
        if len(self.exponents) != DIM_V:
            raise InvalidInput(f'Expected {DIM_V} exponents.')
        if any(not 0 <= e < self.modulus for e in self.exponents):
            raise InvalidInput(f'Exponents must lie in [0, '
                               f'{self.modulus}).')

    @classmethod
    def involution(cls, t: InvolutionType) -> 'EigenExponents':
        return cls(2, (0,) * t.p + (1,) * t.q)

    def pair_sums(self, shift: int = 0) -> Counter:
        m = self.modulus
        return Counter((a + b + shift) % m
                       for a, b in combinations(self.exponents, 2))


def eigen_multiset_mult1(lam: EigenExponents, mu: EigenExponents) -> int:
    """Multiplicity of eigenvalue 1 of the induced action on the tangent
    space.

    Counts exponent 0 in {0} + {μ_i+μ_j−μ_k−μ_l} − {λ_i−λ_k} − {μ_i−μ_k}.
    The ∧² eigenvalues of both elements must agree up to a common scalar.
    """
    if lam.modulus != mu.modulus:
        raise InvalidInput('Both exponent vectors need the same modulus.')
    m = mu.modulus
    target = mu.pair_sums()
    if not any(lam.pair_sums(shift) == target for shift in range(m)):
        raise InvalidInput('The ∧² eigenvalue multisets of the two '
                           'elements differ.')
    pairs = list(combinations(mu.exponents, 2))
    count = 1
    count += sum(1 for (a, b), (c, d) in product(pairs, pairs)
                 if (a + b - c - d) % m == 0)
    count -= sum(1 for a, c in product(lam.exponents, lam.exponents)
                 if (a - c) % m == 0)
    count -= sum(1 for a, c in product(mu.exponents, mu.exponents)
                 if (a - c) % m == 0)
    return count


@dataclass(frozen=True)
class TraceReport:
    mult1: int
    trace: int
    kind: str
    types: Tuple[InvolutionType, ...]

    def __post_init__(self):
        if self.trace != 2 * self.mult1 - DIM_T:
            raise InvalidInput('trace must equal 2·mult1 − 51.')

    def to_dict(self) -> dict:
        return {'kind': self.kind,
                'types': ' '.join(str(t) for t in self.types),
                'mult1': self.mult1, 'trace': self.trace}


def _report(mult1: int, kind: str, *types) -> TraceReport:
    return TraceReport(mult1, 2 * mult1 - DIM_T, kind, tuple(types))


def trace_type1(a0: InvolutionType, b0: InvolutionType) -> TraceReport:
    """Trace of an involution preserving both Grassmannians.

    mult1 = 1 + mult1(Ad_b on gl(∧²V)) − mult1(Ad_a0) − mult1(Ad_b0),
    where b = ∧²b0.
    """
    if a0.total != DIM_V or b0.total != DIM_V:
        raise InvalidInput('Type-I traces need types with p + q = 5.')
    mult1 = 1 + ad_fixed_mult(wedge2_type(b0)) - ad_fixed_mult(a0) - \
        ad_fixed_mult(b0)
    return _report(mult1, 'I', a0, b0)


def trace_type2(a: InvolutionType) -> TraceReport:
    """Trace of an involution swapping the two Grassmannians."""
    if a.total != DIM_W:
        raise InvalidInput('Type-II traces need a type with p + q = 10.')
    mult1 = 76 - a.p ** 2 - a.q ** 2
    if mult1 < 0:
        raise ImpossibleInvolutionType(
            f'Type {a} would give mult1 = {mult1}; it cannot occur.')
    return _report(mult1, 'II', a)


TYPE1_TYPES = (InvolutionType(4, 1), InvolutionType(3, 2))
TYPE2_TYPES = tuple(InvolutionType(DIM_W - q, q) for q in range(1, 6))


def type1_table() -> pd.DataFrame:
    rows = [trace_type1(a0, b0).to_dict()
            for a0, b0 in product(TYPE1_TYPES, TYPE1_TYPES)]
    return pd.DataFrame(rows)


def type2_table() -> pd.DataFrame:
    rows = []
    for t in TYPE2_TYPES:
        try:
            rows.append(trace_type2(t).to_dict())
        except ImpossibleInvolutionType:
            rows.append({'kind': 'II', 'types': str(t), 'mult1': None,
                         'trace': None})
    return pd.DataFrame(rows)


def allowed_involution_traces() -> Set[int]:
    traces = {DIM_T}
    traces.update(trace_type1(a0, b0).trace
                  for a0, b0 in product(TYPE1_TYPES, TYPE1_TYPES))
    for t in TYPE2_TYPES:
        try:
            traces.add(trace_type2(t).trace)
        except ImpossibleInvolutionType:
            LOGGER.debug('Skipping impossible type %s.', t)
    return traces


def pgl_transpose_trace(dim: int) -> int:
    """Trace of R ↦ −Rᵀ on pgl(dim), computed on the elementary basis."""
    on_gl = 0
    for i, j in product(range(dim), range(dim)):
        # −(E_ij)ᵀ = −E_ji, whose E_ij-coordinate is −δ_ij
        on_gl += -1 if i == j else 0
    on_scalars = -1
    return on_gl - on_scalars


def trace_dtau() -> int:
    """Trace of the derivative of the transpose-inverse involution at a
    fixed point: twice the trace on g/h minus the trace on g."""
    on_g = pgl_transpose_trace(DIM_W)
    on_h = pgl_transpose_trace(DIM_V)
    on_quotient = on_g - on_h
    return 2 * on_quotient - on_g


def _wedge2(m: Matrix) -> Matrix:
    return Matrix(DIM_W, DIM_W, lambda r, c: (
        m[PLUECKER_PAIRS[r][0], PLUECKER_PAIRS[c][0]] *
        m[PLUECKER_PAIRS[r][1], PLUECKER_PAIRS[c][1]] -
        m[PLUECKER_PAIRS[r][0], PLUECKER_PAIRS[c][1]] *
        m[PLUECKER_PAIRS[r][1], PLUECKER_PAIRS[c][0]]))


def _derivative(r: Matrix) -> Matrix:
    """R∧I + I∧R, the derivative of ∧² at the identity."""
    ident = Matrix.eye(DIM_V)

    def entry(row, col):
        (i, j), (k, l) = PLUECKER_PAIRS[row], PLUECKER_PAIRS[col]
        return (r[i, k] * ident[j, l] + ident[i, k] * r[j, l] -
                r[i, l] * ident[j, k] - ident[i, l] * r[j, k])
    return Matrix(DIM_W, DIM_W, entry)


def _vec(m: Matrix) -> Matrix:
    return Matrix(list(m))


@lru_cache(maxsize=None)
def _derivative_basis() -> Tuple[Matrix, ...]:
    basis = []
    for a, b in product(range(DIM_V), range(DIM_V)):
        e = zeros(DIM_V, DIM_V)
        e[a, b] = 1
        basis.append(_derivative(e))
    return tuple(basis)


@lru_cache(maxsize=None)
def _derivative_columns() -> Tuple[Matrix, Matrix]:
    d = Matrix.hstack(*[_vec(m) for m in _derivative_basis()])
    # left inverse of the full-column-rank embedding
    return d, (d.T * d).inv() * d.T


class OraclePresentation:
    """Explicit-matrix model of the tangent space at a pair (H, gH).

    T = (gl(W) ⊕ gl(W)) / (h̃ ⊕ h̃ + Δ) with h̃ the image of gl(V) under
    the ∧² derivative and Δ = {(S, g⁻¹Sg)}. The involution acts by
    (R1, R2) ↦ (aR1a⁻¹, bR2b⁻¹) with b = g⁻¹ag.

    h̃ ⊕ h̃ and Δ meet in a copy of h̃ ∩ gh̃g⁻¹. For a generic pair this is
    the scalars. When a0 and b0 are both of type {4,1}, D(a0) = I + ∧²a0
    is conjugated by every solution g onto D(b0), so the intersection is
    at least 2-dimensional. That excess stabilizer is fixed by the
    involution and is split off the quotient before the trace is read.
    """

    def __init__(self, a0: Sequence[int], b0: Sequence[int],
                 rng: RandomState, max_retries: int = 50):
        self.type_a = InvolutionType.of_diagonal(a0)
        self.type_b = InvolutionType.of_diagonal(b0)
        self.a = _wedge2(diag(*a0))
        wedge_b = _wedge2(diag(*b0))
        diag_a = [self.a[i, i] for i in range(DIM_W)]
        diag_b = [wedge_b[i, i] for i in range(DIM_W)]
        if sorted(diag_a) == sorted(diag_b):
            self.epsilon = 1
        elif sorted(diag_a) == sorted(-x for x in diag_b):
            self.epsilon = -1
        else:
            raise InvalidInput('∧²a0 and ∧²b0 are not conjugate up to '
                               'sign.')
        self.g = self._sample_conjugator(diag_a, diag_b, rng, max_retries)
        self.g_inv = self.g.inv()
        self.b = self.g_inv * self.a * self.g
        if self.b != self.epsilon * wedge_b:
            raise InvalidInput('Conjugator does not satisfy a·g = g·b.')
        self.stabilizer = self._intersection_basis(self.g)
        if len(self.stabilizer) > 1:
            LOGGER.debug('Types %s, %s: the presentation has a %s-dimensional'
                         ' stabilizer.', self.type_a, self.type_b,
                         len(self.stabilizer))

    def _sample_conjugator(self, diag_a, diag_b, rng, max_retries):
        for attempt in range(max_retries):
            g = Matrix(DIM_W, DIM_W, lambda i, j: rng.randint(
                -CONJUGATOR_ENTRIES, CONJUGATOR_ENTRIES)
                if diag_a[i] == self.epsilon * diag_b[j] else 0)
            if g.det() != 0:
                LOGGER.debug('Conjugator found after %s draw(s).',
                             attempt + 1)
                return g
        raise BudgetExceeded(
            f'No invertible conjugator after {max_retries} draws.')

    @staticmethod
    def _intersection_basis(g: Matrix) -> Tuple[Matrix, ...]:
        """A basis of h̃ ∩ g h̃ g⁻¹, as vectorized 10x10 matrices."""
        d, _ = _derivative_columns()
        g_inv = g.inv()
        conj = Matrix.hstack(*[_vec(g * m * g_inv)
                               for m in _derivative_basis()])
        n = len(_derivative_basis())
        # d·x = conj·y; both embeddings are injective, so x determines y
        return tuple(d * v[:n, :] for v in (-d).row_join(conj).nullspace())

    @staticmethod
    def _trace_on_gl(x: Matrix) -> Rational:
        x_inv = x.inv()
        # (x E_ij x⁻¹) has E_ij-coordinate x_ii · (x⁻¹)_jj
        return sum((x[i, i] * x_inv[j, j]
                    for i, j in product(range(DIM_W), range(DIM_W))),
                   Rational(0))

    @staticmethod
    def _trace_on_subspace(x: Matrix, basis: Matrix,
                           left_inverse: Matrix = None) -> Rational:
        if left_inverse is None:
            left_inverse = (basis.T * basis).inv() * basis.T
        x_inv = x.inv()
        images = Matrix.hstack(*[
            _vec(x * Matrix(DIM_W, DIM_W, list(basis[:, k])) * x_inv)
            for k in range(basis.cols)])
        coords = left_inverse * images
        if basis * coords != images:
            raise InternalCheckError('Conjugation does not preserve the '
                                     'subspace.')
        return coords.trace()

    @classmethod
    def _trace_on_derivative_image(cls, x: Matrix) -> Rational:
        return cls._trace_on_subspace(x, *_derivative_columns())

    def stabilizer_trace(self) -> Rational:
        return self._trace_on_subspace(self.a,
                                       Matrix.hstack(*self.stabilizer))

    def quotient_dimension(self) -> int:
        """Dimension of the quotient as presented, excess included."""
        dim_v = 2 * DIM_W ** 2
        dim_u = 2 * len(_derivative_basis()) + DIM_W ** 2 - \
            len(self.stabilizer)
        return dim_v - dim_u

    def quotient_trace(self) -> Rational:
        tr_v = self._trace_on_gl(self.a) + self._trace_on_gl(self.b)
        tr_h = self._trace_on_derivative_image(self.a) + \
            self._trace_on_derivative_image(self.b)
        # Δ ≅ gl(W) through its first component
        tr_delta = self._trace_on_gl(self.a)
        return tr_v - (tr_h + tr_delta - self.stabilizer_trace())

    def dimension(self) -> int:
        return self.quotient_dimension() - (len(self.stabilizer) - 1)

    def trace(self) -> Rational:
        # the scalars act trivially and stay; only the excess is split off
        return self.quotient_trace() - (self.stabilizer_trace() - 1)


def oracle_trace_type1(a0: Sequence[int], b0: Sequence[int],
                       seed: int = 0, max_retries: int = 50) -> Rational:
    """Type-I trace from explicit rational matrices, independent of the
    multiplicity formulas."""
    presentation = OraclePresentation(a0, b0, RandomState(seed), max_retries)
    if presentation.dimension() != DIM_T:
        raise InternalCheckError(
            f'The presentation has dimension {presentation.dimension()}, '
            f'not {DIM_T}.')
    return presentation.trace()
