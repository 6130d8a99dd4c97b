# ----------------------------------------------------------------------------
# Copyright (c) 2022, Bokulich Laboratories.
#
# Distributed under the terms of the Modified BSD License.
#
# The full license is in the file LICENSE, distributed with this software.
# ----------------------------------------------------------------------------

import hashlib
from dataclasses import dataclass, field as dc_field
from typing import List, NewType, Tuple

import numpy as np
from sympy import isprime

from grassmeet.utils import (
    BudgetExceeded, InvalidInput, NotASquare, SingularMatrixError,
    set_up_logger
)

LOGGER = set_up_logger('INFO', logger_name=__name__)

FieldElement = NewType('FieldElement', int)

MAX_MODULUS = 2 ** 31
MASK64 = (1 << 64) - 1
GRAM_SCHMIDT_RETRIES = 10_000


@dataclass(frozen=True)
class PrimeField:
    """The prime field F_p.

    Elements are plain ints in [0, p); every method returns canonical
    representatives. `q = (p - 1) / 2` drives the Euler criterion and
    `r = (p + 1) / 4` the square root for p = 3 mod 4.
    """
    p: int

    def __post_init__(self):
        if not isinstance(self.p, (int, np.integer)) or isinstance(
                self.p, bool):
            raise InvalidInput(f'Modulus must be an integer, got {self.p!r}.')
        if not (1 < self.p < MAX_MODULUS) or not isprime(int(self.p)):
            raise InvalidInput(
                f'Modulus {self.p} is not a prime below 2^31.')
        object.__setattr__(self, 'p', int(self.p))

    @property
    def q(self) -> int:
        return (self.p - 1) // 2

    @property
    def r(self) -> int:
        self._require_3mod4()
        return (self.p + 1) // 4

    def __call__(self, x) -> FieldElement:
        return FieldElement(int(x) % self.p)

    def _require_3mod4(self):
        if self.p % 4 != 3:
            raise InvalidInput(
                f'Square roots need p = 3 mod 4; got p = {self.p}.')

    def pow_mod(self, x, e: int) -> FieldElement:
        if e < 0:
            raise ValueError('Exponent must be nonnegative.')
        return FieldElement(pow(int(x) % self.p, e, self.p))

    def inverse(self, x) -> FieldElement:
        x = int(x) % self.p
        if x == 0:
            raise ZeroDivisionError(f'0 has no inverse in F_{self.p}.')
        return FieldElement(pow(x, self.p - 2, self.p))

    def is_square(self, x) -> bool:
        # Euler criterion; 0 is rejected like an isotropic vector
        if self.p == 2:
            return int(x) % 2 == 1
        return self.pow_mod(x, self.q) == 1

    def sqrt_3mod4(self, x) -> FieldElement:
        self._require_3mod4()
        if not self.is_square(x):
            raise NotASquare(f'{int(x) % self.p} is not a nonzero square '
                             f'in F_{self.p}.')
        return self.pow_mod(x, self.r)

    def squares(self) -> set:
        return {(y * y) % self.p for y in range(1, self.p)}


@dataclass(frozen=True, eq=False)
class MatrixFF:
    """Dense matrix over a prime field backed by an int64 array."""
    field: PrimeField
    entries: np.ndarray = dc_field(repr=False)

    def __post_init__(self):
        arr = np.array(self.entries, dtype=object)
        if arr.ndim != 2 or 0 in arr.shape:
            raise InvalidInput('Matrix entries must form a non-empty 2D '
                               'array.')
        arr = (arr % self.field.p).astype(np.int64)
        arr.setflags(write=False)
        object.__setattr__(self, 'entries', arr)

    @classmethod
    def identity(cls, field: PrimeField, n: int) -> 'MatrixFF':
        return cls(field, np.eye(n, dtype=np.int64))

    @classmethod
    def from_rows(cls, field: PrimeField, rows) -> 'MatrixFF':
        return cls(field, [[int(x) for x in row] for row in rows])

    @property
    def rows(self) -> int:
        return self.entries.shape[0]

    @property
    def cols(self) -> int:
        return self.entries.shape[1]

    @property
    def shape(self) -> Tuple[int, int]:
        return self.entries.shape

    @property
    def T(self) -> 'MatrixFF':
        return MatrixFF(self.field, self.entries.T)

    def __getitem__(self, idx) -> int:
        return int(self.entries[idx])

    def __matmul__(self, other: 'MatrixFF') -> 'MatrixFF':
        if self.field != other.field:
            raise InvalidInput('Matrices live over different fields.')
        if self.cols != other.rows:
            raise InvalidInput(
                f'Cannot multiply {self.shape} by {other.shape}.')
        return MatrixFF(self.field,
                        _matmul(self.entries, other.entries, self.field.p))

    def __eq__(self, other) -> bool:
        if not isinstance(other, MatrixFF):
            return NotImplemented
        return self.field == other.field and \
            np.array_equal(self.entries, other.entries)

    def __hash__(self):
        return hash((self.field.p, self.entries.shape,
                     self.entries.tobytes()))

    def tolist(self) -> List[List[int]]:
        return self.entries.tolist()

    def is_identity(self) -> bool:
        return self.rows == self.cols and \
            np.array_equal(self.entries, np.eye(self.rows, dtype=np.int64))

    def is_orthogonal(self) -> bool:
        return self.rows == self.cols and (self.T @ self).is_identity()

    def inverse(self) -> 'MatrixFF':
        return mat_inverse(self)

    def inverse_transpose(self) -> 'MatrixFF':
        return mat_inverse(self).T

    def apply(self, vector) -> np.ndarray:
        """Returns the column vector m·v."""
        col = np.asarray(vector, dtype=np.int64).reshape(-1, 1)
        return _matmul(self.entries, col, self.field.p).ravel()


def _matmul(a: np.ndarray, b: np.ndarray, p: int) -> np.ndarray:
    # accumulate one rank-1 update at a time so that int64 never overflows
    acc = np.zeros((a.shape[0], b.shape[1]), dtype=np.int64)
    for k in range(a.shape[1]):
        acc = (acc + (a[:, k, None] * b[None, k, :]) % p) % p
    return acc


def _dot(u, v, p: int) -> int:
    return sum(int(a) * int(b) for a, b in zip(u, v)) % p


def _row_reduce(arr: np.ndarray, p: int, ncols: int = None):
    """Reduced row echelon form over F_p.

    Pivoting is restricted to the first `ncols` columns, which lets the
    same routine invert an augmented matrix.

    Returns:
        tuple: The reduced array, the pivot columns and the parity of
            the row swaps performed.
    """
    m = arr.copy() % p
    rows, cols = m.shape
    ncols = cols if ncols is None else ncols
    pivots, swaps, row = [], 0, 0
    for col in range(ncols):
        if row >= rows:
            break
        nonzero = np.nonzero(m[row:, col])[0]
        if nonzero.size == 0:
            continue
        pivot = row + int(nonzero[0])
        if pivot != row:
            m[[row, pivot]] = m[[pivot, row]]
            swaps += 1
        inv = pow(int(m[row, col]), p - 2, p)
        m[row] = (m[row] * inv) % p
        factors = m[:, col].copy()
        factors[row] = 0
        m = (m - (factors[:, None] * m[row][None, :]) % p) % p
        pivots.append(col)
        row += 1
    return m, pivots, swaps


def mat_inverse(m: MatrixFF) -> MatrixFF:
    if m.rows != m.cols:
        raise InvalidInput(f'Only square matrices can be inverted, '
                           f'got {m.shape}.')
    n, p = m.rows, m.field.p
    augmented = np.hstack([m.entries, np.eye(n, dtype=np.int64)])
    reduced, pivots, _ = _row_reduce(augmented, p, ncols=n)
    if len(pivots) < n:
        raise SingularMatrixError(
            f'Matrix is singular over F_{p} (rank {len(pivots)} < {n}).')
    return MatrixFF(m.field, reduced[:, n:])


def rank_and_nullspace(m: MatrixFF) -> Tuple[int, List[np.ndarray]]:
    """Rank of `m` and a basis of its right kernel {v : m·v = 0}."""
    p = m.field.p
    reduced, pivots, _ = _row_reduce(m.entries, p)
    free = [c for c in range(m.cols) if c not in pivots]
    basis = []
    for f in free:
        v = np.zeros(m.cols, dtype=np.int64)
        v[f] = 1
        for row, pc in enumerate(pivots):
            v[pc] = (-reduced[row, f]) % p
        basis.append(v)
    return len(pivots), basis


def determinant(m: MatrixFF) -> int:
    if m.rows != m.cols:
        raise InvalidInput('Determinant needs a square matrix.')
    p = m.field.p
    a = m.entries.copy()
    n = m.rows
    det = 1
    for col in range(n):
        nonzero = np.nonzero(a[col:, col])[0]
        if nonzero.size == 0:
            return 0
        pivot = col + int(nonzero[0])
        if pivot != col:
            a[[col, pivot]] = a[[pivot, col]]
            det = -det
        det = (det * int(a[col, col])) % p
        inv = pow(int(a[col, col]), p - 2, p)
        factors = (a[col + 1:, col] * inv) % p
        a[col + 1:] = (a[col + 1:] - (factors[:, None] * a[col]) % p) % p
    return det % p


def parse_matrix_text(text: str, field: PrimeField) -> MatrixFF:
    """Parses the `rows cols` header followed by row-major integers."""
    tokens = text.split()
    if len(tokens) < 2:
        raise InvalidInput('Matrix text is missing the "rows cols" header.')
    try:
        values = [int(t) for t in tokens]
    except ValueError as e:
        raise InvalidInput(f'Matrix text contains a non-integer token: {e}')
    rows, cols = values[0], values[1]
    if rows <= 0 or cols <= 0:
        raise InvalidInput(f'Invalid matrix dimensions {rows}x{cols}.')
    body = values[2:]
    if len(body) != rows * cols:
        raise InvalidInput(
            f'Expected {rows * cols} entries for a {rows}x{cols} matrix, '
            f'found {len(body)}.')
    return MatrixFF(field, np.array(body, dtype=object).reshape(rows, cols))


def format_matrix_text(m: MatrixFF, centered: bool = False) -> str:
    """Canonical text rendering; `centered` prints entries in (-p/2, p/2]."""
    p = m.field.p
    lines = [f'{m.rows} {m.cols}']
    for row in m.entries.tolist():
        if centered:
            row = [x - p if x > p // 2 else x for x in row]
        lines.append(' '.join(str(x) for x in row))
    return '\n'.join(lines) + '\n'


def matrix_sha(m: MatrixFF) -> str:
    payload = f'p={m.field.p}\n' + format_matrix_text(m)
    return hashlib.sha256(payload.encode('utf-8')).hexdigest()


class RandomState:
    """Seeded xorshift64* generator.

    The seed is expanded with one splitmix64 step so that small or zero
    seeds still give a full-period nonzero state. Each draw applies
    `x ^= x >> 12; x ^= x << 25; x ^= x >> 27` and returns
    `x * 0x2545F4914F6CDD1D mod 2^64`. Bounded integers use rejection
    sampling, so a fixed seed yields the same stream on every platform.
    """

    MULTIPLIER = 0x2545F4914F6CDD1D

    def __init__(self, seed: int):
        self.seed = int(seed) & MASK64
        z = (self.seed + 0x9E3779B97F4A7C15) & MASK64
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
        self.state = (z ^ (z >> 31)) or 0x9E3779B97F4A7C15

    def next_u64(self) -> int:
        x = self.state
        x ^= x >> 12
        x ^= (x << 25) & MASK64
        x ^= x >> 27
        self.state = x
        return (x * self.MULTIPLIER) & MASK64

    def randbelow(self, n: int) -> int:
        if n <= 0:
            raise ValueError('Upper bound must be positive.')
        limit = ((1 << 64) // n) * n
        while True:
            x = self.next_u64()
            if x < limit:
                return x % n

    def randint(self, lo: int, hi: int) -> int:
        """Uniform integer in [lo, hi]."""
        return lo + self.randbelow(hi - lo + 1)

    def random_vector(self, field: PrimeField, dim: int) -> np.ndarray:
        return np.array([self.randbelow(field.p) for _ in range(dim)],
                        dtype=np.int64)

    def random_matrix(self, field: PrimeField, rows: int,
                      cols: int) -> MatrixFF:
        return MatrixFF(field, [self.random_vector(field, cols).tolist()
                                for _ in range(rows)])

    def random_invertible(self, field: PrimeField, n: int,
                          max_tries: int = 1000) -> MatrixFF:
        for _ in range(max_tries):
            m = self.random_matrix(field, n, n)
            if determinant(m) != 0:
                return m
        raise BudgetExceeded(
            f'No invertible {n}x{n} matrix over F_{field.p} after '
            f'{max_tries} draws.')


def gram_schmidt_orthogonal(
        field: PrimeField, dim: int, rng: RandomState,
        max_retries: int = GRAM_SCHMIDT_RETRIES) -> MatrixFF:
    """Samples a random orthogonal matrix by Gram–Schmidt over F_p.

    Each candidate v_i is orthogonalized against the earlier vectors with
    proj(v, u) = (vᵀu)/(uᵀu)·u and redrawn while vᵀv is not a nonzero
    square. Every vector is finally scaled by 1/sqrt(vᵀv) and becomes a
    column of the result.

    Args:
        field (PrimeField): Field with p = 3 mod 4.
        dim (int): Size of the matrix.
        rng (RandomState): Source of the candidate vectors.
        max_retries (int): Redraw limit per vector.

    Returns:
        MatrixFF: T with Tᵀ·T = identity.
    """
    field._require_3mod4()
    p = field.p
    basis, norms = [], []
    for i in range(dim):
        for _ in range(max_retries):
            v = rng.random_vector(field, dim)
            for u, uu in zip(basis, norms):
                coef = (_dot(v, u, p) * field.inverse(uu)) % p
                v = (v - (coef * u) % p) % p
            norm = _dot(v, v, p)
            if field.is_square(norm):
                break
        else:
            raise BudgetExceeded(
                f'Gram–Schmidt could not find vector {i + 1} with a square '
                f'norm in {max_retries} draws.')
        basis.append(v)
        norms.append(norm)
    columns = [(v * field.inverse(field.sqrt_3mod4(n))) % p
               for v, n in zip(basis, norms)]
    return MatrixFF(field, np.stack(columns, axis=1))
