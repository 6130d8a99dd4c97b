# ----------------------------------------------------------------------------
# Copyright (c) 2022, Bokulich Laboratories.
#
# Distributed under the terms of the Modified BSD License.
#
# The full license is in the file LICENSE, distributed with this software.
# ----------------------------------------------------------------------------

import warnings
from dataclasses import dataclass, field as dc_field
from functools import lru_cache
from itertools import combinations
from multiprocessing import Pool
from typing import Dict, Iterator, List, Optional, Sequence, Tuple

import numpy as np
import pandas as pd
from tqdm import tqdm

from grassmeet.ffield import (
    MatrixFF, PrimeField, RandomState, _row_reduce, determinant,
    gram_schmidt_orthogonal, matrix_sha, rank_and_nullspace
)
from grassmeet.groebner import (
    GroebnerStats, MonomialOrder, ResourceBudget, groebner_basis
)
from grassmeet.multipoly import (
    PolyRing, Polynomial, SkewMatrixSymbolic, jacobian, minors, substitute
)
from grassmeet.utils import (
    BudgetExceeded, ChartInvariantError, EnumerationBudgetExceeded,
    InvalidInput, SearchExhausted, SingularMatrixError, _worker_count,
    set_up_logger
)

LOGGER = set_up_logger('INFO', logger_name=__name__)

DIM_V = 5
PLUECKER_PAIRS: Tuple[Tuple[int, int], ...] = tuple(
    combinations(range(DIM_V), 2))
PLUECKER_NAMES: Tuple[str, ...] = tuple(
    f'x{i}{j}' for i, j in PLUECKER_PAIRS)
PAIR_INDEX: Dict[Tuple[int, int], int] = {
    pair: k for k, pair in enumerate(PLUECKER_PAIRS)}
DIM_W = len(PLUECKER_PAIRS)

ENUMERATION_MAX_Q = 7
ENUMERATION_CHUNK = 200_000

# the 4-subsets of {0..4} indexed by the omitted element
PFAFFIAN_QUADS = tuple(
    tuple(k for k in range(DIM_V) if k != omit) for omit in range(DIM_V))


def pluecker_ring(field: PrimeField,
                  order: MonomialOrder = MonomialOrder.DEGREVLEX
                  ) -> PolyRing:
    return PolyRing(field, PLUECKER_NAMES, order)


def pair_name(pair: Tuple[int, int]) -> str:
    return f'x{pair[0]}{pair[1]}'


def pfaffian_ideal(ring: PolyRing) -> List[Polynomial]:
    """The 5 Plücker quadrics, one per omitted index m = 0..4."""
    if ring.names != PLUECKER_NAMES:
        raise InvalidInput(f'Expected the Plücker ring, got {ring!r}.')
    m = SkewMatrixSymbolic.generic(ring, DIM_V)
    return [m.pfaffian(quad) for quad in PFAFFIAN_QUADS]


@dataclass(frozen=True, eq=False)
class PatchChart:
    """The affine chart x_ij = 1 of Gr(2,5).

    `images` holds, for every Plücker coordinate, its value on the chart
    as a polynomial in the 6 free coordinates.
    """
    pivot: Tuple[int, int]
    source: PolyRing
    target: PolyRing
    free: Tuple[Tuple[int, int], ...]
    dependent: Dict[Tuple[int, int], Polynomial]
    images: Tuple[Polynomial, ...]

    def pullback(self, polys: Sequence[Polynomial]) -> List[Polynomial]:
        return [substitute(f, self.images) for f in polys]

    def point(self, free_values: Sequence[int]) -> np.ndarray:
        return np.array([img.evaluate(free_values) for img in self.images],
                        dtype=np.int64)


@lru_cache(maxsize=None)
def patch_parametrization(ring: PolyRing,
                          pivot: Tuple[int, int]) -> PatchChart:
    i, j = pivot
    if not 0 <= i < j < DIM_V:
        raise InvalidInput(f'Invalid chart pivot {pivot}.')
    free = tuple(pair for pair in PLUECKER_PAIRS
                 if len(set(pair) & {i, j}) == 1)
    target = PolyRing(ring.field, [pair_name(pair) for pair in free],
                      ring.order)
    images = [target.zero() for _ in PLUECKER_PAIRS]
    images[PAIR_INDEX[pivot]] = target.one()
    for pair in free:
        images[PAIR_INDEX[pair]] = target.variable(pair_name(pair))

    generic = SkewMatrixSymbolic.generic(ring, DIM_V)
    dependent = {}
    for pair in PLUECKER_PAIRS:
        if set(pair) & {i, j}:
            continue
        relation = generic.pfaffian(tuple(sorted({i, j, *pair})))
        exps = [0] * DIM_W
        exps[PAIR_INDEX[pivot]] = 1
        exps[PAIR_INDEX[pair]] = 1
        coef = relation.terms.get(tuple(exps))
        if not coef:
            raise ChartInvariantError(
                f'x{i}{j}*{pair_name(pair)} is missing from its Pfaffian.')
        rest = relation - ring.variable(PAIR_INDEX[pivot]) * \
            ring.variable(PAIR_INDEX[pair]).scale(coef)
        solved = substitute(rest, images).scale(
            -ring.field.inverse(coef))
        dependent[pair] = solved
    for pair, expr in dependent.items():
        images[PAIR_INDEX[pair]] = expr

    for f in pfaffian_ideal(ring):
        if not substitute(f, images).is_zero():
            raise ChartInvariantError(
                f'Chart x{i}{j} = 1 does not satisfy the Plücker relation '
                f'{f}.')
    return PatchChart(pivot, ring, target, free, dependent, tuple(images))


@dataclass(frozen=True, eq=False)
class GPK3Instance:
    """The intersection X = g1·Gr ∩ g2·Gr inside P⁹."""
    field: PrimeField
    g1: MatrixFF
    g2: MatrixFF
    label: str = ''

    def __post_init__(self):
        for name in ('g1', 'g2'):
            g = getattr(self, name)
            if g.field != self.field:
                raise InvalidInput(f'{name} lives over another field.')
            if g.shape != (DIM_W, DIM_W):
                raise InvalidInput(
                    f'{name} must be {DIM_W}x{DIM_W}, got {g.shape}.')
            if determinant(g) == 0:
                raise SingularMatrixError(f'{name} is not invertible.')

    @classmethod
    def with_identity(cls, g: MatrixFF, label: str = '') -> 'GPK3Instance':
        return cls(g.field, MatrixFF.identity(g.field, DIM_W), g, label)

    def normalized(self) -> 'GPK3Instance':
        if self.g1.is_identity():
            return self
        return GPK3Instance(self.field, MatrixFF.identity(self.field, DIM_W),
                            self.g1.inverse() @ self.g2, self.label)

    def __eq__(self, other):
        if not isinstance(other, GPK3Instance):
            return NotImplemented
        return self.field == other.field and self.g1 == other.g1 and \
            self.g2 == other.g2


def double_mirror(inst: GPK3Instance) -> GPK3Instance:
    return GPK3Instance(
        inst.field, inst.g1.inverse_transpose(), inst.g2.inverse_transpose(),
        f'{inst.label} (double mirror)'.strip())


def wedge2_matrix(a: MatrixFF) -> MatrixFF:
    """∧²a in the Plücker basis; x ↦ x·∧²a maps Gr(2,5) to itself."""
    p = a.field.p
    rows = [[(a[i, k] * a[j, l] - a[i, l] * a[j, k]) % p
             for k, l in PLUECKER_PAIRS] for i, j in PLUECKER_PAIRS]
    return MatrixFF(a.field, rows)


def gpk3_patch_ideal(inst: GPK3Instance,
                     chart: PatchChart) -> List[Polynomial]:
    """The 5 equations of X ∩ chart in the chart's 6 free coordinates.

    The second Grassmannian enters through the row-vector substitution
    V ↦ V·g2; the first is built into the chart.
    """
    inst = inst.normalized()
    g = inst.g2
    target = chart.target
    linear = []
    for k in range(DIM_W):
        form = target.zero()
        for j in range(DIM_W):
            if g[j, k]:
                form = form + chart.images[j].scale(g[j, k])
        linear.append(form)
    return [substitute(f, linear) for f in pfaffian_ideal(chart.source)]


def singular_scheme_ideal(cy: Sequence[Polynomial]) -> List[Polynomial]:
    """cy together with the 3x3 minors of its nvars x ngens Jacobian."""
    if not cy:
        return []
    return list(cy) + minors(jacobian(cy), 3)


@dataclass
class PatchVerdict:
    pivot: Tuple[int, int]
    unit_ideal: Optional[bool]
    order: str
    stats: GroebnerStats = dc_field(default_factory=GroebnerStats)
    inconclusive: bool = False

    @property
    def name(self) -> str:
        return pair_name(self.pivot)

    def to_dict(self, timings: bool = True) -> dict:
        out = {
            'pivot': self.name,
            'unit_ideal': self.unit_ideal,
            'pairs': self.stats.pairs,
            'max_degree': self.stats.max_degree,
            'order': self.order,
            'inconclusive': self.inconclusive,
        }
        if timings:
            out['millis'] = round(self.stats.millis, 3)
        return out


@dataclass
class SmoothnessCertificate:
    prime: int
    matrix_sha: str
    patches: List[PatchVerdict]
    label: str = ''
    attempts: Optional[int] = None

    @property
    def smooth(self) -> bool:
        return len(self.patches) == DIM_W and \
            all(v.unit_ideal is True for v in self.patches)

    @property
    def inconclusive(self) -> bool:
        return any(v.inconclusive for v in self.patches)

    def first_failure(self) -> Optional[PatchVerdict]:
        return next((v for v in self.patches if v.unit_ideal is not True),
                    None)

    def to_dict(self, timings: bool = True) -> dict:
        out = {
            'prime': self.prime,
            'matrix_sha': self.matrix_sha,
            'patches': [v.to_dict(timings) for v in self.patches],
            'smooth': self.smooth,
            'inconclusive': self.inconclusive,
        }
        if self.attempts is not None:
            out['attempts'] = self.attempts
        return out


def certify_patch(inst: GPK3Instance, pivot: Tuple[int, int],
                  order: MonomialOrder = MonomialOrder.DEGREVLEX,
                  budget: ResourceBudget = None,
                  fallback: bool = True) -> PatchVerdict:
    """Decides whether the singular locus of X is empty on one chart.

    Args:
        inst (GPK3Instance): The intersection to certify.
        pivot (Tuple[int, int]): Chart x_ij = 1.
        order (MonomialOrder): Term order of the first attempt.
        budget (ResourceBudget): Gröbner limits.
        fallback (bool): Retry under lex when degrevlex runs out of budget.

    Returns:
        PatchVerdict: The verdict; inconclusive if every attempt ran out
            of budget.
    """
    order = MonomialOrder.parse(order)
    ring = pluecker_ring(inst.field, order)
    chart = patch_parametrization(ring, tuple(pivot))
    sing = singular_scheme_ideal(gpk3_patch_ideal(inst, chart))
    orders = [order]
    if fallback and order is not MonomialOrder.LEX:
        orders.append(MonomialOrder.LEX)
    stats = GroebnerStats()
    for current in orders:
        try:
            gb = groebner_basis(sing, current, budget)
        except BudgetExceeded as e:
            stats = e.stats or stats
            LOGGER.warning('Chart %s exceeded the budget under %s: %s',
                           pair_name(pivot), current.value, e)
            if current is not orders[-1]:
                warnings.warn(f'Falling back to lex order on chart '
                              f'{pair_name(pivot)}.', RuntimeWarning)
            continue
        return PatchVerdict(tuple(pivot), gb.is_unit(), current.value,
                            gb.stats)
    return PatchVerdict(tuple(pivot), None, orders[-1].value, stats,
                        inconclusive=True)


def _certify_patch_star(args) -> PatchVerdict:
    return certify_patch(*args)


def certify_smooth_gpk3(inst: GPK3Instance, budget: ResourceBudget = None,
                        order: MonomialOrder = MonomialOrder.DEGREVLEX,
                        n_jobs: int = 1, fallback: bool = True,
                        stop_on_failure: bool = False,
                        progress: bool = True,
                        log_level: str = 'INFO') -> SmoothnessCertificate:
    """Runs the Jacobian criterion on all 10 charts of X = Gr ∩ g·Gr.

    A chart passes when cy plus the 3x3 Jacobian minors generate the unit
    ideal, i.e. the Jacobian has rank 3 at every point of X over the
    algebraic closure. X is smooth of dimension 3 iff all 10 charts pass.

    Args:
        inst (GPK3Instance): The intersection; g1 is normalized away.
        budget (ResourceBudget): Gröbner limits applied per chart.
        order (MonomialOrder): Term order for the first attempt.
        n_jobs (int): Number of parallel chart workers.
        fallback (bool): Retry exhausted charts under lex.
        stop_on_failure (bool): Stop at the first chart that does not
            pass (sequential runs only).
        progress (bool): Show a progress bar.
        log_level (str): Logging level.

    Returns:
        SmoothnessCertificate: Per-chart verdicts and the overall verdict.
    """
    LOGGER.setLevel(log_level.upper())
    inst = inst.normalized()
    jobs = [(inst, pivot, order, budget, fallback)
            for pivot in PLUECKER_PAIRS]
    workers = _worker_count(n_jobs)
    verdicts = []
    if workers > 1:
        LOGGER.debug('Certifying charts with %s workers.', workers)
        with Pool(workers) as pool:
            for verdict in tqdm(pool.imap(_certify_patch_star, jobs),
                                total=len(jobs), disable=not progress,
                                desc='Certifying charts'):
                verdicts.append(verdict)
    else:
        pbar = tqdm(jobs, disable=not progress)
        for job in pbar:
            pbar.set_description(f'Certifying chart {pair_name(job[1])}')
            verdict = certify_patch(*job)
            verdicts.append(verdict)
            if stop_on_failure and verdict.unit_ideal is not True:
                break
    cert = SmoothnessCertificate(inst.field.p, matrix_sha(inst.g2),
                                 verdicts, inst.label)
    LOGGER.info('Certificate for %s: smooth=%s, inconclusive=%s.',
                inst.label or cert.matrix_sha[:12], cert.smooth,
                cert.inconclusive)
    return cert


def search_orthogonal_smooth(
        prime: int, seed: int, max_attempts: int = 20,
        budget: ResourceBudget = None,
        order: MonomialOrder = MonomialOrder.DEGREVLEX,
        progress: bool = True,
        log_level: str = 'INFO') -> Tuple[MatrixFF, SmoothnessCertificate]:
    """Draws orthogonal matrices T until X_{1,T} certifies as smooth.

    Returns:
        tuple: The matrix and its certificate (with the attempt count).

    Raises:
        SearchExhausted: If no attempt succeeds; `attempts` holds a
            DataFrame with the first failing chart of every attempt.
    """
    LOGGER.setLevel(log_level.upper())
    field = PrimeField(prime)
    rng = RandomState(seed)
    failures = []
    for attempt in range(1, max_attempts + 1):
        t = gram_schmidt_orthogonal(field, DIM_W, rng)
        inst = GPK3Instance.with_identity(t, label=f'attempt {attempt}')
        cert = certify_smooth_gpk3(inst, budget, order, stop_on_failure=True,
                                   progress=progress, log_level=log_level)
        if cert.smooth:
            cert.attempts = attempt
            LOGGER.info('Found a smooth orthogonal instance after %s '
                        'attempt(s).', attempt)
            return t, cert
        failed = cert.first_failure()
        failures.append({
            'attempt': attempt,
            'matrix_sha': cert.matrix_sha,
            'failed_chart': failed.name if failed else None,
            'inconclusive': cert.inconclusive,
        })
        LOGGER.debug('Attempt %s failed on chart %s.', attempt,
                     failures[-1]['failed_chart'])
    raise SearchExhausted(
        f'No smooth orthogonal instance over F_{prime} in {max_attempts} '
        f'attempts.', pd.DataFrame(failures).set_index('attempt')
        if failures else pd.DataFrame())


@dataclass(frozen=True, eq=False)
class SkewForm:
    """A 5x5 skew form, i.e. an element of ∧²V (or ∧²V∨)."""
    matrix: MatrixFF

    def __post_init__(self):
        e = self.matrix.entries
        p = self.matrix.field.p
        if e.shape != (DIM_V, DIM_V) or \
                not np.array_equal((e + e.T) % p, np.zeros_like(e)) or \
                np.any(np.diag(e)):
            raise InvalidInput('A skew form needs an antisymmetric 5x5 '
                               'matrix with zero diagonal.')

    @classmethod
    def from_pluecker(cls, field: PrimeField, vector) -> 'SkewForm':
        vector = [int(v) for v in vector]
        if len(vector) != DIM_W:
            raise InvalidInput('Plücker vectors have 10 coordinates.')
        m = np.zeros((DIM_V, DIM_V), dtype=object)
        for (i, j), v in zip(PLUECKER_PAIRS, vector):
            m[i, j] = v
            m[j, i] = -v
        return cls(MatrixFF(field, m))

    def pluecker(self) -> np.ndarray:
        return np.array([self.matrix[i, j] for i, j in PLUECKER_PAIRS],
                        dtype=np.int64)


def skew_rank(form: SkewForm) -> Tuple[int, List[np.ndarray]]:
    rank, kernel = rank_and_nullspace(form.matrix)
    return rank, kernel


def wedge(field: PrimeField, a, b) -> np.ndarray:
    p = field.p
    return np.array([(int(a[i]) * int(b[j]) - int(a[j]) * int(b[i])) % p
                     for i, j in PLUECKER_PAIRS], dtype=np.int64)


def plane_of_pluecker(field: PrimeField, x) -> Tuple[np.ndarray, np.ndarray]:
    """Basis (a, b) of the 2-plane A with x proportional to a∧b."""
    form = SkewForm.from_pluecker(field, x)
    rank, _ = skew_rank(form)
    if rank != 2:
        raise InvalidInput(f'Point has rank {rank}, not a point of Gr(2,5).')
    # column space of a bᵀ - b aᵀ is span(a, b)
    reduced, pivots, _ = _row_reduce(form.matrix.entries.T, field.p)
    return reduced[0].copy(), reduced[1].copy()


def is_tangent_hyperplane(field: PrimeField, x, y) -> bool:
    """Whether the hyperplane {⟨·, y⟩ = 0} is tangent to Gr(2,5) at x.

    Uses the kernel condition A ⊂ ker(y).
    """
    a, b = plane_of_pluecker(field, x)
    form = SkewForm.from_pluecker(field, y)
    return not np.any(form.matrix.apply(a)) and \
        not np.any(form.matrix.apply(b))


def tangent_by_pairing(field: PrimeField, x, y) -> bool:
    """Same question answered by pairing y with the tangent space at x.

    The embedded tangent space of Gr at A = span(a, b) is spanned by the
    vectors a∧e_k and b∧e_k.
    """
    p = field.p
    a, b = plane_of_pluecker(field, x)
    y = np.asarray(y, dtype=np.int64) % p
    for k in range(DIM_V):
        e = np.zeros(DIM_V, dtype=np.int64)
        e[k] = 1
        for v in (a, b):
            if int(np.dot(wedge(field, v, e), y)) % p:
                return False
    return True


def chart_point(field: PrimeField, x, pivot: Tuple[int, int]
                ) -> Tuple[np.ndarray, List[int]]:
    """Rescales x to x_ij = 1 and reads off the chart's free coordinates."""
    p = field.p
    x = np.asarray(x, dtype=np.int64) % p
    lead = int(x[PAIR_INDEX[pivot]])
    if lead == 0:
        raise InvalidInput(f'Point lies outside the chart {pair_name(pivot)}.')
    scaled = (x * field.inverse(lead)) % p
    free = [pair for pair in PLUECKER_PAIRS
            if len(set(pair) & set(pivot)) == 1]
    return scaled, [int(scaled[PAIR_INDEX[pair]]) for pair in free]


def _check_enumeration(q: int, max_q: int) -> PrimeField:
    field = PrimeField(q)
    if q > max_q:
        raise EnumerationBudgetExceeded(
            f'Enumerating P⁹(F_{q}) exceeds the cap q ≤ {max_q}.')
    return field


def _enumeration_units(q: int, chunk: int = ENUMERATION_CHUNK):
    # normalized points: first nonzero coordinate equal to 1
    for lead in range(DIM_W):
        total = q ** (DIM_W - 1 - lead)
        for start in range(0, total, chunk):
            yield q, lead, start, min(start + chunk, total)


def _points_block(q: int, lead: int, start: int, stop: int) -> np.ndarray:
    idx = np.arange(start, stop, dtype=np.int64)
    block = np.zeros((idx.size, DIM_W), dtype=np.int64)
    block[:, lead] = 1
    for col in range(DIM_W - 1, lead, -1):
        block[:, col] = idx % q
        idx = idx // q
    return block


def projective_points(q: int, chunk: int = ENUMERATION_CHUNK
                      ) -> Iterator[np.ndarray]:
    for unit in _enumeration_units(q, chunk):
        yield _points_block(*unit)


def pfaffian_values(points: np.ndarray, q: int) -> np.ndarray:
    """The 5 Plücker quadrics evaluated on every row of `points`."""
    out = np.empty((points.shape[0], DIM_V), dtype=np.int64)
    for k, (a, b, c, d) in enumerate(PFAFFIAN_QUADS):
        x = lambda i, j: points[:, PAIR_INDEX[(i, j)]]  # noqa: E731
        out[:, k] = (x(a, b) * x(c, d) - x(a, c) * x(b, d) +
                     x(a, d) * x(b, c)) % q
    return out


def rank2_mask(points: np.ndarray, q: int) -> np.ndarray:
    nonzero = np.any(points % q, axis=1)
    return nonzero & ~np.any(pfaffian_values(points, q), axis=1)


def _rank2_block(unit, transform: Optional[np.ndarray]) -> np.ndarray:
    q = unit[0]
    points = _points_block(*unit)
    mask = rank2_mask(points, q)
    if transform is not None:
        mask &= rank2_mask((points @ transform) % q, q)
    return points[mask]


def _count_rank2_block(args) -> int:
    unit, transform = args
    return int(_rank2_block(unit, transform).shape[0])


def _side_transform(g: MatrixFF, side: str) -> np.ndarray:
    # rows are points, so x ↦ M·x becomes row ↦ row·Mᵀ
    if side == 'X':
        return g.inverse().T.entries
    if side == 'Y':
        return g.entries
    raise InvalidInput(f'Unknown side "{side}"; use X or Y.')


def enumerate_rank2_points(q: int, g: MatrixFF, side: str = 'X',
                           n_jobs: int = 1,
                           max_q: int = ENUMERATION_MAX_Q) -> int:
    """Counts X_{1,g}(F_q) (side X) or its double mirror Y (side Y).

    Side X counts x with rank(x) = rank(g⁻¹x) = 2; side Y counts y with
    rank(y) = rank(gᵀy) = 2.
    """
    _check_enumeration(q, max_q)
    if g.field.p != q:
        raise InvalidInput(f'g lives over F_{g.field.p}, not F_{q}.')
    transform = _side_transform(g, side)
    jobs = [(unit, transform) for unit in _enumeration_units(q)]
    workers = _worker_count(n_jobs)
    if workers > 1:
        with Pool(workers) as pool:
            return sum(pool.imap_unordered(_count_rank2_block, jobs))
    return sum(_count_rank2_block(job) for job in jobs)


def rank2_points(q: int, transform: Optional[np.ndarray] = None,
                 max_q: int = ENUMERATION_MAX_Q) -> np.ndarray:
    _check_enumeration(q, max_q)
    blocks = [_rank2_block(unit, transform)
              for unit in _enumeration_units(q)]
    return np.concatenate(blocks, axis=0)


def grassmannian_points_rref(q: int,
                             max_q: int = ENUMERATION_MAX_Q) -> np.ndarray:
    """Plücker vectors of all 2-planes in F_q⁵, from RREF 2x5 matrices."""
    field = _check_enumeration(q, max_q)
    points = []
    for c1, c2 in combinations(range(DIM_V), 2):
        free1 = [c for c in range(c1 + 1, DIM_V) if c != c2]
        free2 = list(range(c2 + 1, DIM_V))
        for vals in np.ndindex(*([q] * (len(free1) + len(free2)))):
            a = np.zeros(DIM_V, dtype=np.int64)
            b = np.zeros(DIM_V, dtype=np.int64)
            a[c1], b[c2] = 1, 1
            a[free1] = vals[:len(free1)]
            b[free2] = vals[len(free1):]
            x = wedge(field, a, b)
            lead = x[np.nonzero(x)[0][0]]
            points.append((x * field.inverse(lead)) % q)
    return np.array(points, dtype=np.int64)


def count_hyperplane_section(q: int, y,
                             max_q: int = ENUMERATION_MAX_Q) -> int:
    """#{x ∈ Gr(2,5)(F_q) : ⟨x, y⟩ = 0}."""
    points = rank2_points(q, max_q=max_q)
    y = np.asarray(y, dtype=np.int64) % q
    return int(np.count_nonzero((points @ y) % q == 0))


def incidence_pairs(q: int, g: MatrixFF,
                    max_q: int = ENUMERATION_MAX_Q) -> int:
    """#Q(Gr₁, Gr₂∨)(F_q): pairs x ∈ Gr, y with rk(gᵀy) = 2 and ⟨x, y⟩ = 0.

    Gr₂∨ = g⁻ᵀ·Gr, so its points are the rows z·g⁻¹ for z ∈ Gr.
    """
    if g.field.p != q:
        raise InvalidInput(f'g lives over F_{g.field.p}, not F_{q}.')
    gr1 = rank2_points(q, max_q=max_q)
    gr2_dual = (gr1 @ g.inverse().entries) % q
    pairing = (gr1 @ gr2_dual.T) % q
    return int(np.count_nonzero(pairing == 0))


def certificate_frame(cert: SmoothnessCertificate) -> pd.DataFrame:
    df = pd.DataFrame([v.to_dict() for v in cert.patches])
    return df.set_index('pivot') if not df.empty else df
