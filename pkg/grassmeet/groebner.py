# ----------------------------------------------------------------------------
# Copyright (c) 2022, Bokulich Laboratories.
#
# Distributed under the terms of the Modified BSD License.
#
# The full license is in the file LICENSE, distributed with this software.
# ----------------------------------------------------------------------------

import heapq
import time
from dataclasses import dataclass, asdict
from itertools import combinations
from typing import Dict, List, Sequence, Tuple

from sympy.polys.monomials import monomial_div, monomial_lcm, monomial_mul

from grassmeet.multipoly import Monomial, MonomialOrder, Polynomial
from grassmeet.utils import BudgetExceeded, InvalidInput, set_up_logger

LOGGER = set_up_logger('INFO', logger_name=__name__)

PROGRESS_EVERY = 1000

__all__ = [
    'MonomialOrder', 'ResourceBudget', 'GroebnerStats', 'GroebnerBasis',
    'normal_form', 'groebner_basis', 'is_unit_ideal', 'ideal_dimension'
]


@dataclass(frozen=True)
class ResourceBudget:
    max_degree: int = 60
    max_basis: int = 200_000
    max_pairs: int = 5_000_000

    def __post_init__(self):
        for name, value in asdict(self).items():
            if int(value) <= 0:
                raise InvalidInput(f'Budget {name} must be positive, '
                                   f'got {value}.')


@dataclass
class GroebnerStats:
    pairs: int = 0
    zero_reductions: int = 0
    max_degree: int = 0
    basis_size: int = 0
    millis: float = 0.0

    def to_dict(self) -> dict:
        return asdict(self)


# working representation: (leading monomial, terms) with monic terms
_Entry = Tuple[Monomial, Dict[Monomial, int]]


def _reduce(terms: Dict[Monomial, int], reducers: Sequence[_Entry],
            order: MonomialOrder, p: int) -> Dict[Monomial, int]:
    """Full reduction of `terms` (consumed) by monic reducers."""
    heap_key = order.heap_key
    heap = [(heap_key(m), m) for m in terms]
    heapq.heapify(heap)
    remainder = {}
    while heap:
        _, m = heapq.heappop(heap)
        c = terms.get(m)
        if not c:
            continue
        for lm, gterms in reducers:
            q = monomial_div(m, lm)
            if q is None:
                continue
            for gm, gc in gterms.items():
                nm = monomial_mul(gm, q)
                old = terms.get(nm)
                v = ((old or 0) - c * gc) % p
                if v:
                    terms[nm] = v
                    if old is None:
                        heapq.heappush(heap, (heap_key(nm), nm))
                elif old is not None:
                    del terms[nm]
            break
        else:
            remainder[m] = c
            del terms[m]
    return remainder


def _monic_entry(terms: Dict[Monomial, int], order: MonomialOrder,
                 p: int) -> _Entry:
    lm = max(terms, key=order.sympy_order)
    inv = pow(terms[lm], p - 2, p)
    return lm, {m: (c * inv) % p for m, c in terms.items()}


def _is_constant(terms: Dict[Monomial, int]) -> bool:
    return len(terms) == 1 and not any(next(iter(terms)))


def _spoly(f: _Entry, g: _Entry, p: int) -> Dict[Monomial, int]:
    lcm = monomial_lcm(f[0], g[0])
    qf, qg = monomial_div(lcm, f[0]), monomial_div(lcm, g[0])
    terms = {monomial_mul(m, qf): c for m, c in f[1].items()}
    for m, c in g[1].items():
        nm = monomial_mul(m, qg)
        v = (terms.get(nm, 0) - c) % p
        if v:
            terms[nm] = v
        else:
            terms.pop(nm, None)
    return terms


def _update(lms: List[Monomial], pairs: set, lmf: Monomial,
            order: MonomialOrder) -> set:
    """Gebauer–Möller update of the pair set when lmf joins the basis."""
    new = len(lms)
    pairs = {(i, j) for i, j in pairs
             if monomial_div(monomial_lcm(lms[i], lms[j]), lmf) is None
             or monomial_lcm(lms[i], lms[j]) == monomial_lcm(lms[i], lmf)
             or monomial_lcm(lms[i], lms[j]) == monomial_lcm(lms[j], lmf)}
    by_lcm = {}
    for i, lm in enumerate(lms):
        by_lcm.setdefault(monomial_lcm(lm, lmf), []).append(i)
    minimal = []
    for lcm in sorted(by_lcm, key=order.sympy_order):
        if all(monomial_div(lcm, other) is None for other in minimal):
            minimal.append(lcm)
    for lcm in minimal:
        # Buchberger's coprime criterion discards the whole class
        if not any(monomial_lcm(lms[i], lmf) == monomial_mul(lms[i], lmf)
                   for i in by_lcm[lcm]):
            pairs.add((min(by_lcm[lcm]), new))
    return pairs


@dataclass(frozen=True)
class GroebnerBasis:
    """A (reduced) Gröbner basis together with the run statistics."""
    order: MonomialOrder
    generators: Tuple[Polynomial, ...]
    reduced: bool
    stats: GroebnerStats

    def is_unit(self) -> bool:
        return any(g.is_constant() and not g.is_zero()
                   for g in self.generators)

    def leading_monomials(self) -> List[Monomial]:
        return [g.leading_monomial(self.order) for g in self.generators]

    def reduce(self, f: Polynomial) -> Polynomial:
        return normal_form(f, self.generators, self.order)

    def contains(self, f: Polynomial) -> bool:
        return self.reduce(f).is_zero()

    def spolys_reduce_to_zero(self) -> bool:
        if not self.generators:
            return True
        ring = self.generators[0].ring
        entries = [_monic_entry(dict(g.terms), self.order, ring.p)
                   for g in self.generators]
        for f, g in combinations(entries, 2):
            s = _spoly(f, g, ring.p)
            if s and _reduce(s, entries, self.order, ring.p):
                return False
        return True


def normal_form(f: Polynomial, basis: Sequence[Polynomial],
                order: MonomialOrder = None) -> Polynomial:
    """Remainder of `f` under full multivariate division by `basis`."""
    order = MonomialOrder.parse(order or f.ring.order)
    p = f.ring.p
    if any(g.ring != f.ring for g in basis):
        raise InvalidInput('normal_form needs all polynomials in one ring.')
    reducers = [_monic_entry(dict(g.terms), order, p) for g in basis if g]
    return Polynomial._raw(f.ring, _reduce(dict(f.terms), reducers, order, p))


def _unit_basis(ring, order, stats, started) -> GroebnerBasis:
    stats.basis_size = 1
    stats.millis = (time.perf_counter() - started) * 1000
    LOGGER.debug('Unit ideal detected after %s pairs.', stats.pairs)
    return GroebnerBasis(order, (ring.one(),), True, stats)


def groebner_basis(gens: Sequence[Polynomial], order: MonomialOrder = None,
                   budget: ResourceBudget = None) -> GroebnerBasis:
    """Computes the reduced Gröbner basis of the ideal spanned by `gens`.

    Buchberger's algorithm with the normal selection strategy and
    Gebauer–Möller pair elimination. The inputs are inter-reduced before
    any pair is formed, every basis element is kept monic, and the run
    stops with {1} as soon as a nonzero constant shows up.

    Args:
        gens (Sequence[Polynomial]): Generators, all in one ring.
        order (MonomialOrder): Term order; defaults to the ring's order.
        budget (ResourceBudget): Limits on degree, basis size and pairs.

    Returns:
        GroebnerBasis: The reduced basis and run statistics.

    Raises:
        BudgetExceeded: If any budget limit is hit; carries the partial
            statistics.
    """
    gens = [g for g in gens if not g.is_zero()]
    budget = budget or ResourceBudget()
    stats = GroebnerStats()
    started = time.perf_counter()
    if not gens:
        return GroebnerBasis(MonomialOrder.parse(order or 'degrevlex'),
                             (), True, stats)
    ring = gens[0].ring
    if any(g.ring != ring for g in gens):
        raise InvalidInput('All generators must live in the same ring.')
    order = MonomialOrder.parse(order or ring.order)
    p = ring.p

    def check_budget(terms):
        deg = max(sum(m) for m in terms)
        stats.max_degree = max(stats.max_degree, deg)
        stats.basis_size = len(basis)
        stats.millis = (time.perf_counter() - started) * 1000
        if deg > budget.max_degree:
            raise BudgetExceeded(
                f'Degree {deg} exceeds the budget of {budget.max_degree}.',
                stats)
        if len(basis) >= budget.max_basis:
            raise BudgetExceeded(
                f'Basis size exceeds the budget of {budget.max_basis}.',
                stats)

    basis: List[_Entry] = []
    lms: List[Monomial] = []
    pairs = set()
    queue = []

    def add(terms):
        nonlocal pairs
        check_budget(terms)
        entry = _monic_entry(terms, order, p)
        pairs = _update(lms, pairs, entry[0], order)
        for i, j in pairs:
            if j == len(lms):
                lcm = monomial_lcm(lms[i], entry[0])
                heapq.heappush(queue, (order.sympy_order(lcm), i, j))
        basis.append(entry)
        lms.append(entry[0])

    inputs = sorted((dict(g.terms) for g in gens),
                    key=lambda t: (max(sum(m) for m in t), len(t)))
    for terms in inputs:
        r = _reduce(terms, basis, order, p)
        if not r:
            continue
        if _is_constant(r):
            return _unit_basis(ring, order, stats, started)
        add(r)

    while queue:
        _, i, j = heapq.heappop(queue)
        if (i, j) not in pairs:
            continue
        pairs.discard((i, j))
        stats.pairs += 1
        if stats.pairs > budget.max_pairs:
            stats.millis = (time.perf_counter() - started) * 1000
            raise BudgetExceeded(
                f'Pair reductions exceed the budget of {budget.max_pairs}.',
                stats)
        if stats.pairs % PROGRESS_EVERY == 0:
            LOGGER.debug('Processed %s pairs, basis size %s, %s pending.',
                         stats.pairs, len(basis), len(pairs))
        s = _spoly(basis[i], basis[j], p)
        r = _reduce(s, basis, order, p) if s else {}
        if not r:
            stats.zero_reductions += 1
            continue
        if _is_constant(r):
            return _unit_basis(ring, order, stats, started)
        add(r)

    # minimalize, then inter-reduce
    minimal = []
    for lm, terms in sorted(basis, key=lambda e: order.sympy_order(e[0])):
        if all(monomial_div(lm, other[0]) is None for other in minimal):
            minimal.append((lm, terms))
    reduced = []
    for k, (lm, terms) in enumerate(minimal):
        others = minimal[:k] + minimal[k + 1:]
        r = _reduce(dict(terms), others, order, p)
        reduced.append(Polynomial._raw(ring, _monic_entry(r, order, p)[1]))
    stats.basis_size = len(reduced)
    stats.millis = (time.perf_counter() - started) * 1000
    return GroebnerBasis(order, tuple(reduced), True, stats)


def is_unit_ideal(gens: Sequence[Polynomial], order: MonomialOrder = None,
                  budget: ResourceBudget = None) -> bool:
    return groebner_basis(gens, order, budget).is_unit()


def dimension_from_leading_monomials(lms: Sequence[Monomial],
                                     nvars: int) -> int:
    supports = [frozenset(i for i, e in enumerate(m) if e) for m in lms]
    if any(not s for s in supports):
        return -1
    for size in range(nvars, -1, -1):
        for subset in combinations(range(nvars), size):
            chosen = set(subset)
            if not any(s <= chosen for s in supports):
                return size
    return -1


def ideal_dimension(gens: Sequence[Polynomial], order: MonomialOrder = None,
                    budget: ResourceBudget = None) -> int:
    """Krull dimension of the quotient ring; -1 for the unit ideal.

    Read off the initial ideal: the largest set of variables none of whose
    leading monomials is supported inside it.
    """
    if not gens:
        raise InvalidInput('ideal_dimension needs the generators\' ring; '
                           'pass at least one (possibly zero) polynomial.')
    gb = groebner_basis(gens, order, budget)
    return dimension_from_leading_monomials(gb.leading_monomials(),
                                            gens[0].ring.nvars)
