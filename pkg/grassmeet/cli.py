# ----------------------------------------------------------------------------
# Copyright (c) 2022, Bokulich Laboratories.
#
# Distributed under the terms of the Modified BSD License.
#
# The full license is in the file LICENSE, distributed with this software.
# ----------------------------------------------------------------------------

import json
import os
from dataclasses import dataclass, field
from datetime import datetime, timezone
from importlib import resources
from typing import Callable, Dict, List, Optional

import click
import pandas as pd

from grassmeet import __version__
from grassmeet.bwb import BundleSpec, bott_cohomology, verify_appendix_a
from grassmeet.ffield import (
    PrimeField, RandomState, format_matrix_text, gram_schmidt_orthogonal,
    matrix_sha
)
from grassmeet.formats import certificate_to_dict, read_matrix
from grassmeet.grassmann import (
    GPK3Instance, certify_smooth_gpk3, double_mirror,
    search_orthogonal_smooth
)
from grassmeet.groebner import MonomialOrder, ResourceBudget
from grassmeet.motivic import (
    class_grassmannian_25, class_section, count_and_compare,
    identity_derivation, incidence_identity
)
from grassmeet.traces import (
    InvolutionType, allowed_involution_traces, oracle_trace_type1,
    trace_dtau, trace_type1, trace_type2, type1_table, type2_table
)
from grassmeet.utils import (
    BudgetExceeded, ChartInvariantError, DegreeOverflowError,
    EnumerationBudgetExceeded, InternalCheckError, InvalidInput, NotASquare,
    SearchExhausted, SingularMatrixError, load_env_defaults, set_up_logger
)

LOGGER = set_up_logger('INFO', logger_name=__name__)

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_INPUT = 2
EXIT_BUDGET = 3

FIXTURE = 'appendixB.txt'


def default_matrix_path() -> str:
    return str(resources.files('grassmeet').joinpath('data', FIXTURE))


@dataclass
class RunConfig:
    subcommand: str
    prime: Optional[int] = None
    seed: Optional[int] = None
    matrix: Optional[str] = None
    jobs: int = 1
    budget: ResourceBudget = field(default_factory=ResourceBudget)
    order: MonomialOrder = MonomialOrder.DEGREVLEX
    output_format: str = 'human'
    timestamp: bool = True
    log_level: str = 'INFO'
    options: Dict = field(default_factory=dict)

    def __post_init__(self):
        if self.subcommand not in PIPELINES:
            raise InvalidInput(f'Unknown subcommand "{self.subcommand}".')
        if self.prime is not None:
            PrimeField(self.prime)
        if self.matrix is not None and not os.path.isfile(self.matrix):
            raise InvalidInput(f'Matrix file {self.matrix} does not exist.')
        if self.output_format not in ('human', 'json'):
            raise InvalidInput(f'Unknown output format '
                               f'"{self.output_format}".')
        self.order = MonomialOrder.parse(self.order)

    @property
    def progress(self) -> bool:
        return self.output_format == 'human'


@dataclass
class Outcome:
    payload: dict
    passed: bool = True
    lines: List[str] = field(default_factory=list)
    budget_exhausted: bool = False

    @property
    def exit_code(self) -> int:
        if self.budget_exhausted:
            return EXIT_BUDGET
        return EXIT_OK if self.passed else EXIT_FAILED


def _records(df: pd.DataFrame) -> list:
    return json.loads(df.to_json(orient='records', force_ascii=False))


def _certify(cfg: RunConfig) -> Outcome:
    field_ = PrimeField(cfg.prime)
    g = read_matrix(cfg.matrix, field_)
    inst = GPK3Instance.with_identity(g, label=os.path.basename(cfg.matrix))
    if cfg.options.get('double_mirror'):
        inst = double_mirror(inst)
    cert = certify_smooth_gpk3(inst, cfg.budget, cfg.order, n_jobs=cfg.jobs,
                               progress=cfg.progress,
                               log_level=cfg.log_level)
    payload = certificate_to_dict(cert, timings=cfg.timestamp)
    payload['orthogonal'] = g.is_orthogonal()
    lines = [f'matrix {inst.label} over F_{cfg.prime} '
             f'(sha256 {cert.matrix_sha[:16]}…), orthogonal: '
             f'{payload["orthogonal"]}']
    for v in cert.patches:
        state = 'inconclusive' if v.inconclusive else \
            ('unit ideal' if v.unit_ideal else 'NOT unit')
        lines.append(f'  chart {v.name}: {state} ({v.order}, '
                     f'{v.stats.pairs} pairs, degree {v.stats.max_degree})')
    lines.append('SMOOTH' if cert.smooth else
                 ('INCONCLUSIVE' if cert.inconclusive else 'NOT SMOOTH'))
    # only budget exhaustion stands between this run and a verdict
    exhausted = not cert.smooth and all(
        v.unit_ideal is not False for v in cert.patches)
    return Outcome(payload, cert.smooth, lines, budget_exhausted=exhausted)


def _search(cfg: RunConfig) -> Outcome:
    try:
        t, cert = search_orthogonal_smooth(
            cfg.prime, cfg.seed, cfg.options.get('max_attempts', 20),
            cfg.budget, cfg.order, progress=cfg.progress,
            log_level=cfg.log_level)
    except SearchExhausted as e:
        attempts = e.attempts.reset_index() \
            if e.attempts is not None else pd.DataFrame()
        return Outcome({'found': False, 'prime': cfg.prime,
                        'seed': cfg.seed, 'attempts': _records(attempts)},
                       False, [str(e)])
    text = format_matrix_text(t, centered=True)
    out = cfg.options.get('out')
    if out:
        with open(out, 'w', encoding='utf-8') as fh:
            fh.write(text)
    payload = {'found': True, 'prime': cfg.prime, 'seed': cfg.seed,
               'attempts': cert.attempts, 'matrix': text,
               'certificate': certificate_to_dict(cert, cfg.timestamp)}
    lines = [f'smooth orthogonal matrix after {cert.attempts} attempt(s), '
             f'sha256 {cert.matrix_sha}', text.rstrip()]
    return Outcome(payload, True, lines)


def _bwb(cfg: RunConfig) -> Outcome:
    o = cfg.options
    spec = BundleSpec(o['n'], o['r'], o['alpha'], o['beta'])
    if o.get('twist'):
        spec = spec.twisted(o['twist'])
    answer = bott_cohomology(spec)
    payload = dict(answer.to_dict(), cohomology=answer.describe(),
                   weight_in=list(spec.weight))
    return Outcome(payload, True, [f'RΓ(Gr({spec.r},{spec.n}), '
                                   f'{list(spec.weight)}) = '
                                   f'{answer.describe()}'])


LEMMA_LOCATIONS = {
    'A-tables': 'cohomology tables of Q(-t) and ∧2Q(-t) on Gr(2,5)',
    'A-vanishing': 'vanishing lemmas for N, T_P and the Koszul resolutions',
}


def _lemmas(cfg: RunConfig) -> Outcome:
    which = cfg.options.get('which', 'all')
    report = verify_appendix_a(log_level=cfg.log_level)
    if which != 'all':
        report = report[report['group'] == which]
    groups = sorted(report['group'].unique())
    payload = {
        'locations': {g: LEMMA_LOCATIONS[g] for g in groups},
        'claims': _records(report),
        'passed': bool(report['passed'].all()),
    }
    lines = []
    for g in groups:
        lines.append(f'== {LEMMA_LOCATIONS[g]} ==')
        for _, row in report[report['group'] == g].iterrows():
            mark = 'ok  ' if row['passed'] else 'FAIL'
            lines.append(f'  [{mark}] {row["claim"]}: {row["observed"]}')
    return Outcome(payload, payload['passed'], lines)


def _traces(cfg: RunConfig) -> Outcome:
    o = cfg.options
    payload, lines, passed = {
        'location': 'involution traces on the 51-dimensional tangent space'
    }, [], True
    if o.get('type1'):
        a0, b0 = (InvolutionType.parse(t) for t in o['type1'])
        report = trace_type1(a0, b0)
        payload['type1'] = report.to_dict()
        lines.append(f'type I {a0} {b0}: mult1 = {report.mult1}, '
                     f'trace = {report.trace}')
        if o.get('oracle'):
            signs_a = [1] * a0.p + [-1] * a0.q
            signs_b = [1] * b0.p + [-1] * b0.q
            value = oracle_trace_type1(signs_a, signs_b,
                                       seed=cfg.seed or 0)
            agrees = value == report.trace
            passed &= agrees
            payload['oracle'] = {'trace': str(value), 'agrees': agrees}
            lines.append(f'  oracle trace = {value} '
                         f'({"agrees" if agrees else "DISAGREES"})')
    if o.get('type2'):
        a = InvolutionType.parse(o['type2'])
        report = trace_type2(a)
        payload['type2'] = report.to_dict()
        lines.append(f'type II {a}: mult1 = {report.mult1}, '
                     f'trace = {report.trace}')
    if o.get('dtau') or o.get('all'):
        payload['dtau'] = trace_dtau()
        lines.append(f'trace of dτ = {payload["dtau"]}')
    if o.get('all'):
        allowed = sorted(allowed_involution_traces(), reverse=True)
        payload['allowed'] = allowed
        payload['type1_table'] = _records(type1_table())
        payload['type2_table'] = _records(type2_table())
        excluded = payload['dtau'] not in allowed
        payload['dtau_excluded'] = excluded
        passed &= excluded
        lines.append(type1_table().to_string(index=False))
        lines.append(type2_table().to_string(index=False))
        lines.append(f'allowed involution traces: {allowed}')
        lines.append(f'{payload["dtau"]} is '
                     f'{"not " if excluded else ""}an involution trace')
    return Outcome(payload, passed, lines)


def _count(cfg: RunConfig) -> Outcome:
    field_ = PrimeField(cfg.prime)
    if cfg.matrix:
        g = read_matrix(cfg.matrix, field_)
    else:
        g = RandomState(cfg.seed or 0).random_invertible(field_, 10)
    report = count_and_compare(cfg.prime, g, cfg.options.get('incidence'),
                               n_jobs=cfg.jobs, log_level=cfg.log_level)
    payload = dict(report.to_dict(), matrix_sha=matrix_sha(g))
    lines = [f'n_X = {report.n_x}, n_Y = {report.n_y}, '
             f'n_Gr = {report.n_gr}' +
             (f', n_Q = {report.n_q}' if report.n_q is not None else '')]
    lines += [f'  [{"ok  " if v else "FAIL"}] {k}'
              for k, v in report.checks.items()]
    lines.append(payload['verdict'])
    return Outcome(payload, report.verdict, lines)


def _l_class(cfg: RunConfig) -> Outcome:
    o = cfg.options
    payload = {'location': 'incidence correspondence between the '
                           'Grassmannian and the dual Grassmannian'}
    lines = []
    if o.get('identity', True):
        ident = incidence_identity()
        payload['derivation'] = list(identity_derivation())
        payload['difference'] = str(ident.difference)
        lines += payload['derivation']
    for q in o.get('evaluate') or ():
        values = {'Gr(2,5)': class_grassmannian_25().evaluate(q),
                  'S2': class_section(2).evaluate(q),
                  'S4': class_section(4).evaluate(q)}
        payload.setdefault('evaluations', {})[str(q)] = values
        lines.append(f'q = {q}: ' + ', '.join(f'{k} = {v}'
                                              for k, v in values.items()))
    return Outcome(payload, True, lines)


def _sqroot(cfg: RunConfig) -> Outcome:
    o = cfg.options
    field_ = PrimeField(cfg.prime)
    payload, lines = {'prime': cfg.prime}, []
    if o.get('x') is not None:
        x = field_(o['x'])
        square = field_.is_square(x)
        payload.update(x=x, is_square=square)
        if square and field_.p % 4 == 3:
            payload['root'] = field_.sqrt_3mod4(x)
        lines.append(f'{x} is {"" if square else "not "}a nonzero square '
                     f'in F_{field_.p}' +
                     (f', root {payload["root"]}' if 'root' in payload
                      else ''))
    if o.get('orthogonal'):
        t = gram_schmidt_orthogonal(field_, o['orthogonal'],
                                    RandomState(cfg.seed or 0))
        text = format_matrix_text(t, centered=True)
        payload.update(matrix=text, orthogonal=t.is_orthogonal())
        lines.append(text.rstrip())
    return Outcome(payload, True, lines)


PIPELINES: Dict[str, Callable[[RunConfig], Outcome]] = {
    'certify': _certify,
    'search': _search,
    'bwb': _bwb,
    'lemmas': _lemmas,
    'traces': _traces,
    'count': _count,
    'l-class': _l_class,
    'sqroot': _sqroot,
}


def _emit(cfg: RunConfig, outcome: Outcome):
    if cfg.output_format == 'json':
        payload = dict(outcome.payload, command=cfg.subcommand,
                       exit_code=outcome.exit_code)
        if cfg.timestamp:
            payload['timestamp'] = datetime.now(timezone.utc).isoformat()
        click.echo(json.dumps(payload, indent=2, sort_keys=True,
                              ensure_ascii=False, default=str))
    else:
        for line in outcome.lines:
            click.echo(line)


def _error_exit_code(e: Exception) -> int:
    if isinstance(e, (BudgetExceeded, EnumerationBudgetExceeded,
                      DegreeOverflowError)):
        return EXIT_BUDGET
    if isinstance(e, (InternalCheckError, ChartInvariantError)):
        return EXIT_FAILED
    if isinstance(e, (ValueError, SingularMatrixError, OSError,
                      NotASquare)):
        return EXIT_INPUT
    raise e


def dispatch(cfg: RunConfig) -> int:
    """Runs the pipeline named by the config and prints its report.

    Returns:
        int: 0 when every check passed, 1 when a check failed, 2 for
            invalid input and 3 when a resource budget ran out.
    """
    LOGGER.setLevel(cfg.log_level.upper())
    try:
        outcome = PIPELINES[cfg.subcommand](cfg)
    except Exception as e:
        code = _error_exit_code(e)
        click.echo(f'Error: {e}', err=True)
        return code
    _emit(cfg, outcome)
    return outcome.exit_code


def _run(ctx: click.Context, subcommand: str, **kwargs):
    settings = ctx.obj
    try:
        budget = ResourceBudget(settings['budget_degree'],
                                settings['budget_basis'],
                                settings['budget_pairs'])
        cfg = RunConfig(subcommand, jobs=settings['jobs'], budget=budget,
                        order=settings['order'],
                        output_format=settings['output_format'],
                        timestamp=settings['timestamp'],
                        log_level=settings['log_level'], **kwargs)
    except (ValueError, OSError) as e:
        click.echo(f'Error: {e}', err=True)
        ctx.exit(EXIT_INPUT)
    ctx.exit(dispatch(cfg))


def _int_list(ctx, param, value):
    if value is None:
        return None
    try:
        return tuple(int(x) for x in value.split(',') if x.strip())
    except ValueError:
        raise click.BadParameter('expected comma-separated integers')


@click.group(context_settings={'help_option_names': ['-h', '--help']})
@click.version_option(__version__)
@click.option('--jobs', type=int, default=None,
              help='Maximum number of parallel workers.')
@click.option('--format', 'output_format', default='human',
              type=click.Choice(['human', 'json']), show_default=True)
@click.option('--no-timestamp', is_flag=True,
              help='Omit timestamps and timings for byte-identical JSON.')
@click.option('--log-level', default=None,
              type=click.Choice(['DEBUG', 'INFO', 'WARNING', 'ERROR'],
                                case_sensitive=False))
@click.option('--budget-degree', type=int, default=None)
@click.option('--budget-pairs', type=int, default=None)
@click.option('--budget-basis', type=int, default=None)
@click.option('--order', default='degrevlex',
              type=click.Choice(['degrevlex', 'lex']), show_default=True)
@click.pass_context
def cli(ctx, jobs, output_format, no_timestamp, log_level, budget_degree,
        budget_pairs, budget_basis, order):
    """Verification pipelines for intersections of two Gr(2,5) in P⁹."""
    try:
        env = load_env_defaults()
    except InvalidInput as e:
        click.echo(f'Error: {e}', err=True)
        ctx.exit(EXIT_INPUT)
    if log_level is None:
        # keep stdout parseable when emitting JSON
        log_level = 'ERROR' if output_format == 'json' else env['log_level']
    ctx.obj = {
        'jobs': jobs if jobs is not None else env['jobs'],
        'budget_degree': budget_degree or env['budget_degree'],
        'budget_pairs': budget_pairs or env['budget_pairs'],
        'budget_basis': budget_basis or env['budget_basis'],
        'order': order,
        'output_format': output_format,
        'timestamp': not no_timestamp,
        'log_level': log_level.upper(),
    }


@cli.command()
@click.option('--prime', type=int, default=103, show_default=True)
@click.option('--matrix', type=click.Path(dir_okay=False), default=None,
              help='Matrix text file (defaults to the shipped fixture).')
@click.option('--double-mirror', is_flag=True,
              help='Certify X_{1,g^-T} instead of X_{1,g}.')
@click.pass_context
def certify(ctx, prime, matrix, double_mirror):
    """Certify smoothness of X = Gr ∩ g·Gr chart by chart."""
    _run(ctx, 'certify', prime=prime, matrix=matrix or default_matrix_path(),
         options={'double_mirror': double_mirror})


@cli.command()
@click.option('--prime', type=int, default=103, show_default=True)
@click.option('--seed', type=int, required=True)
@click.option('--max-attempts', type=int, default=20, show_default=True)
@click.option('--out', type=click.Path(dir_okay=False), default=None,
              help='Write the matrix found to this file.')
@click.pass_context
def search(ctx, prime, seed, max_attempts, out):
    """Search orthogonal g with a smooth X_{1,g}."""
    _run(ctx, 'search', prime=prime, seed=seed,
         options={'max_attempts': max_attempts, 'out': out})


@cli.command()
@click.option('--n', 'n', type=int, default=5, show_default=True)
@click.option('--r', 'r', type=int, default=2, show_default=True)
@click.option('--alpha', callback=_int_list, required=True)
@click.option('--beta', callback=_int_list, required=True)
@click.option('--twist', type=int, default=0)
@click.pass_context
def bwb(ctx, n, r, alpha, beta, twist):
    """Cohomology of Σ^α U∨ ⊗ Σ^β Q∨ on Gr(r, n)."""
    _run(ctx, 'bwb', options={'n': n, 'r': r, 'alpha': alpha,
                              'beta': beta, 'twist': twist})


@cli.command()
@click.option('--which', default='all', show_default=True,
              type=click.Choice(['A-tables', 'A-vanishing', 'all']))
@click.pass_context
def lemmas(ctx, which):
    """Re-check the cohomology tables and vanishing lemmas."""
    _run(ctx, 'lemmas', options={'which': which})


@cli.command()
@click.option('--type1', nargs=2, default=None, metavar='P,Q P,Q')
@click.option('--type2', default=None, metavar='P,Q')
@click.option('--dtau', is_flag=True)
@click.option('--all', 'all_', is_flag=True)
@click.option('--oracle', is_flag=True,
              help='Also compute the type-I trace from explicit matrices.')
@click.option('--seed', type=int, default=0, show_default=True)
@click.pass_context
def traces(ctx, type1, type2, dtau, all_, oracle, seed):
    """Involution traces on the tangent space."""
    if not (type1 or type2 or dtau or all_):
        all_ = True
    _run(ctx, 'traces', seed=seed,
         options={'type1': type1, 'type2': type2, 'dtau': dtau,
                  'all': all_, 'oracle': oracle})


@cli.command()
@click.option('--prime', type=int, default=3, show_default=True)
@click.option('--g', 'matrix', type=click.Path(dir_okay=False),
              default=None, help='Matrix text file for g.')
@click.option('--seed', type=int, default=0, show_default=True,
              help='Seed for a random g when no file is given.')
@click.option('--incidence/--no-incidence', default=None,
              help='Enumerate incidence pairs (default: only for q = 2).')
@click.pass_context
def count(ctx, prime, matrix, seed, incidence):
    """Point counts of X, its double mirror and the incidence variety."""
    _run(ctx, 'count', prime=prime, matrix=matrix, seed=seed,
         options={'incidence': incidence})


@cli.command(name='l-class')
@click.option('--identity/--no-identity', default=True)
@click.option('--evaluate', type=int, multiple=True,
              help='Evaluate the classes at q (repeatable).')
@click.pass_context
def l_class(ctx, identity, evaluate):
    """Classes in Z[L] and the incidence identity."""
    _run(ctx, 'l-class', options={'identity': identity,
                                  'evaluate': evaluate})


@cli.command()
@click.option('--prime', type=int, required=True)
@click.option('--x', 'x', type=int, default=None)
@click.option('--orthogonal', type=int, default=None, metavar='DIM')
@click.option('--seed', type=int, default=0, show_default=True)
@click.pass_context
def sqroot(ctx, prime, x, orthogonal, seed):
    """Square roots and Gram–Schmidt orthogonal matrices over F_p."""
    if x is None and orthogonal is None:
        raise click.UsageError('Give --x and/or --orthogonal.')
    _run(ctx, 'sqroot', prime=prime, seed=seed,
         options={'x': x, 'orthogonal': orthogonal})


if __name__ == '__main__':
    cli()
