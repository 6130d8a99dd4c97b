# ----------------------------------------------------------------------------
# Copyright (c) 2022, Bokulich Laboratories.
#
# Distributed under the terms of the Modified BSD License.
#
# The full license is in the file LICENSE, distributed with this software.
# ----------------------------------------------------------------------------

import json
import os
import tempfile
import unittest
from unittest.mock import patch

import pandas as pd
from click.testing import CliRunner

from grassmeet.cli import (
    EXIT_BUDGET, EXIT_FAILED, EXIT_INPUT, EXIT_OK, RunConfig, cli, dispatch
)
from grassmeet.tests._utils import get_data_path, slow
from grassmeet.utils import BudgetExceeded, InvalidInput, SearchExhausted


class TestCli(unittest.TestCase):

    def setUp(self):
        super().setUp()
        self.temp_dir = tempfile.TemporaryDirectory(
            prefix='grassmeet-test-temp-')
        try:
            self.runner = CliRunner(mix_stderr=False)
        except TypeError:
            # click >= 8.2 always keeps stderr apart
            self.runner = CliRunner()

    def tearDown(self):
        self.temp_dir.cleanup()
        super().tearDown()

    def invoke(self, *args, **kwargs):
        return self.runner.invoke(cli, list(args), catch_exceptions=False,
                                  **kwargs)

    def invoke_json(self, *args):
        result = self.invoke('--format', 'json', '--no-timestamp', *args)
        return result, json.loads(result.stdout)

    def test_traces_default_all(self):
        result = self.invoke('traces')
        self.assertEqual(result.exit_code, EXIT_OK)
        self.assertIn('allowed involution traces', result.stdout)
        self.assertIn('-1 is not an involution trace', result.stdout)

    def test_traces_json(self):
        result, obs = self.invoke_json('traces', '--all')
        self.assertEqual(result.exit_code, EXIT_OK)
        self.assertEqual(obs['dtau'], -1)
        self.assertTrue(obs['dtau_excluded'])
        self.assertListEqual(obs['allowed'],
                             [51, 3, 1, -3, -5, -13, -15, -35])
        self.assertEqual(obs['command'], 'traces')
        self.assertEqual(obs['exit_code'], 0)
        self.assertNotIn('timestamp', obs)

    def test_json_byte_identical_without_timestamp(self):
        first = self.invoke('--format', 'json', '--no-timestamp', 'traces')
        second = self.invoke('--format', 'json', '--no-timestamp', 'traces')
        self.assertEqual(first.stdout, second.stdout)

    def test_json_with_timestamp(self):
        result = self.invoke('--format', 'json', 'l-class')
        self.assertIn('timestamp', json.loads(result.stdout))

    def test_traces_type1(self):
        result, obs = self.invoke_json('traces', '--type1', '4,1', '3,2')
        self.assertEqual(result.exit_code, EXIT_OK)
        self.assertEqual(obs['type1']['trace'], -5)
        self.assertEqual(obs['type1']['mult1'], 23)

    @slow
    def test_traces_type1_oracle(self):
        result, obs = self.invoke_json('traces', '--type1', '3,2', '3,2',
                                       '--oracle')
        self.assertEqual(result.exit_code, EXIT_OK)
        self.assertEqual(obs['oracle'], {'trace': '3', 'agrees': True})

    def test_traces_impossible_type(self):
        result = self.invoke('traces', '--type2', '9,1')
        self.assertEqual(result.exit_code, EXIT_INPUT)
        self.assertIn('cannot occur', result.stderr)

    def test_bwb(self):
        result, obs = self.invoke_json('bwb', '--alpha', '0,0',
                                       '--beta', '6,6,5')
        self.assertEqual(result.exit_code, EXIT_OK)
        self.assertEqual(obs['degree'], 6)
        self.assertEqual(obs['dim'], 10)
        self.assertEqual(obs['weight'], [4, 4, 3, 3, 3])

    def test_bwb_twist(self):
        result = self.invoke('bwb', '--alpha', '0,0', '--beta', '0,0,-1',
                             '--twist', '-6')
        self.assertEqual(result.exit_code, EXIT_OK)
        self.assertIn('[-6, -6, 0, 0, -1]', result.stdout)

    def test_bwb_non_dominant(self):
        result = self.invoke('bwb', '--alpha', '0,1', '--beta', '0,0,0')
        self.assertEqual(result.exit_code, EXIT_INPUT)

    def test_bwb_bad_list(self):
        result = self.runner.invoke(cli, ['bwb', '--alpha', 'a,b',
                                          '--beta', '0,0,0'])
        self.assertEqual(result.exit_code, 2)
        self.assertIn('comma-separated integers', result.stderr)

    def test_lemmas(self):
        result, obs = self.invoke_json('lemmas', '--which', 'A-tables')
        self.assertEqual(result.exit_code, EXIT_OK)
        self.assertTrue(obs['passed'])
        self.assertEqual(len(obs['claims']), 22)
        self.assertListEqual(list(obs['locations']), ['A-tables'])

    def test_lemmas_human(self):
        result = self.invoke('lemmas')
        self.assertEqual(result.exit_code, EXIT_OK)
        self.assertNotIn('FAIL', result.stdout)

    def test_l_class(self):
        result, obs = self.invoke_json('l-class', '--evaluate', '2',
                                       '--evaluate', '3')
        self.assertEqual(result.exit_code, EXIT_OK)
        self.assertEqual(obs['difference'], '[X]·(L^4) + [Y]·(-L^4)')
        self.assertDictEqual(obs['evaluations']['2'],
                             {'Gr(2,5)': 155, 'S2': 91, 'S4': 75})
        self.assertEqual(obs['evaluations']['3']['Gr(2,5)'], 1210)

    def test_l_class_no_identity(self):
        result, obs = self.invoke_json('l-class', '--no-identity')
        self.assertNotIn('derivation', obs)

    def test_sqroot(self):
        result, obs = self.invoke_json('sqroot', '--prime', '103', '--x',
                                       '4')
        self.assertEqual(result.exit_code, EXIT_OK)
        self.assertTrue(obs['is_square'])
        self.assertEqual((int(obs['root']) ** 2) % 103, 4)

    def test_sqroot_orthogonal(self):
        result, obs = self.invoke_json('sqroot', '--prime', '7',
                                       '--orthogonal', '4', '--seed', '3')
        self.assertEqual(result.exit_code, EXIT_OK)
        self.assertTrue(obs['orthogonal'])
        self.assertTrue(obs['matrix'].startswith('4 4\n'))

    def test_sqroot_needs_an_action(self):
        result = self.runner.invoke(cli, ['sqroot', '--prime', '7'])
        self.assertEqual(result.exit_code, 2)

    def test_sqroot_bad_prime(self):
        result = self.invoke('sqroot', '--prime', '8', '--x', '2')
        self.assertEqual(result.exit_code, EXIT_INPUT)
        self.assertIn('not a prime', result.stderr)

    def test_certify_identity_not_smooth(self):
        result, obs = self.invoke_json(
            'certify', '--prime', '103',
            '--matrix', get_data_path('identity10.txt'))
        self.assertEqual(result.exit_code, EXIT_FAILED)
        self.assertFalse(obs['smooth'])
        self.assertTrue(obs['orthogonal'])
        self.assertIs(obs['patches'][0]['unit_ideal'], False)

    def test_certify_bad_prime(self):
        result = self.invoke('certify', '--prime', '100')
        self.assertEqual(result.exit_code, EXIT_INPUT)

    def test_certify_missing_matrix(self):
        result = self.invoke('certify', '--matrix',
                             os.path.join(self.temp_dir.name, 'none.txt'))
        self.assertEqual(result.exit_code, EXIT_INPUT)
        self.assertIn('does not exist', result.stderr)

    def test_certify_singular_matrix(self):
        result = self.invoke('certify', '--prime', '7', '--matrix',
                             get_data_path('singular2.txt'))
        self.assertEqual(result.exit_code, EXIT_INPUT)

    @patch('grassmeet.cli.certify_smooth_gpk3',
           side_effect=BudgetExceeded('Degree 61 exceeds the budget of 60.'))
    def test_certify_budget(self, p):
        result = self.invoke('--budget-degree', '60', 'certify')
        self.assertEqual(result.exit_code, EXIT_BUDGET)
        self.assertIn('exceeds the budget', result.stderr)

    @slow
    def test_certify_tiny_budget(self):
        result, obs = self.invoke_json('--budget-degree', '1', 'certify')
        self.assertEqual(result.exit_code, EXIT_BUDGET)
        self.assertTrue(obs['inconclusive'])
        self.assertFalse(obs['smooth'])
        self.assertTrue(all(p['unit_ideal'] is None for p in obs['patches']))

    @patch('grassmeet.cli.search_orthogonal_smooth')
    def test_search_exhausted(self, p):
        attempts = pd.DataFrame({'attempt': [1, 2],
                                 'failed_chart': ['x01', 'x23']}
                                ).set_index('attempt')
        p.side_effect = SearchExhausted('No smooth instance in 2 attempts.',
                                        attempts)
        result, obs = self.invoke_json('search', '--prime', '7', '--seed',
                                       '1', '--max-attempts', '2')
        self.assertEqual(result.exit_code, EXIT_FAILED)
        self.assertFalse(obs['found'])
        self.assertListEqual(obs['attempts'], [
            {'attempt': 1, 'failed_chart': 'x01'},
            {'attempt': 2, 'failed_chart': 'x23'}])
        p.assert_called_once()
        self.assertEqual(p.call_args.args[:3], (7, 1, 2))

    def test_search_needs_seed(self):
        result = self.runner.invoke(cli, ['search', '--prime', '7'])
        self.assertEqual(result.exit_code, 2)

    def test_count_identity(self):
        result, obs = self.invoke_json(
            'count', '--prime', '2', '--g',
            get_data_path('identity10.txt'))
        self.assertEqual(result.exit_code, EXIT_OK)
        self.assertEqual(obs['n_X'], 155)
        self.assertEqual(obs['n_Q'], 155 * 91)
        self.assertEqual(obs['verdict'], 'PASS')

    def test_count_random_without_incidence(self):
        result, obs = self.invoke_json('count', '--prime', '2', '--seed',
                                       '5', '--no-incidence')
        self.assertEqual(result.exit_code, EXIT_OK)
        self.assertIsNone(obs['n_Q'])
        self.assertEqual(obs['n_X'], obs['n_Y'])

    def test_count_above_cap(self):
        result = self.invoke('count', '--prime', '11')
        self.assertEqual(result.exit_code, EXIT_BUDGET)

    def test_invalid_env(self):
        with patch.dict(os.environ, {'GRASSMEET_JOBS': 'many'}):
            result = self.invoke('traces')
        self.assertEqual(result.exit_code, EXIT_INPUT)
        self.assertIn('GRASSMEET_JOBS', result.stderr)

    def test_version(self):
        result = self.invoke('--version')
        self.assertEqual(result.exit_code, 0)


class TestDispatch(unittest.TestCase):

    def test_unknown_subcommand(self):
        with self.assertRaises(InvalidInput):
            RunConfig('frobnicate')

    def test_unknown_format(self):
        with self.assertRaises(InvalidInput):
            RunConfig('traces', output_format='xml')

    def test_dispatch_exit_code(self):
        cfg = RunConfig('traces', output_format='json', timestamp=False,
                        log_level='ERROR', options={'dtau': True})
        with patch('grassmeet.cli.click.echo') as echo:
            self.assertEqual(dispatch(cfg), 0)
        obs = json.loads(echo.call_args.args[0])
        self.assertEqual(obs['dtau'], -1)

    def test_failure_reported_once_on_stderr(self):
        cfg = RunConfig('count', prime=11, output_format='json',
                        timestamp=False, log_level='ERROR')
        with patch('grassmeet.cli.click.echo') as echo, \
                patch('grassmeet.cli.LOGGER') as logger:
            self.assertEqual(dispatch(cfg), EXIT_BUDGET)
        echo.assert_called_once()
        self.assertTrue(echo.call_args.kwargs['err'])
        logger.error.assert_not_called()

    def test_unexpected_errors_propagate(self):
        cfg = RunConfig('traces', log_level='ERROR', options={'all': True})
        with patch('grassmeet.cli.trace_dtau', side_effect=KeyError('x')):
            with self.assertRaises(KeyError):
                dispatch(cfg)


if __name__ == "__main__":
    unittest.main()
