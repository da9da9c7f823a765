import json
import os
import tempfile
from io import StringIO

from django.core.management import CommandError, call_command
from django.test import SimpleTestCase

from evaluation.scores import ScoreRecord, write_scores_csv


def sample_records(method_id, genuine, imposter):
    records = [ScoreRecord(method_id, f'g{i}', f'e{i}', True, s)
               for i, s in enumerate(genuine)]
    records += [ScoreRecord(method_id, f'i{i}', f'f{i}', False, s)
                for i, s in enumerate(imposter)]
    return records


class EvaluateCommandTests(SimpleTestCase):
    """Test the evaluate command"""

    def setUp(self):
        self._tmp = tempfile.TemporaryDirectory()
        self.tmp = self._tmp.name

    def tearDown(self):
        self._tmp.cleanup()

    def path(self, name):
        return os.path.join(self.tmp, name)

    def evaluate(self, *scores, **options):
        stdout = StringIO()
        call_command('evaluate', *scores, output=self.path('metrics.json'),
                     stdout=stdout, **options)
        with open(self.path('metrics.json')) as handle:
            return json.load(handle), stdout.getvalue()

    def test_six_scores(self):
        """Test the hand-computed EER of a six-score file"""
        scores = write_scores_csv(self.path('hdbif.csv'), sample_records(
            'HDBIF', [0.1, 0.3, 0.5], [0.4, 0.6, 0.8]))

        data, stdout = self.evaluate(scores, table=self.path('table.txt'))

        method = data['methods']['HDBIF']
        self.assertEqual(data['protocol'], 'discard')
        self.assertAlmostEqual(method['eer'], 1 / 3)
        self.assertAlmostEqual(method['auc'], 8 / 9)
        self.assertAlmostEqual(method['dprime'], 1.5)
        with open(self.path('table.txt')) as handle:
            self.assertIn(handle.read(), stdout)

    def test_nonmatch_protocol(self):
        """Test that failures become sentinel scores"""
        scores = write_scores_csv(self.path('arc.csv'), sample_records(
            'ArcIris', [0.1, None], [2.0, 2.5]))

        discard, _ = self.evaluate(scores)
        nonmatch, _ = self.evaluate(scores, protocol='nonmatch')

        self.assertEqual(discard['methods']['ArcIris']['counts'],
                         {'genuine': 1, 'imposter': 2, 'failed': 1})
        self.assertEqual(nonmatch['methods']['ArcIris']['counts'],
                         {'genuine': 2, 'imposter': 2, 'failed': 1})
        self.assertEqual(nonmatch['methods']['ArcIris']['fnmr_at_fmr']
                         ['0.01'], 0.5)

    def test_intersection_protocol(self):
        """Test method exclusion across several files"""
        good = write_scores_csv(self.path('good.csv'), sample_records(
            'HDBIF', [0.1, 0.2], [0.6, 0.7]))
        bad = write_scores_csv(self.path('bad.csv'), sample_records(
            'CRYPTS', [None, 0.2], [None, 0.7]))

        data, _ = self.evaluate(good, bad, protocol='intersection')

        self.assertEqual(list(data['methods']), ['HDBIF'])
        self.assertEqual(data['excluded'], {'CRYPTS': 0.5})

    def test_rank_k(self):
        """Test identification accuracy from candidate lists"""
        scores = write_scores_csv(self.path('hdbif.csv'), sample_records(
            'HDBIF', [0.1], [0.6]))
        with open(self.path('candidates.csv'), 'w') as handle:
            handle.write('probe_id,rank,identity_id,score\n'
                         'p1,1,b,0.3\np1,2,a,0.4\n')
        with open(self.path('mates.csv'), 'w') as handle:
            handle.write('probe_id,identity_id\np1,a\n')

        data, _ = self.evaluate(scores, candidates=self.path('candidates.csv'),
                                mates=self.path('mates.csv'))

        rank_k = data['methods']['HDBIF']['rank_k']
        self.assertEqual(rank_k['1'], {'mated': 0.0, 'all': 0.0})
        self.assertEqual(rank_k['5'], {'mated': 1.0, 'all': 1.0})

    def test_candidates_need_mates(self):
        """Test that Rank-k inputs come in pairs"""
        scores = write_scores_csv(self.path('hdbif.csv'), sample_records(
            'HDBIF', [0.1], [0.6]))

        with self.assertRaises(CommandError) as context:
            self.evaluate(scores, candidates=scores)

        self.assertEqual(context.exception.returncode, 1)

    def test_missing_scores(self):
        """Test that a missing score file is a validation error"""
        with self.assertRaises(CommandError) as context:
            self.evaluate(self.path('absent.csv'))

        self.assertEqual(context.exception.returncode, 1)

    def test_one_sided_scores(self):
        """Test that a file without imposters is a processing error"""
        scores = write_scores_csv(self.path('hdbif.csv'), sample_records(
            'HDBIF', [0.1], []))

        with self.assertRaises(CommandError) as context:
            self.evaluate(scores)

        self.assertEqual(context.exception.returncode, 2)


class ParityCommandTests(SimpleTestCase):
    """Test the parity command"""

    def test_same_file(self):
        """Test that a file agrees perfectly with itself"""
        with tempfile.TemporaryDirectory() as tmp:
            scores = write_scores_csv(
                os.path.join(tmp, 'scores.csv'),
                sample_records('HDBIF', [0.1, 0.2, 0.3], [0.6, 0.7, 0.9]))
            output = os.path.join(tmp, 'parity.json')
            histogram = os.path.join(tmp, 'histogram.csv')

            call_command('parity', scores, scores, output=output,
                         histogram=histogram, histogram_bins=4,
                         stdout=StringIO())

            with open(output) as handle:
                data = json.load(handle)
            self.assertTrue(os.path.isfile(histogram))

        for side in ('genuine', 'imposter'):
            self.assertEqual(data['parity'][side]['mad'], 0.0)
            self.assertEqual(data['parity'][side]['r2'], 1.0)
        self.assertEqual(sum(data['histogram']['counts']), 6)
        self.assertEqual(len(data['histogram']['edges']), 5)
