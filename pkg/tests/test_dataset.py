import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from symrec.dataset import (
    load_corpus,
    load_labels_csv,
    load_recordings_jsonl,
    save_labels_csv,
    save_recordings_jsonl,
    split_dataset,
)
from symrec.errors import ParameterError
from symrec.synth import SYMBOL_COMMANDS, make_dataset

from conftest import rec_from_strokes


@pytest.fixture
def corpus_files(tmp_path):
    recordings, labels = make_dataset(per_class=6, seed=1)
    data = tmp_path / "data.jsonl"
    save_recordings_jsonl(recordings, data)
    label_path = tmp_path / "data.labels.csv"
    save_labels_csv({i + 1: label for i, label in enumerate(labels)}, label_path)
    return data, label_path


class TestIO:
    def test_jsonl_round_trip(self, tmp_path):
        recordings, _ = make_dataset(per_class=2, seed=0)
        path = tmp_path / "r.jsonl"
        save_recordings_jsonl(recordings, path)
        again = load_recordings_jsonl(path)
        assert len(again) == len(recordings)
        assert [r.id for r in again] == list(range(1, len(recordings) + 1))
        assert all(a == b for a, b in zip(again, recordings))

    def test_labels_round_trip(self, tmp_path):
        labels = {1: "a", 2: "\\sum", 3: "b"}
        path = tmp_path / "labels.csv"
        save_labels_csv(labels, path)
        assert load_labels_csv(path) == labels

    def test_load_corpus(self, corpus_files):
        corpus = load_corpus(*corpus_files)
        assert len(corpus.recordings) == 30
        assert len(corpus.symbols) == len(SYMBOL_COMMANDS)
        assert all(r.label is not None for r in corpus.recordings)

    def test_unlabeled_rows_dropped_with_warning(self, tmp_path):
        recordings, labels = make_dataset(per_class=2, seed=0)
        data = tmp_path / "d.jsonl"
        save_recordings_jsonl(recordings, data)
        label_path = tmp_path / "d.labels.csv"
        save_labels_csv({1: labels[0]}, label_path)
        with pytest.warns(UserWarning):
            corpus = load_corpus(data, label_path)
        assert len(corpus.recordings) == 1


class TestSplit:
    def test_eighty_ten_ten(self):
        recs = [rec_from_strokes([[i, 0, 0]], label="s") for i in range(100)]
        splits = split_dataset(recs, (0.8, 0.1, 0.1), seed=0)
        assert (len(splits.train), len(splits.validation), len(splits.test)) == (80, 10, 10)

    def test_same_seed_same_split(self):
        recordings, labels = make_dataset(per_class=10, seed=2)
        for rec, label in zip(recordings, labels):
            rec.label = label
        a = split_dataset(recordings, seed=7)
        b = split_dataset(recordings, seed=7)
        assert [r.id for r in a.train] == [r.id for r in b.train]
        assert [id(r) for r in a.test] == [id(r) for r in b.test]

    def test_stratification(self):
        recs = []
        for label, count in (("a", 40), ("b", 20), ("c", 10)):
            recs.extend(rec_from_strokes([[i, 0, 0]], label=label) for i in range(count))
        splits = split_dataset(recs, (0.8, 0.1, 0.1), seed=3)
        for label, count in (("a", 40), ("b", 20), ("c", 10)):
            in_train = sum(1 for r in splits.train if r.label == label)
            assert abs(in_train - 0.8 * count) <= 1

    def test_rare_symbol_goes_to_train(self):
        recs = [rec_from_strokes([[0, 0, 0]], label="rare")]
        recs += [rec_from_strokes([[i, 0, 0]], label="common") for i in range(30)]
        with pytest.warns(UserWarning):
            splits = split_dataset(recs, (0.8, 0.1, 0.1), seed=0)
        assert sum(1 for r in splits.train if r.label == "rare") == 1

    def test_bad_fractions(self):
        recs = [rec_from_strokes([[0, 0, 0]], label="a")]
        with pytest.raises(ParameterError):
            split_dataset(recs, (0.5, 0.2, 0.2), seed=0)

    @settings(max_examples=25)
    @given(st.integers(min_value=0, max_value=10_000))
    def test_disjoint_and_covering(self, seed):
        recordings, labels = make_dataset(per_class=9, seed=4)
        labeled = []
        for i, (rec, label) in enumerate(zip(recordings, labels)):
            labeled.append(
                rec_from_strokes([[i, 0, 0], [i, 1, 1]], label=label).replace(rec.strokes)
            )
        for i, rec in enumerate(labeled):
            rec.id = i + 1
        splits = split_dataset(labeled, (0.7, 0.2, 0.1), seed=seed)
        ids = [r.id for part in splits for r in part]
        assert sorted(ids) == list(range(1, len(labeled) + 1))
