import json

import numpy as np
import pytest
from hypothesis import given, settings

from symrec.errors import (
    RecordingParseError,
    RecordingStructureError,
    RecordingValueError,
)
from symrec.recording import (
    Recording,
    Stroke,
    SymbolTable,
    bounding_box,
    parse_recording,
    serialize_recording,
)

from conftest import rec_from_strokes, recordings


class TestParse:
    def test_sample_capture_structure(self, sample_json):
        rec = parse_recording(sample_json)
        assert len(rec.strokes) == 2
        assert rec.point_count() == 145

    def test_minimal_recording(self):
        rec = parse_recording('[[{"x":0,"y":0,"time":0}]]')
        assert len(rec.strokes) == 1
        assert len(rec.strokes[0]) == 1
        assert rec.strokes[0].points[0].tolist() == [0.0, 0.0, 0.0]

    def test_empty_recording_rejected(self):
        with pytest.raises(RecordingStructureError):
            parse_recording("[]")

    def test_empty_stroke_rejected(self):
        with pytest.raises(RecordingStructureError):
            parse_recording('[[{"x":0,"y":0,"time":0}],[]]')

    def test_malformed_json(self):
        with pytest.raises(RecordingParseError):
            parse_recording("not json at all")

    @pytest.mark.parametrize(
        "body",
        [
            '[[{"x":"a","y":0,"time":0}]]',
            '[[{"x":0,"y":true,"time":0}]]',
            '[[{"x":0,"y":0,"time":-5}]]',
            '[[{"x":NaN,"y":0,"time":0}]]',
        ],
    )
    def test_bad_values(self, body):
        with pytest.raises(RecordingValueError):
            parse_recording(body)

    def test_missing_key(self):
        with pytest.raises(RecordingStructureError):
            parse_recording('[[{"x":0,"y":0}]]')

    def test_point_must_be_an_object(self):
        with pytest.raises(RecordingStructureError):
            parse_recording("[[[1, 2, 3]]]")

    def test_extra_keys_ignored(self):
        rec = parse_recording('[[{"x":1,"y":2,"time":3,"pressure":0.5}]]')
        assert rec.point_count() == 1

    def test_order_preserved(self, sample_json, sample_raw):
        rec = parse_recording(sample_json)
        for stroke, raw_stroke in zip(rec.strokes, sample_raw):
            for point, raw_point in zip(stroke.points, raw_stroke):
                assert point[0] == raw_point["x"]
                assert point[1] == raw_point["y"]
                assert point[2] == raw_point["time"]


class TestSerialize:
    def test_minimal(self):
        rec = rec_from_strokes([[0, 0, 0]])
        assert serialize_recording(rec) == '[[{"x":0,"y":0,"time":0}]]'

    def test_key_order(self):
        text = serialize_recording(rec_from_strokes([[1, 2, 3]]))
        assert text.index('"x"') < text.index('"y"') < text.index('"time"')

    def test_sample_round_trip(self, sample_json):
        rec = parse_recording(sample_json)
        again = parse_recording(serialize_recording(rec))
        assert again == rec
        assert again.point_count() == 145

    def test_fractional_values_round_trip(self):
        rec = rec_from_strokes([[0.123456789012345, -7.25, 3.5], [1e-9, 2.0, 4.0]])
        assert parse_recording(serialize_recording(rec)) == rec

    def test_pen_down_round_trip(self):
        stroke = Stroke([[0, 0, 0], [1, 1, 1]], pen_down=[True, False])
        rec = Recording([stroke])
        again = parse_recording(serialize_recording(rec))
        assert again.strokes[0].pen_down is not None
        assert again == rec

    @settings(max_examples=100)
    @given(recordings())
    def test_round_trip_property(self, rec):
        assert parse_recording(serialize_recording(rec)) == rec

    @settings(max_examples=50)
    @given(recordings())
    def test_point_count_conserved(self, rec):
        assert parse_recording(serialize_recording(rec)).point_count() == rec.point_count()


class TestBoundingBox:
    def test_single_point(self):
        assert bounding_box(rec_from_strokes([[5, 7, 0]])) == (5, 7, 5, 7)

    def test_two_points(self):
        assert bounding_box(rec_from_strokes([[0, 0, 0], [10, 8, 1]])) == (0, 0, 10, 8)

    def test_sample_capture(self, sample_json, sample_raw):
        # oracle: brute-force scan of the raw JSON points
        xs = [p["x"] for stroke in sample_raw for p in stroke]
        ys = [p["y"] for stroke in sample_raw for p in stroke]
        expected = (min(xs), min(ys), max(xs), max(ys))
        assert expected == (524, 596, 706, 742)
        assert bounding_box(parse_recording(sample_json)) == expected

    @settings(max_examples=50)
    @given(recordings())
    def test_invariant_under_reordering(self, rec):
        box = bounding_box(rec)
        reversed_strokes = Recording(
            [Stroke(s.points[::-1]) for s in reversed(rec.strokes)]
        )
        assert bounding_box(reversed_strokes) == box


class TestTypes:
    def test_stroke_requires_points(self):
        with pytest.raises(RecordingStructureError):
            Stroke(np.zeros((0, 3)))

    def test_stroke_is_immutable(self):
        stroke = Stroke([[0, 0, 0]])
        with pytest.raises(ValueError):
            stroke.points[0, 0] = 1.0

    def test_recording_requires_strokes(self):
        with pytest.raises(RecordingStructureError):
            Recording([])

    def test_symbol_table(self):
        table = SymbolTable.from_commands(["\\beta", "\\alpha", "\\beta"])
        assert len(table) == 2
        assert table.command_for(0) == "\\alpha"
        assert table.id_for("\\beta") == 1

    def test_symbol_table_rejects_duplicate_commands(self):
        with pytest.raises(RecordingStructureError):
            SymbolTable({0: "a", 1: "a"})
