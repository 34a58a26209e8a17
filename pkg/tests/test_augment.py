import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from symrec.augment import multiply, rotate, rotate_recording, rotation_angles
from symrec.errors import ParameterError

from conftest import rec_from_strokes, recordings


def pairwise_distances(rec):
    pts = rec.point_array()[:, :2]
    return np.hypot(*(pts[:, None, :] - pts[None, :, :]).transpose(2, 0, 1))


class TestMultiply:
    def test_identity_count(self):
        recs = [rec_from_strokes([[0, 0, 0]], label="a") for _ in range(3)]
        assert len(multiply(recs, 1)) == 3

    def test_twenty_fold(self):
        recs = [rec_from_strokes([[i, 0, 0]], label="a") for i in range(3)]
        assert len(multiply(recs, 20)) == 60

    def test_labels_preserved_on_copies(self):
        recs = [
            rec_from_strokes([[0, 0, 0]], label="x"),
            rec_from_strokes([[1, 1, 1]], label="y"),
        ]
        out = multiply(recs, 3)
        assert [r.label for r in out] == ["x", "y"] * 3

    def test_copies_are_deep(self):
        rec = rec_from_strokes([[0, 0, 0]], label="x")
        out = multiply([rec], 2)
        assert out[0] == rec and out[0] is not rec

    def test_zero_rejected(self):
        with pytest.raises(ParameterError):
            multiply([rec_from_strokes([[0, 0, 0]])], 0)


class TestRotate:
    def test_zero_rotation_is_identity(self):
        rec = rec_from_strokes([[0, 0, 0], [10, 4, 1]], label="z")
        out = rotate([rec], 0, 0, 1)
        assert len(out) == 2
        assert np.allclose(out[1].point_array(), rec.point_array(), atol=1e-9)

    def test_symmetric_pair_triples_dataset(self):
        recs = [rec_from_strokes([[0, 0, 0], [10, 0, 1]], label="a")]
        out = rotate(recs, -3, 3, 2)
        assert len(out) == 3
        assert rotation_angles(-3, 3, 2) == [-3, 3]

    def test_rotation_composes_to_identity(self):
        rec = rec_from_strokes([[0, 0, 0], [10, 4, 1], [3, 9, 2]], label="z")
        variant = rotate([rec], 7, 7, 1)[1]
        back = rotate([variant], -7, -7, 1)[1]
        assert np.allclose(back.point_array(), rec.point_array(), atol=1e-9)

    def test_timestamps_unchanged(self):
        rec = rec_from_strokes([[0, 0, 5], [10, 4, 17]])
        out = rotate_recording(rec, 13)
        assert np.array_equal(out.point_array()[:, 2], rec.point_array()[:, 2])

    def test_large_angle_warns(self):
        with pytest.warns(UserWarning):
            rotate([rec_from_strokes([[0, 0, 0]])], -30, 30, 2)

    def test_angle_grid(self):
        assert rotation_angles(-4, 4, 3) == [-4, 0, 4]
        assert rotation_angles(-4, 4, 1) == [0]

    @settings(max_examples=40)
    @given(recordings(), st.floats(min_value=-20, max_value=20))
    def test_pairwise_distances_preserved(self, rec, angle):
        rotated = rotate_recording(rec, angle)
        assert np.allclose(
            pairwise_distances(rotated), pairwise_distances(rec), atol=1e-9
        )

    @settings(max_examples=40)
    @given(recordings(), st.floats(min_value=-20, max_value=20))
    def test_center_of_mass_fixed(self, rec, angle):
        before = rec.point_array()[:, :2].mean(axis=0)
        after = rotate_recording(rec, angle).point_array()[:, :2].mean(axis=0)
        assert np.allclose(before, after, atol=1e-9)

    @settings(max_examples=20)
    @given(recordings())
    def test_originals_not_mutated(self, rec):
        snapshot = rec.point_array().copy()
        rotate([rec], -5, 5, 2)
        multiply([rec], 2)
        assert np.array_equal(rec.point_array(), snapshot)
