import math

import numpy as np
import pytest
from hypothesis import given, settings

from symrec.errors import ConfigError, ParameterError
from symrec.features import (
    AspectRatio,
    Bitmap,
    CenterOfMass,
    ConstantPointCoordinates,
    Curvature,
    Direction,
    FirstNPoints,
    Height,
    Ink,
    ReCurvature,
    Standardization,
    StrokeCenter,
    StrokeCount,
    StrokeIntersections,
    Time,
    Width,
    apply_standardization,
    compose,
    feature_from_config,
    fit_standardization,
    point_curvatures,
    point_directions,
    spec_list_hash,
    total_dimension,
)
from symrec.recording import Recording, Stroke, parse_recording

from conftest import rec_from_strokes, recordings

BASELINE_SPECS = [ConstantPointCoordinates(strokes=4, points_per_stroke=20)]
OPTIMIZED_SPECS = [
    ConstantPointCoordinates(strokes=4, points_per_stroke=20),
    ReCurvature(strokes=4),
    Ink(),
    StrokeCount(),
    AspectRatio(),
]


class TestConstantPointCoordinates:
    def test_default_dimension(self):
        assert ConstantPointCoordinates().dimension == 160

    def test_pen_down_variant_dimension(self):
        spec = ConstantPointCoordinates(strokes=0, points_per_stroke=20, pen_down=True)
        assert spec.dimension == 60

    def test_fill_rule(self):
        spec = ConstantPointCoordinates(strokes=4, points_per_stroke=2)
        vec = spec.compute(rec_from_strokes([[1, 2, 0], [3, 4, 1]]))
        assert vec.tolist() == [1, 2, 3, 4] + [0] * 12

    def test_custom_fill_value(self):
        spec = ConstantPointCoordinates(strokes=2, points_per_stroke=1, fill_empty_with=9)
        vec = spec.compute(rec_from_strokes([[1, 2, 0]]))
        assert vec.tolist() == [1, 2, 9, 9]

    def test_flattened_pen_down_layout(self):
        stroke = Stroke([[1, 2, 0], [3, 4, 1]], pen_down=[True, False])
        spec = ConstantPointCoordinates(strokes=0, points_per_stroke=3, pen_down=True)
        vec = spec.compute(Recording([stroke]))
        assert vec.tolist() == [1, 2, 1, 3, 4, 0, 0, 0, 0]

    def test_truncation_order(self):
        # strokes in drawing order, points in temporal order
        spec = ConstantPointCoordinates(strokes=1, points_per_stroke=1)
        vec = spec.compute(rec_from_strokes([[7, 8, 0], [9, 9, 1]], [[1, 1, 2]]))
        assert vec.tolist() == [7, 8]


class TestReCurvature:
    def test_horizontal_stroke_zero(self):
        vec = ReCurvature(strokes=1).compute(rec_from_strokes([[0, 0, 0], [9, 0, 1]]))
        assert vec.tolist() == [0.0]

    def test_vertical_unit_stroke(self):
        vec = ReCurvature(strokes=1).compute(rec_from_strokes([[0, 0, 0], [0, 1, 1]]))
        assert vec.tolist() == [1.0]

    def test_missing_strokes_zero_filled(self):
        vec = ReCurvature(strokes=4).compute(rec_from_strokes([[0, 0, 0], [0, 2, 1]]))
        assert vec.tolist() == [1.0, 0.0, 0.0, 0.0]

    def test_single_point_stroke_zero(self):
        vec = ReCurvature(strokes=1).compute(rec_from_strokes([[5, 5, 0]]))
        assert vec.tolist() == [0.0]

    def test_scale_invariant(self):
        pts = [[0, 0, 0], [3, 7, 1], [1, 9, 2]]
        small = ReCurvature(strokes=1).compute(rec_from_strokes(pts))
        big = ReCurvature(strokes=1).compute(
            rec_from_strokes([[10 * x, 10 * y, t] for x, y, t in pts])
        )
        assert np.allclose(small, big)


class TestInk:
    def test_dot_has_no_ink(self):
        assert Ink().compute(rec_from_strokes([[4, 4, 0]])).tolist() == [0.0]

    def test_three_four_five(self):
        assert Ink().compute(rec_from_strokes([[0, 0, 0], [3, 4, 1]])).tolist() == [5.0]

    def test_additive_over_strokes(self):
        rec = rec_from_strokes([[0, 0, 0], [2, 0, 1]], [[5, 5, 2], [5, 7, 3]])
        assert Ink().compute(rec).tolist() == [4.0]

    def test_translation_invariant(self):
        pts = [[0, 0, 0], [3, 4, 1], [6, 0, 2]]
        shifted = [[x + 100, y - 50, t] for x, y, t in pts]
        assert np.allclose(
            Ink().compute(rec_from_strokes(pts)),
            Ink().compute(rec_from_strokes(shifted)),
        )

    def test_scales_linearly(self):
        pts = [[0, 0, 0], [3, 4, 1], [6, 0, 2]]
        scaled = [[7 * x, 7 * y, t] for x, y, t in pts]
        assert np.allclose(
            7 * Ink().compute(rec_from_strokes(pts)),
            Ink().compute(rec_from_strokes(scaled)),
        )

    def test_pen_up_segments_carry_no_ink(self):
        stroke = Stroke(
            [[0, 0, 0], [3, 4, 1], [6, 8, 2]], pen_down=[True, True, False]
        )
        assert Ink().compute(Recording([stroke])).tolist() == [5.0]


class TestSimpleScalars:
    def test_stroke_count(self, sample_json):
        assert StrokeCount().compute(rec_from_strokes([[0, 0, 0]])).tolist() == [1.0]
        assert StrokeCount().compute(parse_recording(sample_json)).tolist() == [2.0]

    def test_aspect_ratio_dot(self):
        assert AspectRatio().compute(rec_from_strokes([[5, 5, 0]])).tolist() == [1.0]

    def test_aspect_ratio_unit_box(self):
        rec = rec_from_strokes([[0, 0, 0], [1, 1, 1]])
        assert AspectRatio().compute(rec).tolist() == [1.0]

    def test_aspect_ratio_two_to_one(self):
        rec = rec_from_strokes([[0, 0, 0], [2, 1, 1]])
        assert np.allclose(AspectRatio().compute(rec), [2.01 / 1.01])

    def test_width_of_dot(self):
        assert Width().compute(rec_from_strokes([[2, 3, 0]])).tolist() == [0.0]

    def test_center_of_mass_of_dot(self):
        assert CenterOfMass().compute(rec_from_strokes([[2, 3, 0]])).tolist() == [2, 3]

    def test_time_span(self):
        rec = rec_from_strokes([[0, 0, 0], [4, 0, 100]])
        assert Time().compute(rec).tolist() == [100.0]
        assert Height().compute(rec).tolist() == [0.0]

    def test_stroke_center(self):
        rec = rec_from_strokes([[0, 0, 0], [4, 2, 1]])
        vec = StrokeCenter(strokes=2).compute(rec)
        assert vec.tolist() == [2, 1, 0, 0]

    def test_first_n_points(self):
        rec = rec_from_strokes([[1, 2, 0]], [[3, 4, 1]])
        assert FirstNPoints(n=3).compute(rec).tolist() == [1, 2, 3, 4, 0, 0]


class TestBitmap:
    def test_dot_single_cell(self):
        assert Bitmap(n=1).compute(rec_from_strokes([[7, 7, 0]])).tolist() == [1.0]

    def test_horizontal_line_lights_middle_row(self):
        # hand-checked oracle: a width-spanning horizontal line with a flat
        # box maps every point to the center row of a 3x3 grid
        rec = rec_from_strokes([[0, 5, 0], [10, 5, 1]])
        grid = Bitmap(n=3).compute(rec).reshape(3, 3)
        assert grid[1].tolist() == [1, 1, 1]
        assert grid[0].tolist() == [0, 0, 0]
        assert grid[2].tolist() == [0, 0, 0]

    def test_diagonal_hits_both_corners(self):
        rec = rec_from_strokes([[0, 0, 0], [10, 10, 1]])
        grid = Bitmap(n=4).compute(rec).reshape(4, 4)
        assert grid[0, 0] == 1 and grid[3, 3] == 1
        assert grid[0, 3] == 0 and grid[3, 0] == 0

    def test_values_binary(self):
        rec = rec_from_strokes([[0, 0, 0], [10, 3, 1], [2, 9, 2]])
        vec = Bitmap(n=32).compute(rec)
        assert vec.shape == (1024,)
        assert set(np.unique(vec)) <= {0.0, 1.0}


class TestStrokeIntersections:
    def test_crossing_plus(self):
        horizontal = [[0, 5, 0], [10, 5, 1]]
        vertical = [[5, 0, 2], [5, 10, 3]]
        vec = StrokeIntersections(strokes=2).compute(
            rec_from_strokes(horizontal, vertical)
        )
        # layout: (0,0), (0,1), (1,1)
        assert vec.tolist() == [0, 1, 0]

    def test_parallel_equals_sign(self):
        a = [[0, 0, 0], [10, 0, 1]]
        b = [[0, 5, 2], [10, 5, 3]]
        vec = StrokeIntersections(strokes=2).compute(rec_from_strokes(a, b))
        assert vec.tolist() == [0, 0, 0]

    def test_dimension_for_four_strokes(self):
        assert StrokeIntersections(strokes=4).dimension == 10

    def test_self_intersection_counted_once(self):
        # a closed bow: segments 0-1 and 2-3 properly cross
        pts = [[0, 0, 0], [10, 10, 1], [10, 0, 2], [0, 10, 3]]
        vec = StrokeIntersections(strokes=1).compute(rec_from_strokes(pts))
        assert vec.tolist() == [1]

    def test_shared_endpoints_not_counted(self):
        # consecutive segments share a point; no proper crossing
        pts = [[0, 0, 0], [5, 5, 1], [10, 0, 2]]
        vec = StrokeIntersections(strokes=1).compute(rec_from_strokes(pts))
        assert vec.tolist() == [0]


class TestDirectionCurvature:
    def test_straight_rightward(self):
        xy = np.array([[0, 0], [1, 0], [2, 0], [3, 0], [4, 0]], dtype=float)
        d = point_directions(xy)
        assert np.allclose(d[1:-1], [[1, 0], [1, 0], [1, 0]])
        assert np.allclose(d[0], [0, 0]) and np.allclose(d[-1], [0, 0])
        assert np.allclose(point_curvatures(xy), 0)

    def test_square_corner_turns_ninety_degrees(self):
        xy = np.array([[0, 0], [1, 0], [2, 0], [2, 1], [2, 2]], dtype=float)
        phi = point_curvatures(xy)
        assert np.allclose(phi[2], math.pi / 2)

    def test_coincident_neighbours_zero(self):
        xy = np.array([[1, 1], [2, 2], [1, 1]], dtype=float)
        assert np.allclose(point_directions(xy), 0)

    def test_vectorized_specs_dimensions(self):
        rec = rec_from_strokes([[i, 0, i] for i in range(6)])
        assert Direction(strokes=2, points_per_stroke=5).compute(rec).shape == (20,)
        assert Curvature(strokes=2, points_per_stroke=5).compute(rec).shape == (10,)


class TestCompose:
    def test_baseline_dimension(self):
        assert total_dimension(BASELINE_SPECS) == 160

    def test_optimized_dimension(self):
        assert total_dimension(OPTIMIZED_SPECS) == 167

    def test_concatenation_order(self):
        rec = rec_from_strokes([[0, 0, 0], [3, 4, 1]])
        vec = compose(rec, [StrokeCount(), Ink()])
        assert vec.tolist() == [1.0, 5.0]
        vec = compose(rec, [Ink(), StrokeCount()])
        assert vec.tolist() == [5.0, 1.0]

    def test_empty_list_rejected(self):
        with pytest.raises(ConfigError):
            compose(rec_from_strokes([[0, 0, 0]]), [])

    def test_unknown_feature_rejected(self):
        with pytest.raises(ConfigError):
            feature_from_config("HatFeature", {})

    def test_unknown_parameter_rejected(self):
        with pytest.raises(ConfigError):
            feature_from_config("Ink", {"sparkles": 1})

    def test_spec_hash_is_order_sensitive(self):
        a = [StrokeCount(), Ink()]
        b = [Ink(), StrokeCount()]
        assert spec_list_hash(a) != spec_list_hash(b)
        assert spec_list_hash(a) == spec_list_hash([StrokeCount(), Ink()])

    @settings(max_examples=150)
    @given(recordings())
    def test_computed_dimension_matches_declared(self, rec):
        specs = OPTIMIZED_SPECS + [
            Bitmap(n=5),
            StrokeIntersections(strokes=3),
            Direction(strokes=2, points_per_stroke=4),
            Curvature(strokes=2, points_per_stroke=4),
            StrokeCenter(strokes=2),
            Width(),
            Height(),
            Time(),
            CenterOfMass(),
            FirstNPoints(n=7),
            ConstantPointCoordinates(strokes=0, points_per_stroke=5, pen_down=True),
        ]
        vec = compose(rec, specs)
        assert vec.shape == (total_dimension(specs),)
        assert np.all(np.isfinite(vec))

    def test_dimensions_hold_over_a_thousand_random_recordings(self):
        # every feature kind, 1000 seeded random recordings
        from symrec.recording import Recording, Stroke

        specs = [
            ConstantPointCoordinates(strokes=3, points_per_stroke=6),
            ConstantPointCoordinates(strokes=0, points_per_stroke=6, pen_down=True),
            FirstNPoints(n=5),
            StrokeCount(),
            Bitmap(n=4),
            Ink(),
            AspectRatio(),
            Width(),
            Height(),
            Time(),
            CenterOfMass(),
            StrokeCenter(strokes=3),
            StrokeIntersections(strokes=3),
            ReCurvature(strokes=3),
            Direction(strokes=3, points_per_stroke=6),
            Curvature(strokes=3, points_per_stroke=6),
        ]
        expected = total_dimension(specs)
        rng = np.random.default_rng(12345)
        for _ in range(1000):
            strokes = []
            for _ in range(rng.integers(1, 5)):
                n = int(rng.integers(1, 9))
                pts = np.column_stack(
                    [
                        rng.uniform(-50, 50, n),
                        rng.uniform(-50, 50, n),
                        np.sort(rng.integers(0, 1000, n)),
                    ]
                ).astype(float)
                strokes.append(Stroke(pts))
            vec = compose(Recording(strokes), specs)
            assert vec.shape == (expected,)
            assert np.all(np.isfinite(vec))


class TestStandardization:
    def test_two_point_example(self):
        std = fit_standardization(np.array([[1.0], [3.0]]))
        assert std.mean.tolist() == [2.0] and std.scale.tolist() == [2.0]
        assert apply_standardization(std, np.array([3.0])).tolist() == [0.5]

    def test_constant_column_guarded(self):
        std = fit_standardization(np.array([[7.0, 1.0], [7.0, 3.0]]))
        out = apply_standardization(std, np.array([[7.0, 2.0]]))
        assert out[0, 0] == 0.0

    def test_mode_none_is_identity(self):
        x = np.array([[1.0, 2.0], [3.0, 4.0]])
        std = fit_standardization(x, mode="none")
        assert np.array_equal(apply_standardization(std, x), x)

    def test_mean_only(self):
        x = np.array([[1.0], [3.0]])
        std = fit_standardization(x, mode="mean_only")
        assert apply_standardization(std, x).tolist() == [[-1.0], [1.0]]

    def test_training_set_statistics(self):
        rng = np.random.default_rng(0)
        x = rng.normal(size=(50, 7)) * rng.uniform(0.5, 20, size=7)
        x[:, 3] = 4.2  # constant dimension
        std = fit_standardization(x)
        out = apply_standardization(std, x)
        assert np.all(np.abs(out.mean(axis=0)) < 1e-9)
        ranges = out.max(axis=0) - out.min(axis=0)
        assert np.all(ranges <= 1 + 1e-9)

    def test_round_trip_dict(self):
        std = fit_standardization(np.array([[1.0, 5.0], [3.0, 5.0]]))
        again = Standardization.from_dict(std.to_dict())
        assert np.array_equal(std.mean, again.mean)
        assert np.array_equal(std.scale, again.scale)
        assert std.mode == again.mode

    def test_bad_mode_rejected(self):
        with pytest.raises(ParameterError):
            fit_standardization(np.zeros((2, 2)), mode="whiten")
