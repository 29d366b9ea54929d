"""Preprocessing, mock backend, and the strict threshold rule."""

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from ltcgif.errors import ParseError
from ltcgif.scoring import (
    DEFAULT_LABELS,
    EventQuery,
    LabelSet,
    MockBackend,
    PreprocessSpec,
    ScoreVector,
    load_mock_schedule,
    matches,
    preprocess,
    write_mock_schedule,
)


def solid(w, h, color):
    return np.full((h, w, 3), color, np.uint8)


class TestPreprocess:
    def test_wide_input_center_crops_then_resizes(self):
        img = np.zeros((90, 160, 3), np.uint8)
        img[:, 35:125] = 255  # the center 90x90 square
        out = preprocess(img, PreprocessSpec())
        assert out.shape == (244, 244, 3)
        assert out.mean() > 250  # only the bright center square survives the crop

    def test_target_sized_input_unchanged(self):
        rng = np.random.default_rng(0)
        img = rng.integers(0, 256, (244, 244, 3), dtype=np.uint8)
        np.testing.assert_array_equal(preprocess(img), img)

    def test_idempotent_on_target_size(self):
        rng = np.random.default_rng(1)
        img = rng.integers(0, 256, (100, 220, 3), dtype=np.uint8)
        once = preprocess(img)
        np.testing.assert_array_equal(preprocess(once), once)

    def test_solid_color_invariant(self):
        out = preprocess(solid(160, 90, (12, 200, 31)))
        assert (out == np.array([12, 200, 31], np.uint8)).all()

    def test_custom_dims(self):
        out = preprocess(solid(64, 48, (1, 1, 1)), PreprocessSpec(target_width=32, target_height=32))
        assert out.shape == (32, 32, 3)


class TestMockBackend:
    def test_scheduled_index(self):
        backend = MockBackend(DEFAULT_LABELS, {5: {"soccer_penalty": 0.95}})
        sv = backend.score(solid(4, 4, (0, 0, 0)), index=5)
        assert sv.score_of("soccer_penalty") == pytest.approx(0.95)
        assert sv.scores.sum() == pytest.approx(1.0)

    def test_default_uniform(self):
        backend = MockBackend(DEFAULT_LABELS)
        sv = backend.score(solid(4, 4, (0, 0, 0)), index=3)
        np.testing.assert_allclose(sv.scores, 1 / len(DEFAULT_LABELS))

    def test_bit_deterministic(self):
        schedule = {2: {"punch": 0.9, "tennis_swing": 0.05}}
        a = MockBackend(DEFAULT_LABELS, schedule).score(solid(2, 2, (1, 1, 1)), index=2)
        b = MockBackend(DEFAULT_LABELS, schedule).score(solid(2, 2, (9, 9, 9)), index=2)
        assert a.scores.tobytes() == b.scores.tobytes()

    def test_counts_calls(self):
        backend = MockBackend(DEFAULT_LABELS)
        for i in range(7):
            backend.score(solid(2, 2, (0, 0, 0)), index=i)
        assert backend.calls == 7


class TestMatches:
    def make_sv(self, **scores):
        s = np.zeros(len(DEFAULT_LABELS))
        for label, v in scores.items():
            s[DEFAULT_LABELS.index(label)] = v
        rest = (1 - s.sum()) / (s == 0).sum()
        s[s == 0] = rest
        return ScoreVector(DEFAULT_LABELS, s)

    def test_above_threshold_matches(self):
        sv = self.make_sv(soccer_penalty=0.81)
        q = EventQuery(("soccer_penalty",), 0.80)
        assert matches(sv, q) == ("soccer_penalty", pytest.approx(0.81))

    def test_exactly_at_threshold_is_no_match(self):
        sv = self.make_sv(soccer_penalty=0.80)
        q = EventQuery(("soccer_penalty",), 0.80)
        assert matches(sv, q) is None

    def test_two_events_picks_higher(self):
        # a softmax vector cannot hold 0.85 and 0.90 at once; same argmax rule
        sv = self.make_sv(punch=0.45, tennis_swing=0.50)
        q = EventQuery(("punch", "tennis_swing"), 0.40)
        assert matches(sv, q)[0] == "tennis_swing"

    def test_exact_tie_resolves_to_earlier_label(self):
        sv = self.make_sv(basketball=0.45, punch=0.45)
        q = EventQuery(("punch", "basketball"), 0.40)
        assert matches(sv, q)[0] == "basketball"

    def test_unknown_event_raises(self):
        sv = self.make_sv(punch=0.9)
        with pytest.raises(KeyError):
            matches(sv, EventQuery(("crowd_surfing",), 0.5))


@settings(max_examples=300, deadline=None)
@given(
    seed=st.integers(0, 2**31 - 1),
    slope=st.floats(0.1, 5.0),
)
def test_argmax_invariant_under_monotone_rescale(seed, slope):
    rng = np.random.default_rng(seed)
    raw = rng.random(len(DEFAULT_LABELS))
    probs = raw / raw.sum()
    sv = ScoreVector(DEFAULT_LABELS, probs)
    # a strictly monotone transform, renormalized back into a distribution
    warped = np.power(probs, slope)
    warped /= warped.sum()
    sv2 = ScoreVector(DEFAULT_LABELS, warped)
    q = EventQuery(tuple(DEFAULT_LABELS.labels[:4]), threshold=0.0)
    assert matches(sv, q)[0] == matches(sv2, q)[0]


class TestScheduleFile:
    def test_round_trip(self, tmp_path):
        schedule = {35: {"soccer_penalty": 0.9}, 12: {"punch": 0.85, "basketball": 0.05}}
        path = tmp_path / "sched.txt"
        write_mock_schedule(schedule, path)
        assert load_mock_schedule(path) == schedule

    def test_parse_error_names_line(self, tmp_path):
        path = tmp_path / "bad.txt"
        path.write_text("3 punch:0.9\nnot a line\n")
        with pytest.raises(ParseError, match="line 2"):
            load_mock_schedule(path)


class TestValidation:
    def test_score_vector_sum_enforced(self):
        with pytest.raises(ValueError):
            ScoreVector(DEFAULT_LABELS, np.full(10, 0.2))

    def test_empty_query_rejected(self):
        with pytest.raises(ValueError):
            EventQuery(())

    def test_query_validates_against_labels(self):
        q = EventQuery(("soccer_penalty", "nope"))
        with pytest.raises(KeyError, match="nope"):
            q.validate_against(DEFAULT_LABELS)

    def test_duplicate_labels_rejected(self):
        with pytest.raises(ValueError):
            LabelSet(("a", "a"))
