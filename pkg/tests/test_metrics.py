import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from pcpa.metrics import (MetricsError, classification_metrics, labels_from_x,
                          normalized_error)


class TestClassification:
    def test_perfect_prediction(self):
        cm = classification_metrics([1, 0, 1], [1, 0, 1])
        assert (cm.accuracy, cm.far, cm.mdr, cm.f1) == (1.0, 0.0, 0.0, 1.0)

    def test_hand_counted_example(self):
        # TP=1, FP=1, TN=1, FN=1 counted by hand
        cm = classification_metrics([1, 0, 1, 0], [1, 1, 0, 0])
        assert (cm.tp, cm.fp, cm.tn, cm.fn) == (1, 1, 1, 1)
        assert cm.accuracy == 0.5
        assert cm.far == 0.5
        assert cm.mdr == 0.5
        assert cm.f1 == 0.5

    def test_all_lines_attacked_far_is_zero(self):
        # no negatives exist: FAR is reported 0
        cm = classification_metrics([1] * 8, [1] * 8)
        assert cm.far == 0.0

    def test_no_positives_mdr_is_zero(self):
        cm = classification_metrics([0, 0], [0, 0])
        assert cm.mdr == 0.0
        assert cm.f1 == 1.0

    def test_validation(self):
        with pytest.raises(MetricsError, match="mismatch"):
            classification_metrics([1, 0], [1])
        with pytest.raises(MetricsError, match="binary"):
            classification_metrics([1, 2], [1, 0])

    @settings(max_examples=100, deadline=None)
    @given(st.lists(st.tuples(st.integers(0, 1), st.integers(0, 1)),
                    min_size=1, max_size=30))
    def test_counts_partition_the_lines(self, pairs):
        pred = [a for a, _ in pairs]
        true = [b for _, b in pairs]
        cm = classification_metrics(pred, true)
        assert cm.tp + cm.fp + cm.tn + cm.fn == len(pairs)
        assert 0.0 <= cm.accuracy <= 1.0
        assert 0.0 <= cm.far <= 1.0
        assert 0.0 <= cm.mdr <= 1.0
        assert 0.0 <= cm.f1 <= 1.0


class TestNormalizedError:
    def test_exact_estimate(self):
        x = np.array([0.3, 0.0, 1.0])
        assert normalized_error(x, x) == 0.0

    def test_hand_computed(self):
        # ||(0.3, -0.4)|| / ||(1, 0)|| = 0.5
        assert abs(normalized_error(np.array([0.7, 0.4]),
                                    np.array([1.0, 0.0])) - 0.5) < 1e-12

    def test_zero_truth_rejected(self):
        with pytest.raises(MetricsError, match="zero"):
            normalized_error(np.ones(3), np.zeros(3))

    def test_dimension_mismatch(self):
        with pytest.raises(MetricsError):
            normalized_error(np.ones(3), np.ones(2))


class TestThreshold:
    def test_default_half(self):
        x = np.array([0.0, 0.49, 0.5, 0.51, 1.0])
        assert labels_from_x(x).tolist() == [0, 0, 1, 1, 1]
