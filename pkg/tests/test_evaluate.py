import pytest

from platetrack.detect import RotatedBox
from platetrack.evaluate import match_detections, prf


def box(x0, y0, w, h, score=0.9):
    return RotatedBox.axis_aligned(x0, y0, x0 + w, y0 + h, score=score)


class TestMatching:
    def test_exact_match_counts_tp_and_string(self):
        preds = [(box(0, 0, 40, 10), "MH12AB1234")]
        truths = [(box(0, 0, 40, 10), "MH12AB1234")]
        assert match_detections(preds, truths) == (1, 0, 0, 1)

    def test_low_iou_is_fp_plus_fn(self):
        preds = [(box(0, 0, 40, 10), "X")]
        truths = [(box(200, 200, 40, 10), "X")]
        assert match_detections(preds, truths) == (0, 1, 1, 0)

    def test_one_truth_claimed_once(self):
        truths = [(box(0, 0, 40, 10), "P")]
        preds = [(box(0, 0, 40, 10), "P"), (box(1, 0, 40, 10), "P")]
        tp, fp, fn, correct = match_detections(preds, truths)
        assert (tp, fp, fn) == (1, 1, 0)

    def test_text_mismatch_still_tp_but_not_correct(self):
        preds = [(box(0, 0, 40, 10), "WRONG00000")]
        truths = [(box(0, 0, 40, 10), "RIGHT00000")]
        assert match_detections(preds, truths) == (1, 0, 0, 0)


class TestPrf:
    def test_hand_computed_ten_item_fixture(self):
        # 10 truths; 8 predictions hit 7 of them (1 prediction is a dup/miss)
        truths = [(box(50 * i, 0, 40, 10), f"P{i}") for i in range(10)]
        preds = [(box(50 * i + 2, 0, 40, 10), f"P{i}") for i in range(7)]
        preds.append((box(900, 500, 40, 10), "GHOST"))
        tp, fp, fn, correct = match_detections(preds, truths)
        assert (tp, fp, fn, correct) == (7, 1, 3, 7)
        precision, recall, f_score = prf(tp, fp, fn)
        assert precision == pytest.approx(7 / 8)
        assert recall == pytest.approx(7 / 10)
        # F = 2PR/(P+R), by hand: 2*(0.875*0.7)/(0.875+0.7) = 1.225/1.575
        assert f_score == pytest.approx(2 * (7 / 8) * (7 / 10) / ((7 / 8) + (7 / 10)))
        assert f_score == pytest.approx(1.225 / 1.575)

    def test_degenerate_cases(self):
        assert prf(0, 0, 0) == (0.0, 0.0, 0.0)
        assert prf(5, 0, 0) == (1.0, 1.0, 1.0)
