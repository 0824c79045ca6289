"""Detection precision/recall/F-score and plate-string accuracy vs truth."""

from __future__ import annotations

import json
import os

from .detect import RotatedBox, iou_rotated
from .imaging import load_pnm
from .pipeline import PipelineConfig, _frame_maps, process_frame
from .recognize import TemplateLibrary

MATCH_IOU = 0.5


def match_detections(
    predictions: list[tuple[RotatedBox, str]],
    truths: list[tuple[RotatedBox, str]],
    iou_threshold: float = MATCH_IOU,
) -> tuple[int, int, int, int]:
    """Greedy one-to-one matching by prediction score.

    Returns (true_positives, false_positives, false_negatives,
    correct_strings); a prediction matches the unclaimed truth with the
    highest IoU above the threshold.
    """
    order = sorted(range(len(predictions)), key=lambda i: -predictions[i][0].score)
    claimed = [False] * len(truths)
    tp = 0
    correct = 0
    for i in order:
        box, text = predictions[i]
        best_j = -1
        best_iou = iou_threshold
        for j, (tbox, _ttext) in enumerate(truths):
            if claimed[j]:
                continue
            iou = iou_rotated(box, tbox)
            if iou >= best_iou:
                best_iou = iou
                best_j = j
        if best_j >= 0:
            claimed[best_j] = True
            tp += 1
            if text == truths[best_j][1]:
                correct += 1
    fp = len(predictions) - tp
    fn = len(truths) - tp
    return tp, fp, fn, correct


def prf(tp: int, fp: int, fn: int) -> tuple[float, float, float]:
    precision = tp / (tp + fp) if tp + fp else 0.0
    recall = tp / (tp + fn) if tp + fn else 0.0
    f_score = 2 * precision * recall / (precision + recall) if precision + recall else 0.0
    return precision, recall, f_score


def evaluate_directory(
    frames_dir: str,
    truth: dict,
    cfg: PipelineConfig,
    lib: TemplateLibrary,
) -> dict:
    """Run the pipeline per truth frame and score it at IoU 0.5."""
    tp = fp = fn = correct = total_truth = 0
    for entry in truth["frames"]:
        frame_path = os.path.join(frames_dir, entry["file"])
        img = load_pnm(frame_path)
        maps = _frame_maps(frame_path, cfg.detector.stride) if cfg.backend == "east" else None
        results = process_frame(img, cfg, lib, maps=maps)
        predictions = [(box, read.text) for box, read in results]
        truths = [
            (RotatedBox.from_json(p["box"]), p["text"]) for p in entry["plates"]
        ]
        total_truth += len(truths)
        t, f_pos, f_neg, c = match_detections(predictions, truths)
        tp += t
        fp += f_pos
        fn += f_neg
        correct += c
    precision, recall, f_score = prf(tp, fp, fn)
    return {
        "frames": len(truth["frames"]),
        "true_positives": tp,
        "false_positives": fp,
        "false_negatives": fn,
        "precision": precision,
        "recall": recall,
        "f_score": f_score,
        "plate_accuracy": correct / total_truth if total_truth else 0.0,
    }


def load_truth(path: str) -> dict:
    with open(path) as fh:
        truth = json.load(fh)
    if "frames" not in truth or not isinstance(truth["frames"], list):
        raise ValueError("truth file must contain a 'frames' list")
    return truth
