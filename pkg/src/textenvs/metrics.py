"""Reward and evaluation math: token-level micro F1, set F1, accuracy.

All functions are pure. Token F1 counts positionwise matches; on equal-length
single-label sequences it reduces to plain accuracy. Set F1 ignores order and
duplicates. F1 of two empty inputs is defined as 0.0 (not 1.0) so that dense
per-step reward deltas start from zero at the empty prefix.
"""

from __future__ import annotations

from typing import Iterable, NamedTuple, Sequence

from .core import EmptyEvaluation


class F1Breakdown(NamedTuple):
    precision: float
    recall: float
    f1: float


ZERO_F1 = F1Breakdown(0.0, 0.0, 0.0)


def _breakdown(matches: int, n_pred: int, n_true: int) -> F1Breakdown:
    precision = matches / n_pred if n_pred else 0.0
    recall = matches / n_true if n_true else 0.0
    f1 = 2 * precision * recall / (precision + recall) if precision + recall > 0 else 0.0
    return F1Breakdown(precision, recall, f1)


def token_f1(true_labels: Sequence[str], pred_labels: Sequence[str]) -> F1Breakdown:
    """Micro F1 over positionwise label matches.

    Lengths may differ (prefix evaluation mid-episode); matches are counted
    over the overlapping prefix, precision is over ``pred_labels`` and recall
    over ``true_labels``.
    """
    matches = sum(1 for t, p in zip(true_labels, pred_labels) if t == p)
    return _breakdown(matches, len(pred_labels), len(true_labels))


def set_f1(true_labels: Iterable[str], pred_labels: Iterable[str]) -> F1Breakdown:
    """F1 between label sets; prediction order and duplicates are ignored."""
    true_set = set(true_labels)
    pred_set = set(pred_labels)
    matches = len(true_set & pred_set)
    return _breakdown(matches, len(pred_set), len(true_set))


def accuracy(predictions: Sequence[bool]) -> float:
    """Fraction of true entries."""
    if not predictions:
        raise EmptyEvaluation("accuracy of an empty prediction list")
    return sum(1 for p in predictions if p) / len(predictions)


def micro_token_f1(pairs: Sequence[tuple[Sequence[str], Sequence[str]]]) -> F1Breakdown:
    """Corpus-level micro token F1: match/prediction/truth counts pooled over samples."""
    matches = n_pred = n_true = 0
    for true_labels, pred_labels in pairs:
        matches += sum(1 for t, p in zip(true_labels, pred_labels) if t == p)
        n_pred += len(pred_labels)
        n_true += len(true_labels)
    return _breakdown(matches, n_pred, n_true)


def micro_set_f1(pairs: Sequence[tuple[Iterable[str], Iterable[str]]]) -> F1Breakdown:
    """Corpus-level micro set F1 with counts pooled over samples."""
    matches = n_pred = n_true = 0
    for true_labels, pred_labels in pairs:
        true_set, pred_set = set(true_labels), set(pred_labels)
        matches += len(true_set & pred_set)
        n_pred += len(pred_set)
        n_true += len(true_set)
    return _breakdown(matches, n_pred, n_true)
