"""Perceptual grouping analysis for dot plots.

Charts, groups and models are plain JSON-compatible values: a chart is
``{"points": [{"label": "A", "value": 10.0}, ...], "plot": {...}}``, a group
is a list of labels, and models use the same document format as the CLI.
"""

from __future__ import annotations

import json
from typing import Any, Iterable, Mapping, Optional, Sequence

from . import _core

__all__ = [
    "GroupsenseError",
    "count_valid_permutations",
    "default_model",
    "diagnose",
    "features",
    "landscape",
    "random_chart",
    "redesign",
    "shap",
    "train_oracle_model",
]


class GroupsenseError(Exception):
    """Engine error with a machine-readable ``code`` and field ``path``."""

    def __init__(self, code: str, message: str, path: str = ""):
        super().__init__(f"{code}: {message}" + (f" at {path}" if path else ""))
        self.code = code
        self.message = message
        self.path = path


def _call(fn, *args):
    try:
        return json.loads(fn(*args))
    except _core.NativeError as exc:
        err = json.loads(str(exc))["error"]
        raise GroupsenseError(err["code"], err["message"], err["path"]) from None


def _dump(value: Any) -> str:
    return json.dumps(value)


def _model(model: Optional[Mapping[str, Any]]) -> str:
    return "" if model is None else _dump(model)


def _groups(desired: Iterable[Sequence[str]]) -> str:
    return _dump([list(g) for g in desired])


def random_chart(n: int = 6, seed: int = 0) -> dict:
    """Seeded chart of ``n`` points labelled A, B, ... with values in [0, 100]."""
    return _call(_core.random_chart, n, seed)


def features(chart: Mapping[str, Any], group: Sequence[str]) -> dict:
    """The eight geometric features of ``group`` against the other points."""
    return _call(_core.features, _dump(chart), _dump(list(group)))


def default_model() -> dict:
    """The built-in model document."""
    return json.loads(_core.default_model())


def diagnose(
    chart: Mapping[str, Any],
    desired: Iterable[Sequence[str]] = (),
    model: Optional[Mapping[str, Any]] = None,
    threshold: float = 0.9,
    epsilon_line: float = 4.0,
    chart_id: str = "",
) -> dict:
    return _call(_core.diagnose, _dump(chart), _groups(desired), _model(model), threshold, epsilon_line, chart_id)


def redesign(
    chart: Mapping[str, Any],
    desired: Iterable[Sequence[str]] = (),
    model: Optional[Mapping[str, Any]] = None,
    alpha: float = 0.5,
    k: int = 5,
    threshold: float = 0.9,
    epsilon_line: float = 4.0,
    include_landscape: bool = False,
    threads: int = 0,
) -> dict:
    """Best ``k`` x-axis orders under s = alpha * s_d - (1 - alpha) * s_v."""
    return _call(
        _core.redesign,
        _dump(chart),
        _groups(desired),
        _model(model),
        alpha,
        k,
        threshold,
        epsilon_line,
        include_landscape,
        threads,
    )


def landscape(
    chart: Mapping[str, Any],
    desired: Iterable[Sequence[str]] = (),
    model: Optional[Mapping[str, Any]] = None,
    threshold: float = 0.9,
    epsilon_line: float = 4.0,
    threads: int = 0,
) -> dict:
    """Count of valid orders per (violations, desired_met) cell."""
    return _call(_core.landscape, _dump(chart), _groups(desired), _model(model), threshold, epsilon_line, threads)


def train_oracle_model(
    kind: str = "tree", max_depth: int = 3, charts: int = 100, seed: int = 0, slope_free: bool = True
) -> dict:
    """Fits a model on oracle-labelled random charts (70% split).

    Returns ``{"model": ..., "test": metrics, "holdout": metrics}``.
    """
    return _call(_core.train_oracle, kind, max_depth, charts, seed, slope_free)


def shap(
    chart: Mapping[str, Any],
    group: Sequence[str],
    model: Optional[Mapping[str, Any]] = None,
    background_charts: int = 20,
    seed: int = 0,
) -> dict:
    """Exact Shapley attribution over the eight features."""
    return _call(_core.shap, _dump(chart), _dump(list(group)), _model(model), background_charts, seed)


def count_valid_permutations(chart: Mapping[str, Any]) -> int:
    try:
        return _core.count_valid_permutations(_dump(chart))
    except _core.NativeError as exc:
        err = json.loads(str(exc))["error"]
        raise GroupsenseError(err["code"], err["message"], err["path"]) from None
