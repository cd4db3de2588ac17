"""Center-point heatmaps, focal losses, matching and CAS scoring."""

import json

from ._centerkit import (
    CenterkitError,
    bcfl,
    bcfl_grad_p,
    estimate_alpha,
    evaluate_json,
    find_peaks,
    focal_loss,
    gc_value,
    hungarian,
    qfl,
    read_ochm,
    reduce_loss,
    render_ellipse,
    render_gaussian,
    render_gc,
    selftest,
    write_ochm,
)


def evaluate(coco, points, lam=1.0, mu=1.0, aggregation="pooled", band=None):
    """Score point dicts against a COCO dataset (dict or JSON text).

    Returns the report as a dict with keys cas, cp, md, cas_s, cas_m, cas_l,
    precision, recall, f1, units and per_category.
    """
    if not isinstance(coco, str):
        coco = json.dumps(coco)
    return json.loads(evaluate_json(coco, list(points), lam, mu, aggregation, band))


__all__ = [
    "CenterkitError",
    "bcfl",
    "bcfl_grad_p",
    "estimate_alpha",
    "evaluate",
    "evaluate_json",
    "find_peaks",
    "focal_loss",
    "gc_value",
    "hungarian",
    "qfl",
    "read_ochm",
    "reduce_loss",
    "render_ellipse",
    "render_gaussian",
    "render_gc",
    "selftest",
    "write_ochm",
]
