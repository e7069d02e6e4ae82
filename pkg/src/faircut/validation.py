"""Input validation helpers shared by the estimator API."""

import numpy as np

from .errors import DimensionError
from .measures import BoxMeasure, measure_from_json


def as_box_measure(obj, dim=None):
    """Coerce a BoxMeasure, a measure dict, or (lo, hi) box bounds."""
    if isinstance(obj, BoxMeasure):
        m = obj
    elif isinstance(obj, dict):
        m, _ = measure_from_json(obj)
    elif isinstance(obj, (tuple, list)) and len(obj) == 2:
        from .measures import uniform_box

        m = uniform_box(tuple(obj[0]), tuple(obj[1]))
    else:
        raise TypeError(
            f"cannot interpret {type(obj).__name__} as a measure"
        )
    if dim is not None and m.dim != dim:
        raise DimensionError(f"measure has dim {m.dim}, expected {dim}")
    return m


def check_measures(X, dim=None, min_count=1, max_count=None):
    """Validate and coerce a sequence of measures with a common dimension."""
    if isinstance(X, (BoxMeasure, dict)):
        X = [X]
    measures = [as_box_measure(m) for m in X]
    if not measures:
        raise ValueError("need at least one measure")
    d = measures[0].dim
    if dim is not None and d != dim:
        raise DimensionError(f"measures have dim {d}, expected {dim}")
    for m in measures:
        if m.dim != d:
            raise DimensionError("measures have mixed dimensions")
    if len(measures) < min_count:
        raise ValueError(f"need at least {min_count} measures")
    if max_count is not None and len(measures) > max_count:
        raise ValueError(f"at most {max_count} measures supported")
    return measures


def check_points(X, dim):
    pts = np.asarray(X, dtype=float)
    if pts.ndim == 1:
        pts = pts.reshape(-1, 1) if dim == 1 else pts.reshape(1, -1)
    if pts.shape[1] != dim:
        raise DimensionError(
            f"points have dimension {pts.shape[1]}, expected {dim}"
        )
    return pts


def check_unit_vectors(vs, dim):
    out = []
    for v in vs:
        v = np.asarray(v, dtype=float)
        if v.size != dim:
            raise DimensionError("direction has wrong dimension")
        norm = np.linalg.norm(v)
        if norm < 1e-12:
            raise ValueError("direction must be nonzero")
        out.append(tuple(v / norm))
    return tuple(out)
