"""Scikit-learn style estimators wrapping the partition solvers.

``fit`` takes a list of measures (the data to divide) and computes the fair
partition; ``predict`` assigns query points to thieves or sides.  Parameters
follow the sklearn convention (stored verbatim in __init__, validated in
fit), so the estimators clone and grid-search like any other.
"""

import numpy as np
from sklearn.base import BaseEstimator
from sklearn.utils.validation import check_is_fitted

from . import chessboard as cb
from . import necklace1d as nk
from . import nested as ns
from . import stairpath as sp
from . import voronoifair as vf
from .busolver import SolverConfig
from .necklace1d import prime_factors
from .validation import check_measures, check_points, check_unit_vectors


def _solver_cfg(seed):
    return SolverConfig(seed=seed)


class NecklaceSplitter(BaseEstimator):
    """Fair k-thief split of one-dimensional measures with t(k-1) cuts."""

    def __init__(self, thieves=2, tol=None, seed=0):
        self.thieves = thieves
        self.tol = tol
        self.seed = seed

    def fit(self, X, y=None):
        measures = check_measures(X, dim=1)
        k = self.thieves
        solver = (nk.split_prime if len(prime_factors(k)) == 1
                  else nk.split_composite)
        split = solver(measures, k, tol=self.tol, cfg=_solver_cfg(self.seed))
        self.cuts_ = np.asarray(split.cuts)
        self.labels_ = np.asarray(split.labels)
        self.shares_ = np.asarray(split.shares)
        self.residual_ = split.residual
        self.n_cuts_ = split.n_cuts
        return self

    def predict(self, X):
        check_is_fitted(self)
        pts = check_points(X, 1)[:, 0]
        idx = np.searchsorted(self.cuts_, pts, side="right")
        return self.labels_[idx]


class StairPathHalver(BaseEstimator):
    """Halving stair path with at most t-1 turns for t planar measures."""

    def __init__(self, tol=None, seed=0):
        self.tol = tol
        self.seed = seed

    def fit(self, X, y=None):
        measures = check_measures(X, dim=2)
        path = sp.halve_with_path(measures, tol=self.tol,
                                  cfg=_solver_cfg(self.seed))
        self.path_ = path
        self.partition_ = path.partition
        self.turns_ = path.turns
        masses = sp.partition_masses(path.partition, measures)
        self.residuals_ = masses - 0.5
        return self

    def predict(self, X):
        """0 for side A, 1 for side B."""
        check_is_fitted(self)
        pts = check_points(X, 2)
        return np.array(
            [0 if self.partition_.side_of(tuple(p)) == "A" else 1
             for p in pts]
        )


class NestedPartitioner(BaseEstimator):
    """Fair k-split over nested fixed-direction hyperplane cuts."""

    def __init__(self, thieves=2, scheme=None, tol=None, seed=0):
        self.thieves = thieves
        self.scheme = scheme
        self.tol = tol
        self.seed = seed

    def _resolve_scheme(self, measures):
        t = len(measures)
        n = t * (self.thieves - 1)
        dim = measures[0].dim
        if self.scheme is None:
            dirs = [tuple(1.0 if a == i % dim else 0.0 for a in range(dim))
                    for i in range(n)]
            return ns.SchemeTree.chain(dirs)
        if isinstance(self.scheme, ns.SchemeTree):
            return self.scheme
        return ns.SchemeTree.from_json(self.scheme)

    def fit(self, X, y=None):
        measures = check_measures(X)
        scheme = self._resolve_scheme(measures)
        part = ns.solve_nested(measures, scheme, self.thieves, tol=self.tol,
                               cfg=_solver_cfg(self.seed))
        self.partition_ = part
        self.offsets_ = np.asarray(part.offsets)
        self.labels_ = np.asarray(part.labels)
        self.shares_ = ns.partition_shares(part, measures, self.thieves)
        return self

    def predict(self, X):
        check_is_fitted(self)
        pts = check_points(X, self.partition_.dim)
        return np.array([self.partition_.thief_of(tuple(p)) for p in pts])


class ChessboardHalver(BaseEstimator):
    """Two-colour chessboard halving of S(n) measures, admissible counts."""

    def __init__(self, counts=(1,), directions=None, tol=None, seed=0):
        self.counts = counts
        self.directions = directions
        self.tol = tol
        self.seed = seed

    def fit(self, X, y=None):
        counts = tuple(int(c) for c in self.counts)
        measures = check_measures(X, min_count=sum(counts),
                                  max_count=sum(counts))
        dim = measures[0].dim
        if self.directions is None:
            directions = tuple(
                tuple(1.0 if a == i % dim else 0.0 for a in range(dim))
                for i in range(len(counts))
            )
        else:
            directions = check_unit_vectors(self.directions, dim)
        spec = cb.ChessboardSpec(counts, directions)
        self.colouring_ = cb.solve_chessboard(
            measures, spec, tol=self.tol, cfg=_solver_cfg(self.seed)
        )
        self.residuals_ = cb.colouring_residuals(self.colouring_, measures)
        return self

    def predict(self, X):
        """0 for colour A, 1 for colour B, -1 on a boundary."""
        check_is_fitted(self)
        pts = check_points(X, self.colouring_.dim)
        codes = {"A": 0, "B": 1, "boundary": -1}
        return np.array(
            [codes[self.colouring_.colour_of(tuple(p))] for p in pts]
        )


class VoronoiFairSplitter(BaseEstimator):
    """Fair k-distribution of generalized Voronoi cells."""

    def __init__(self, functions=None, thieves=2, tol=None, seed=0):
        self.functions = functions
        self.thieves = thieves
        self.tol = tol
        self.seed = seed

    def _resolve_functions(self, measures):
        if self.functions is None:
            t = len(measures)
            n = t * (self.thieves - 1) + 1
            dim = measures[0].dim
            grads = [tuple(float(i) if a == 0 else 0.0 for a in range(dim))
                     for i in range(n)]
            return vf.LinearFunctions(tuple(grads))
        if isinstance(self.functions, dict):
            return vf.functions_from_json(self.functions)
        return self.functions

    def fit(self, X, y=None):
        measures = check_measures(X)
        fns = self._resolve_functions(measures)
        result = vf.solve_fair(fns, measures, self.thieves, tol=self.tol,
                               cfg=_solver_cfg(self.seed))
        self.functions_ = fns
        self.weights_ = result.weights
        self.capacities_ = result.capacities
        self.labels_ = np.asarray(result.labels)
        self.shares_ = result.shares
        self.residual_ = result.residual
        return self

    def predict(self, X):
        check_is_fitted(self)
        pts = check_points(X, self.functions_.dim)
        decomp = vf.cells(self.functions_, self.weights_)
        return np.array(
            [self.labels_[decomp.cell_index(tuple(p))] for p in pts]
        )
