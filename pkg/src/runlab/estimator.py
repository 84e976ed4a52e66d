"""scikit-learn style wrappers around the labeling engine."""

from __future__ import annotations

from typing import Callable, Optional

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from .analysis import (
    ComponentRecord,
    adjacency_tree,
    components,
    filter_components,
    to_binary,
)
from .lsl import label_image
from .model import BinaryImage, LabelingConfig, as_connectivity


def check_binary_image(X) -> BinaryImage:
    """Validate ``X`` as a 2-D 0/1 (or boolean) grid and wrap it."""
    if isinstance(X, BinaryImage):
        return X
    arr = np.asarray(X)
    if arr.dtype == object:
        raise ValueError("binary image must be numeric or boolean")
    if arr.ndim != 2:
        raise ValueError(f"expected a 2-D binary image, got {arr.ndim} dimension(s)")
    if arr.dtype.kind == "f" and not np.all(np.isfinite(arr)):
        raise ValueError("binary image contains NaN or infinity")
    return BinaryImage(arr)


class BWLabeler(TransformerMixin, BaseEstimator):
    """Foreground/background component labeling with the adjacency tree.

    ``fit`` labels one image and exposes the result; ``transform`` returns
    the per-pixel label grid of an image.

    Attributes
    ----------
    result_ : LabelingResult
    labels_ : ndarray of shape (height, width), present when ``relabel``
    euler_ : int
    n_components_ : int
        Number of foreground components.
    n_holes_ : int
    """

    def __init__(
        self,
        connectivity: str = "fg8bg4",
        fill_holes: bool = False,
        compute_features: bool = True,
        relabel: bool = True,
        densify_labels: bool = False,
        compute_euler: bool = True,
    ):
        self.connectivity = connectivity
        self.fill_holes = fill_holes
        self.compute_features = compute_features
        self.relabel = relabel
        self.densify_labels = densify_labels
        self.compute_euler = compute_euler

    def _config(self, **overrides) -> LabelingConfig:
        params = dict(
            connectivity=as_connectivity(self.connectivity),
            fill_holes=self.fill_holes,
            compute_features=self.compute_features,
            relabel=self.relabel,
            densify_labels=self.densify_labels,
            compute_euler=self.compute_euler,
        )
        params.update(overrides)
        return LabelingConfig(**params)

    def fit(self, X, y=None):
        image = check_binary_image(X)
        self.result_ = label_image(image, self._config())
        self.n_components_ = self.result_.fg_count
        self.n_holes_ = self.result_.hole_count
        self.euler_ = self.result_.euler
        if self.result_.label_image is not None:
            self.labels_ = self.result_.label_image.labels
        return self

    def transform(self, X):
        image = check_binary_image(X)
        return label_image(image, self._config(relabel=True)).label_image.labels

    def fit_transform(self, X, y=None, **fit_params):
        self.fit(X)
        if self.result_.label_image is None:
            return self.transform(X)
        return self.labels_

    @property
    def components_(self) -> list[ComponentRecord]:
        check_is_fitted(self, "result_")
        return components(self.result_)

    @property
    def tree_(self):
        check_is_fitted(self, "result_")
        return adjacency_tree(self.result_)


class HoleFiller(TransformerMixin, BaseEstimator):
    """Fill every background region that does not reach the image border."""

    def __init__(self, connectivity: str = "fg8bg4"):
        self.connectivity = connectivity

    def fit(self, X, y=None):
        check_binary_image(X)
        self.connectivity_ = as_connectivity(self.connectivity)
        return self

    def transform(self, X):
        check_is_fitted(self, "connectivity_")
        config = LabelingConfig(
            connectivity=self.connectivity_, fill_holes=True, compute_features=False,
            relabel=True, compute_euler=False,
        )
        return to_binary(label_image(check_binary_image(X), config))


class ComponentFilter(TransformerMixin, BaseEstimator):
    """Connected operator: merge components chosen by ``predicate`` into their surroundings.

    ``predicate`` receives a :class:`ComponentRecord` (features included)
    and must never select the exterior (root 0).
    """

    def __init__(self, predicate: Optional[Callable[[ComponentRecord], bool]] = None,
                 connectivity: str = "fg8bg4"):
        self.predicate = predicate
        self.connectivity = connectivity

    def fit(self, X, y=None):
        check_binary_image(X)
        if self.predicate is None or not callable(self.predicate):
            raise ValueError("predicate must be a callable")
        self.connectivity_ = as_connectivity(self.connectivity)
        return self

    def transform(self, X):
        check_is_fitted(self, "connectivity_")
        config = LabelingConfig(connectivity=self.connectivity_, relabel=True)
        result = label_image(check_binary_image(X), config)
        return to_binary(filter_components(result, self.predicate))
