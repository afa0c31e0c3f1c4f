"""scikit-learn style front end: image -> filtered complex -> reduction -> barcode.

The three steps chain in a :class:`sklearn.pipeline.Pipeline`::

    pipe = make_pipeline(ImageComplexBuilder(filtration="rows", steps=10),
                         PersistentHomology())
    barcode = pipe.fit(image).transform(image)
"""

from __future__ import annotations

from typing import Optional, Sequence

from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from .chain import FilteredComplex, Reduction, identity_reduction
from .image import (
    build_cubical,
    build_simplicial,
    frames_filtration,
    graylevel_filtration,
    single_step_filtration,
    sweep_filtration,
)
from .morse import reduce_complex, reduce_filtered_complex
from .persist import (
    Barcode,
    barcode,
    bd_group,
    homology_at,
    persistent_generators,
    persistent_group,
    triple_group,
)
from .validation import check_complex, check_frames, check_image

__all__ = ["ImageComplexBuilder", "MorseReducer", "PersistentHomology"]

_KINDS = ("simplicial", "cubical")
_FILTRATIONS = ("single", "frames", "rows", "cols", "gray")


class ImageComplexBuilder(TransformerMixin, BaseEstimator):
    """Turn an image (or nested frames) into a filtered cell complex.

    Parameters
    ----------
    kind : {"simplicial", "cubical"}
    filtration : {"single", "frames", "rows", "cols", "gray"}
        ``frames`` expects a list of nested images as input.
    steps : int
        Band count for row and column sweeps.
    thresholds : sequence of int, optional
        Increasing gray thresholds for ``gray``.
    threshold : int, optional
        Foreground cut-off for the other modes; defaults to half the maxval.
    """

    def __init__(self, kind="simplicial", filtration="single", steps=1, thresholds=None, threshold=None):
        self.kind = kind
        self.filtration = filtration
        self.steps = steps
        self.thresholds = thresholds
        self.threshold = threshold

    def _validate_params(self):
        if self.kind not in _KINDS:
            raise ValueError(f"kind must be one of {_KINDS}, got {self.kind!r}")
        if self.filtration not in _FILTRATIONS:
            raise ValueError(f"filtration must be one of {_FILTRATIONS}, got {self.filtration!r}")
        if self.filtration == "gray" and not self.thresholds:
            raise ValueError("gray filtration needs thresholds")
        if int(self.steps) < 1:
            raise ValueError("steps must be positive")

    def fit(self, X=None, y=None):
        self._validate_params()
        return self

    def filtration_for(self, X):
        """The pixel filtration and the image carrying it."""
        if self.filtration == "frames":
            return frames_filtration(check_frames(X), self.threshold)
        img = check_image(X)
        if self.filtration == "rows":
            return img, sweep_filtration(img, "rows", int(self.steps), self.threshold)
        if self.filtration == "cols":
            return img, sweep_filtration(img, "cols", int(self.steps), self.threshold)
        if self.filtration == "gray":
            return img, graylevel_filtration(img, list(self.thresholds))
        return img, single_step_filtration(img, self.threshold)

    def transform(self, X) -> FilteredComplex:
        self._validate_params()
        img, spec = self.filtration_for(X)
        build = build_simplicial if self.kind == "simplicial" else build_cubical
        return build(img, spec)

    def __sklearn_is_fitted__(self):
        return True


class MorseReducer(TransformerMixin, BaseEstimator):
    """Reduce a filtered complex along discrete vector fields.

    ``filtered=True`` keeps the filtration (homotopy order 0), so persistence
    computed on the output equals that of the input.

    Attributes
    ----------
    reduction_ : Reduction
    critical_complex_ : FilteredComplex
    stats_ : dict
        Vectors per degree and cell counts before and after.
    """

    def __init__(self, filtered=True, threads=1):
        self.filtered = filtered
        self.threads = threads

    def _reduce(self, X) -> Reduction:
        C = check_complex(X)
        if self.filtered:
            return reduce_filtered_complex(C, threads=int(self.threads))
        return reduce_complex(C)

    def fit(self, X, y=None):
        rho = self._reduce(X)
        self.reduction_ = rho
        self.critical_complex_ = rho.dst
        self.stats_ = dict(rho.stats)
        return self

    def transform(self, X) -> FilteredComplex:
        check_is_fitted(self, "reduction_")
        if X is self.reduction_.src:
            return self.critical_complex_
        return self._reduce(X).dst


class PersistentHomology(TransformerMixin, BaseEstimator):
    """Integer persistent homology of a filtered complex.

    With ``reduce=True`` the complex is first reduced in a
    filtration-compatible way and every group is computed on the small
    critical complex; generators are mapped back to the input complex.
    """

    def __init__(self, reduce=True, generators=False, threads=1):
        self.reduce = reduce
        self.generators = generators
        self.threads = threads

    def _compute(self, X):
        C = check_complex(X)
        if self.reduce:
            rho = reduce_filtered_complex(C, threads=int(self.threads))
        else:
            rho = identity_reduction(C)
        return C, rho, barcode(rho.dst, generators=bool(self.generators), reduction=rho)

    def fit(self, X, y=None):
        self.complex_, self.reduction_, self.barcode_ = self._compute(X)
        return self

    def transform(self, X) -> Barcode:
        check_is_fitted(self, "barcode_")
        if X is self.complex_:
            return self.barcode_
        return self._compute(X)[2]

    # queries on the fitted complex

    @property
    def _target(self) -> FilteredComplex:
        check_is_fitted(self, "reduction_")
        return self.reduction_.dst

    def homology(self, i: int, n: int):
        return homology_at(self._target, i, n)

    def persistent_group(self, i: int, j: int, n: int):
        return persistent_group(self._target, i, j, n)

    def triple_group(self, i: int, j: int, k: int, n: int):
        return triple_group(self._target, i, j, k, n)

    def bd_group(self, i: int, k: Optional[int], n: int):
        return bd_group(self._target, i, k, n)

    def persistent_generators(self, i: int, j: int, n: int) -> Sequence:
        """Generating cycles of ``H^{i,j}_n`` in the input complex."""
        return persistent_generators(self.reduction_, i, j, n)
