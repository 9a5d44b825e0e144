"""Exact reconstruction of Grassmann graphs over finite fields from their
subgraphs of non-degenerate subspaces (non-degenerate linear codes)."""

from __future__ import annotations

__version__ = "0.1.0"

from .field import GF, FieldElement, FieldError, FieldSpec
from .graph import Graph, check_isomorphism_with_map, maximal_cliques
from .grassmann import GrassmannGraph, build_delta, build_gamma, classify_maximal_cliques
from .recovery import HypothesisError, recover_and_verify
from .subspace import AmbientSpec, Subspace, enumerate_subspaces, gaussian_binomial

__all__ = [
    "GF",
    "AmbientSpec",
    "FieldElement",
    "FieldError",
    "FieldSpec",
    "Graph",
    "GrassmannGraph",
    "HypothesisError",
    "Subspace",
    "__version__",
    "build_delta",
    "build_gamma",
    "check_isomorphism_with_map",
    "classify_maximal_cliques",
    "enumerate_subspaces",
    "gaussian_binomial",
    "maximal_cliques",
    "recover_and_verify",
]
