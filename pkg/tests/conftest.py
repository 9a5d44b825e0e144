from __future__ import annotations

from functools import lru_cache

from hypothesis import HealthCheck, settings

from grassrec.grassmann import build_delta, build_gamma, classify_maximal_cliques
from grassrec.subspace import AmbientSpec

settings.register_profile("default", deadline=None, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")


@lru_cache(maxsize=None)
def delta_of(n: int, k: int, q: int):
    return build_delta(AmbientSpec(n, q, k))


@lru_cache(maxsize=None)
def gamma_of(n: int, k: int, q: int):
    return build_gamma(AmbientSpec(n, q, k))


@lru_cache(maxsize=None)
def census_of(n: int, k: int, q: int):
    return classify_maximal_cliques(delta_of(n, k, q))
