"""Benchmark environments and the registry used by configs and pools."""
from __future__ import annotations

from ..core import ConfigError
from .base import Environment, Percept
from .epidemic import EpidemicEnv, EpidemicParams
from .simple import BiasedRps, ConstantEnv, Jackpot, StopHeist, SwitchingEnv, Taxi

REGISTRY = {
    "rps": BiasedRps,
    "jackpot": Jackpot,
    "stopheist": StopHeist,
    "taxi": Taxi,
    "epidemic": EpidemicEnv,
    "switching": SwitchingEnv,
    "constant": ConstantEnv,
}


def make_env(env_id: str, seed: int = 0, **params) -> Environment:
    try:
        cls = REGISTRY[env_id]
    except KeyError:
        raise ConfigError(f"unknown environment {env_id!r}; known: {sorted(REGISTRY)}") from None
    if env_id == "epidemic":
        from .graphs import load_edge_list

        graph_path = params.pop("graph_path", None)
        ep_keys = set(EpidemicParams.__dataclass_fields__)
        ep = {k: params.pop(k) for k in list(params) if k in ep_keys}
        for k in ("alpha", "mu"):
            if k in ep:
                ep[k] = tuple(ep[k])
        graph = load_edge_list(graph_path) if graph_path else None
        return cls(seed=seed, graph=graph, params=EpidemicParams(**ep), **params)
    return cls(seed=seed, **params)


__all__ = ["Environment", "Percept", "make_env", "REGISTRY", "EpidemicEnv", "EpidemicParams", "BiasedRps",
           "Jackpot", "StopHeist", "Taxi", "SwitchingEnv", "ConstantEnv"]
