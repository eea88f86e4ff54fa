"""Contact-network construction and centrality rankings."""
from __future__ import annotations

import networkx as nx
import numpy as np


def _natural_key(label: str):
    return (0, int(label), "") if label.lstrip("-").isdigit() else (1, 0, label)


def load_edge_list(path) -> nx.Graph:
    """Whitespace-separated undirected edges, relabelled to 0..n-1 in natural label order."""
    G = nx.Graph()
    with open(path) as fh:
        for line in fh:
            parts = line.split()
            if len(parts) < 2 or parts[0].startswith("#"):
                continue
            if parts[0] != parts[1]:
                G.add_edge(parts[0], parts[1])
    order = sorted(G.nodes(), key=_natural_key)
    return nx.relabel_nodes(G, {v: i for i, v in enumerate(order)})


def make_graph(kind: str, n: int, seed: int, **kw) -> nx.Graph:
    if kind in ("watts_strogatz", "ws"):
        return nx.connected_watts_strogatz_graph(n, kw.get("k", 4), kw.get("p", 0.1), seed=seed)
    if kind in ("barabasi_albert", "ba"):
        return nx.barabasi_albert_graph(n, kw.get("m", 2), seed=seed)
    raise ValueError(f"unknown graph generator {kind!r}")


def _ranking(scores: dict) -> list[int]:
    # rounding removes float noise so equal centralities tie break on node id
    return sorted(scores, key=lambda v: (-round(scores[v], 9), v))


def betweenness_ranking(G: nx.Graph) -> list[int]:
    """Nodes by descending betweenness, ties by node id."""
    return _ranking(nx.betweenness_centrality(G, normalized=False))


def degree_ranking(G: nx.Graph) -> list[int]:
    return _ranking(dict(G.degree()))


def percentile_bands(ranking, bands: int = 5) -> list[np.ndarray]:
    """Split a ranking into equal percentile bands, top band first."""
    n = len(ranking)
    edges = [round(b * n / bands) for b in range(bands + 1)]
    return [np.asarray(ranking[edges[b]:edges[b + 1]], dtype=np.int64) for b in range(bands)]
