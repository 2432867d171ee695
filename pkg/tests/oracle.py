"""Brute-force reference quantities, independent of the transfer enumeration."""

import itertools

import numpy as np


def colorings(G, q, pins=None):
    pins = pins or {}
    for col in itertools.product(range(q), repeat=G.n):
        if any(col[v] != c for v, c in pins.items()):
            continue
        if all(col[u] != col[v] for u, v in G.edges):
            yield col


def Z(G, lam, pins=None):
    lam = np.asarray(lam, dtype=complex)
    return complex(sum(np.prod([lam[c] for c in col]) for col in colorings(G, len(lam), pins)))


def class_pmf(G, lam):
    lam = np.asarray(lam, float)
    q = len(lam)
    w = {}
    for col in colorings(G, q):
        k = tuple(np.bincount(col, minlength=q)[: q - 1])
        w[k] = w.get(k, 0.0) + float(np.prod(lam[list(col)]))
    tot = sum(w.values())
    return {k: v / tot for k, v in w.items()}


def chromatic_cycle(n, q):
    return (q - 1) ** n + (-1) ** n * (q - 1)


def chromatic_path(n, q):
    return q * (q - 1) ** (n - 1)
