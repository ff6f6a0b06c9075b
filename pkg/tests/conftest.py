"""Shared helpers: seeded state corpora and independent linear-algebra oracles."""

from __future__ import annotations

import numpy as np


def kron_oracle(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Kronecker product by explicit index bookkeeping, independent of np.kron."""
    out = np.zeros((4, 4), dtype=complex)
    for r1 in range(2):
        for c1 in range(2):
            for r2 in range(2):
                for c2 in range(2):
                    out[2 * r1 + r2, 2 * c1 + c2] = a[r1, c1] * b[r2, c2]
    return out


def matmul_oracle(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Matrix product by explicit triple loop."""
    n = a.shape[0]
    out = np.zeros((n, n), dtype=complex)
    for i in range(n):
        for j in range(n):
            out[i, j] = sum(a[i, k] * b[k, j] for k in range(n))
    return out


def random_states(count: int, seed: int) -> list[np.ndarray]:
    rng = np.random.default_rng(seed)
    states = []
    for _ in range(count):
        v = rng.normal(size=4) + 1j * rng.normal(size=4)
        states.append(v / np.linalg.norm(v))
    return states


def random_product_states(count: int, seed: int) -> list[np.ndarray]:
    rng = np.random.default_rng(seed)
    states = []
    for _ in range(count):
        a = rng.normal(size=2) + 1j * rng.normal(size=2)
        b = rng.normal(size=2) + 1j * rng.normal(size=2)
        states.append(np.kron(a / np.linalg.norm(a), b / np.linalg.norm(b)))
    return states
