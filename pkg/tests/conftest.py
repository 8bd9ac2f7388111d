import numpy as np

from specsub.lie_core import MetricLieAlgebra


def make_algebra(n, brackets, metric=None, labels=None):
    """Build an algebra from (i, j, k, v) bracket entries, 0-based, i < j."""
    c = np.zeros((n, n, n))
    for i, j, k, v in brackets:
        c[i, j, k] = v
        c[j, i, k] = -v
    g = np.eye(n) if metric is None else np.asarray(metric, dtype=float)
    return MetricLieAlgebra(n, c, g, basis_labels=labels)


def rotate_algebra(alg, rng):
    """Same algebra expressed in a random rotated basis."""
    n = alg.dim
    q, _ = np.linalg.qr(rng.standard_normal((n, n)))
    c_new = np.zeros((n, n, n))
    for a in range(n):
        for b in range(n):
            c_new[a, b] = np.linalg.solve(q, alg.bracket(q[:, a], q[:, b]))
    return MetricLieAlgebra(n, c_new, q.T @ alg.metric @ q)
