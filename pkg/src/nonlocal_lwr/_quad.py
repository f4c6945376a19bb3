import numpy as np

_ORDER = 8
_GL_X, _GL_W = np.polynomial.legendre.leggauss(_ORDER)


def gauss_panels(breaks, n_panels):
    """Composite Gauss-Legendre nodes/weights over the intervals between ``breaks``.

    At least ``n_panels`` panels in total are distributed proportionally to
    interval length, with at least one panel per interval. Panels never
    straddle a break point, so piecewise-smooth integrands converge quickly.
    """
    breaks = np.asarray(breaks, dtype=float)
    lengths = np.diff(breaks)
    total = breaks[-1] - breaks[0]
    nodes, weights = [], []
    for a, length in zip(breaks[:-1], lengths):
        if length <= 0:
            continue
        m = max(1, int(np.ceil(n_panels * length / total)))
        edges = a + length * np.arange(m + 1) / m
        half = 0.5 * np.diff(edges)
        mid = 0.5 * (edges[1:] + edges[:-1])
        nodes.append((mid[:, None] + half[:, None] * _GL_X[None, :]).ravel())
        weights.append((half[:, None] * _GL_W[None, :]).ravel())
    return np.concatenate(nodes), np.concatenate(weights)


def panels_for_nodes(n_nodes):
    return max(1, int(np.ceil(n_nodes / _ORDER)))
