"""Random geometric graph networks and diffusion combination weights.

Weight matrices are indexed ``[l, k]``: column ``k`` holds the weights node
``k`` assigns to its neighbors ``l``, and every column sums to one.
"""

import csv
from collections import deque
from dataclasses import dataclass, field

import numpy as np

from difflmp.errors import GenerationError, ParameterError, StructuralError

__all__ = [
    "Network",
    "CombinationWeights",
    "WEIGHT_RULES",
    "generate_rgg",
    "network_from_positions",
    "is_connected",
    "weight_matrix",
    "make_weights",
    "uniform_weights",
    "metropolis_weights",
    "write_network_csv",
]

WEIGHT_RULES = ("identity", "uniform", "metropolis")

MAX_RGG_ATTEMPTS = 1000


@dataclass(frozen=True)
class Network:
    """Undirected sensor network on the unit square.

    ``adjacency`` excludes self-loops; ``neighborhoods[k]`` is the closed
    neighborhood of ``k`` (``k`` itself plus its adjacent nodes), sorted.
    """

    positions: np.ndarray
    radius: float
    adjacency: np.ndarray
    neighborhoods: tuple = field(repr=False)

    @property
    def n_nodes(self):
        return self.positions.shape[0]

    @property
    def degrees(self):
        """Closed-neighborhood sizes |N_k|."""
        return np.array([len(nb) for nb in self.neighborhoods])

    def edges(self):
        """Edge list ``(k, l)`` with ``k < l``."""
        ks, ls = np.nonzero(np.triu(self.adjacency, 1))
        return list(zip(ks.tolist(), ls.tolist()))


@dataclass(frozen=True)
class CombinationWeights:
    """The three coefficient matrices of diffusion LMP, each N x N."""

    a1: np.ndarray
    a2: np.ndarray
    c: np.ndarray

    def __post_init__(self):
        shapes = {self.a1.shape, self.a2.shape, self.c.shape}
        if len(shapes) != 1:
            raise StructuralError(f"weight matrices differ in shape: {sorted(shapes)}")
        (shape,) = shapes
        if len(shape) != 2 or shape[0] != shape[1]:
            raise StructuralError(f"weight matrices must be square, got {shape}")

    @property
    def n_nodes(self):
        return self.a1.shape[0]


def network_from_positions(positions, radius):
    """Build the geometric graph on fixed ``positions`` with range ``radius``.

    Nodes at distance exactly ``radius`` are adjacent.
    """
    pos = np.asarray(positions, dtype=float)
    if pos.ndim != 2 or pos.shape[1] != 2 or pos.shape[0] < 1:
        raise StructuralError(f"positions must have shape (N, 2), got {pos.shape}")
    if not 0.0 < radius:
        raise ParameterError(f"radius must be positive, got {radius!r}")
    diff = pos[:, None, :] - pos[None, :, :]
    dist = np.sqrt(np.sum(diff**2, axis=-1))
    adj = dist <= radius
    np.fill_diagonal(adj, False)
    hoods = tuple(
        tuple(sorted([k] + np.flatnonzero(adj[k]).tolist())) for k in range(pos.shape[0])
    )
    pos.setflags(write=False)
    adj.setflags(write=False)
    return Network(positions=pos, radius=float(radius), adjacency=adj, neighborhoods=hoods)


def is_connected(network):
    """Breadth-first reachability of every node from node 0."""
    n = network.n_nodes
    seen = np.zeros(n, dtype=bool)
    seen[0] = True
    queue = deque([0])
    while queue:
        k = queue.popleft()
        for l in np.flatnonzero(network.adjacency[k]):
            if not seen[l]:
                seen[l] = True
                queue.append(l)
    return bool(seen.all())


def generate_rgg(n_nodes, radius, rng, max_attempts=MAX_RGG_ATTEMPTS):
    """Sample a connected random geometric graph on the unit square.

    Positions are drawn i.i.d. uniform and redrawn until the graph is
    connected.

    Parameters
    ----------
    n_nodes : int
    radius : float
        Communication range, ``0 < radius <= sqrt(2)``.
    rng : numpy.random.Generator
    max_attempts : int, optional

    Raises
    ------
    GenerationError
        If no connected realization appears within ``max_attempts`` draws.
    """
    if int(n_nodes) != n_nodes or n_nodes < 1:
        raise ParameterError(f"n_nodes must be a positive integer, got {n_nodes!r}")
    if not 0.0 < radius <= np.sqrt(2.0):
        raise ParameterError(f"radius must lie in (0, sqrt(2)], got {radius!r}")
    for _ in range(max_attempts):
        pos = rng.uniform(0.0, 1.0, size=(int(n_nodes), 2))
        net = network_from_positions(pos, radius)
        if is_connected(net):
            return net
    raise GenerationError(
        f"no connected {n_nodes}-node graph with radius {radius} "
        f"after {max_attempts} attempts",
        attempts=max_attempts,
    )


def _uniform_matrix(network):
    n = network.n_nodes
    a = np.zeros((n, n))
    for k, hood in enumerate(network.neighborhoods):
        a[list(hood), k] = 1.0 / len(hood)
    return a


def _metropolis_matrix(network):
    n = network.n_nodes
    deg = network.degrees
    a = np.zeros((n, n))
    for k, hood in enumerate(network.neighborhoods):
        for l in hood:
            if l != k:
                a[l, k] = 1.0 / max(deg[k], deg[l])
        a[k, k] = 1.0 - a[:, k].sum()
    return a


def weight_matrix(network, rule):
    """Single column-stochastic matrix built by ``rule``.

    ``rule`` is one of ``"identity"``, ``"uniform"`` (1/|N_k| over the closed
    neighborhood) or ``"metropolis"`` (1/max(|N_k|, |N_l|) off the diagonal,
    remainder on the diagonal).
    """
    if rule == "identity":
        return np.eye(network.n_nodes)
    if rule == "uniform":
        return _uniform_matrix(network)
    if rule == "metropolis":
        return _metropolis_matrix(network)
    raise ParameterError(f"unknown weight rule {rule!r}; expected one of {WEIGHT_RULES}")


def make_weights(network, a1="identity", a2="uniform", c="identity"):
    """Combination weights with a rule chosen independently per matrix."""
    return CombinationWeights(
        a1=weight_matrix(network, a1),
        a2=weight_matrix(network, a2),
        c=weight_matrix(network, c),
    )


def uniform_weights(network):
    """Adapt-then-combine weights: a1 = c = I, a2 uniform."""
    return make_weights(network, a1="identity", a2="uniform", c="identity")


def metropolis_weights(network):
    """Adapt-then-combine weights: a1 = c = I, a2 Metropolis."""
    return make_weights(network, a1="identity", a2="metropolis", c="identity")


def write_network_csv(network, path, header_lines=()):
    """Write node positions and the edge list as delimited text.

    Rows are ``node,k,x,y`` followed by ``edge,k,l,``. Lines in
    ``header_lines`` are emitted first, each prefixed with ``#``.
    """
    with open(path, "w", newline="") as fh:
        for line in header_lines:
            fh.write(f"# {line}\n")
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["kind", "k", "l_or_x", "y"])
        for k, (x, y) in enumerate(network.positions.tolist()):
            w.writerow(["node", k, repr(x), repr(y)])
        for k, l in network.edges():
            w.writerow(["edge", k, l, ""])
