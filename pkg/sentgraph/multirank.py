import csv, io, logging
from pathlib import Path
from typing import Optional, Sequence, Union

import numpy as np

from sentgraph.exceptions import Invalid
from sentgraph.objs.config import MultiRankParams
from sentgraph.objs.graph import MultiLayerGraph
from sentgraph.objs.results import CentralityResult, DerivedNetworks
from sentgraph.util import atomic_write

logger = logging.getLogger(__name__)


def _derive(adjacency: np.ndarray, z: np.ndarray):
    layer_weights = adjacency.sum(axis=(1, 2))
    strengths = adjacency.sum(axis=1)
    bipartite = np.zeros_like(strengths)
    nonempty = layer_weights > 0
    bipartite[nonempty] = strengths[nonempty] / layer_weights[nonempty, None]
    colored = np.tensordot(z, adjacency, axes=1)
    return layer_weights, bipartite, colored


def derive_networks(graph: MultiLayerGraph, z: Optional[Sequence[float]] = None) -> DerivedNetworks:
    """ Aggregate, bipartite and colored networks of ``graph`` for the influences ``z``.

        ``layer_weights[a]`` is the total weight of layer ``a``, ``bipartite[a, i]`` the in-strength of node
        ``i`` in layer ``a`` divided by that total (0 for an empty layer) and ``colored`` the sum of the layer
        matrices weighted by ``z``.

        Parameters:
            graph (:class:`~sentgraph.objs.graph.MultiLayerGraph`): Graph.
            z (Optional[Sequence[float]]): Nonnegative influence per layer, defaults to 1 for every layer.

        Raises:
            :class:`~sentgraph.exceptions.Invalid`: When ``z`` has the wrong length or a negative entry.
    """
    z = np.ones(len(graph.layers)) if z is None else np.asarray(z, dtype=float)
    if z.shape != (len(graph.layers),):
        raise Invalid(f"z must have one entry per layer ({len(graph.layers)}), got shape {z.shape}")
    if np.any(z < 0):
        raise Invalid("z must be nonnegative")
    layer_weights, bipartite, colored = _derive(graph.adjacency, z)
    return DerivedNetworks({"layer_weights": layer_weights, "bipartite": bipartite, "colored": colored})


def _x_step(colored: np.ndarray, x: np.ndarray, damping: float) -> np.ndarray:
    n = len(x)
    strength = colored.sum(axis=1)
    outgoing = np.divide(x, strength, out=np.zeros_like(x), where=strength > 0)
    dangling = x[strength == 0].sum()
    x_new = damping * (colored.T @ outgoing + dangling / n) + (1.0 - damping) / n
    return x_new / x_new.sum()


def multirank(graph: MultiLayerGraph, params: Optional[MultiRankParams] = None) -> CentralityResult:
    """ Solves the coupled MultiRank fixed point for node centralities and layer influences.

        Starting from uniform ``x`` and ``z = 1``, every iteration rebuilds the colored network from ``z``,
        runs one damped random-walk step for ``x`` (dangling nodes spread their mass uniformly, teleportation
        ``(1 - damping) / n``) and then sets ``z[a]`` proportional to ``W[a] * sum_i B[a, i] * x[i]``, scaled so
        that ``z`` sums to the number of layers. Iteration stops when the L1 changes of both ``x`` and ``z``
        fall below the tolerance or at the iteration cap.

        Parameters:
            graph (:class:`~sentgraph.objs.graph.MultiLayerGraph`): Graph with at least one node.
            params (Optional[:class:`~sentgraph.objs.config.MultiRankParams`]): Solver options.

        Returns:
            :class:`~sentgraph.objs.results.CentralityResult`: A graph with no edges at all yields uniform
            ``x`` and ``z = 1`` after one iteration.

        Raises:
            :class:`~sentgraph.exceptions.Invalid`: When the graph has no nodes.
    """
    params = params or MultiRankParams()
    n = graph.n_nodes
    layers = len(graph.layers)
    if n < 1:
        raise Invalid("multirank needs a graph with at least one node")
    adjacency = graph.adjacency
    x = np.full(n, 1.0 / n)
    z = np.ones(layers)

    if not np.any(adjacency):
        logger.debug(f"{graph}: no edges, centrality is uniform")
        return CentralityResult({
            "x": x, "z": z, "layers": [k.value for k in graph.layers], "iterations": 1,
            "final_residual": 0.0, "converged": True, "trace": [(1, 0.0, 0.0)]
        })

    trace = []
    converged = False
    residual = float("inf")
    iteration = 0
    for iteration in range(1, params.max_iterations + 1):
        layer_weights, bipartite, colored = _derive(adjacency, z)
        x_new = _x_step(colored, x, params.damping)
        raw = layer_weights * (bipartite @ x_new)
        omega = raw.sum() / layers
        z_new = raw / omega if omega > 0 else np.ones(layers)
        residual_x = float(np.abs(x_new - x).sum())
        residual_z = float(np.abs(z_new - z).sum())
        x, z = x_new, z_new
        trace.append((iteration, residual_x, residual_z))
        residual = max(residual_x, residual_z)
        logger.debug(f"multirank iteration {iteration}: residual_x={residual_x:.3e} residual_z={residual_z:.3e}")
        if residual_x < params.tolerance and residual_z < params.tolerance:
            converged = True
            break

    if not converged:
        logger.warning(f"{graph}: multirank did not converge after {iteration} iterations (residual {residual:.3e})")
    return CentralityResult({
        "x": x, "z": z, "layers": [k.value for k in graph.layers], "iterations": iteration,
        "final_residual": residual, "converged": converged, "trace": trace
    })


def pagerank_result(adjacency, damping: float = 0.85, tolerance: float = 1e-9,
                    max_iterations: int = 1000) -> CentralityResult:
    """ PageRank with diagnostics, see :func:`pagerank`. The result has no layer influences. """
    adjacency = np.asarray(adjacency, dtype=float)
    if adjacency.ndim != 2 or adjacency.shape[0] != adjacency.shape[1] or adjacency.shape[0] < 1:
        raise Invalid(f"pagerank needs a nonempty square matrix, got shape {adjacency.shape}")
    if np.any(adjacency < 0):
        raise Invalid("pagerank needs nonnegative weights")
    if not 0 < damping < 1:
        raise Invalid(f"damping must be in (0, 1), got {damping}")
    n = adjacency.shape[0]
    x = np.full(n, 1.0 / n)
    trace = []
    converged = False
    residual = float("inf")
    iteration = 0
    for iteration in range(1, max_iterations + 1):
        x_new = _x_step(adjacency, x, damping)
        residual = float(np.abs(x_new - x).sum())
        x = x_new
        trace.append((iteration, residual, 0.0))
        if residual < tolerance:
            converged = True
            break
    if not converged:
        logger.warning(f"pagerank did not converge after {iteration} iterations (residual {residual:.3e})")
    return CentralityResult({
        "x": x, "iterations": iteration, "final_residual": residual, "converged": converged, "trace": trace
    })


def pagerank(adjacency, damping: float = 0.85, tolerance: float = 1e-9, max_iterations: int = 1000) -> np.ndarray:
    """ PageRank by power iteration.

        Edge ``j -> i`` has weight ``adjacency[j, i]``; every node spreads its mass in proportion to its
        outgoing weights, nodes without outgoing weight spread it uniformly, and every node receives
        ``(1 - damping) / n`` teleportation.

        Parameters:
            adjacency (array-like): ``n x n`` nonnegative matrix, ``n >= 1``.
            damping (float): Damping factor in (0, 1).
            tolerance (float): L1 convergence tolerance.
            max_iterations (int): Iteration cap.

        Returns:
            numpy.ndarray: Centralities summing to 1.
    """
    return np.array(pagerank_result(adjacency, damping=damping, tolerance=tolerance, max_iterations=max_iterations).x)


def write_trace(result: CentralityResult, path: Union[str, Path]):
    """ Writes the convergence trace as CSV with the columns ``iteration,residual_x,residual_z``. """
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(["iteration", "residual_x", "residual_z"])
    for iteration, residual_x, residual_z in result.trace:
        writer.writerow([iteration, repr(residual_x), repr(residual_z)])
    atomic_write(path, buffer.getvalue())
