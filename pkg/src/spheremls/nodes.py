"""Node sets on the sphere.

Provides the symmetric Fibonacci grid family, exact separation distances,
sampled fill-distance estimates and geodesic cap range queries.  Range
queries run on a KD-tree in the ambient space: the Euclidean chord
``2 sin(theta / 2)`` is monotone in the geodesic distance ``theta``, so a
chord-radius ball query followed by an exact geodesic filter returns
exactly the nodes inside an open cap.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.spatial import cKDTree

from ._validation import check_unit_vector, check_unit_vectors
from .geometry import geodesic_distances

__all__ = [
    "NodeSet",
    "FillEstimate",
    "fibonacci_grid",
    "node_count_in_cap_bound",
    "load_nodes",
]

# All-pairs separation scan up to this size; KD-tree nearest neighbors above.
ALL_PAIRS_LIMIT = 20_000

_GOLDEN = (1.0 + np.sqrt(5.0)) / 2.0


def _chord(theta: float) -> float:
    return 2.0 * np.sin(min(theta, np.pi) / 2.0)


def _geodesic_from_chord(c):
    return 2.0 * np.arcsin(np.clip(np.asarray(c) / 2.0, -1.0, 1.0))


@dataclass(frozen=True)
class FillEstimate:
    """A sampled lower bound on the fill distance, with probe bookkeeping."""

    value: float
    probe_count: int
    grid_probes: int
    random_probes: int
    seed: int


class NodeSet:
    """Immutable collection of distinct unit vectors with query acceleration.

    Parameters
    ----------
    points : array_like, shape (N, d)
        Rows of unit norm (within 1e-6, renormalized on construction).

    Notes
    -----
    Separation distance and fill estimates are computed lazily and cached;
    the instance is safe for concurrent read access afterwards.
    """

    def __init__(self, points):
        pts = check_unit_vectors(points, name="points")
        if pts.shape[0] < 1:
            raise ValueError("a node set needs at least one point")
        pts.flags.writeable = False
        self._points = pts
        self._tree = None
        self._separation = None
        self._fill_cache: dict[tuple[int, int], FillEstimate] = {}

    # -- basic accessors ------------------------------------------------

    @property
    def points(self) -> np.ndarray:
        return self._points

    @property
    def n(self) -> int:
        return self._points.shape[0]

    @property
    def dim(self) -> int:
        return self._points.shape[1]

    def __len__(self) -> int:
        return self.n

    def __repr__(self) -> str:
        return f"NodeSet(n={self.n}, dim={self.dim})"

    @property
    def tree(self) -> cKDTree:
        if self._tree is None:
            self._tree = cKDTree(self._points)
        return self._tree

    # -- grid characteristics -------------------------------------------

    @property
    def separation_distance(self) -> float:
        """Half the minimal pairwise geodesic distance, computed exactly.

        Uses an all-pairs scan for N <= ALL_PAIRS_LIMIT and exact KD-tree
        nearest-neighbor queries above.
        """
        if self._separation is None:
            if self.n < 2:
                raise ValueError("separation distance needs at least 2 nodes")
            if self.n <= ALL_PAIRS_LIMIT:
                max_dot = -np.inf
                pts = self._points
                step = max(1, int(2e6) // max(self.n, 1))
                for lo in range(0, self.n, step):
                    block = pts[lo:lo + step] @ pts.T
                    # mask the diagonal of this block
                    rows = np.arange(block.shape[0])
                    block[rows, lo + rows] = -np.inf
                    max_dot = max(max_dot, float(block.max()))
                min_dist = float(np.arccos(np.clip(max_dot, -1.0, 1.0)))
            else:
                d, _ = self.tree.query(self._points, k=2)
                min_dist = float(_geodesic_from_chord(d[:, 1].min()))
            if min_dist <= 0.0:
                raise ValueError("node set contains duplicate points")
            self._separation = 0.5 * min_dist
        return self._separation

    def fill_distance_estimate(self, samples: int = 20_000,
                               seed: int = 0) -> float:
        """Sampled lower bound on the fill distance, in radians.

        Probes are a Fibonacci grid of at least ``100 * N`` points (d = 3
        only) plus ``samples`` seeded uniform random points; the estimate
        is the largest probe-to-nearest-node distance.  It never exceeds
        the true fill distance, and more random probes never decrease it
        because seeded draws are prefix-stable.
        """
        if samples < 1:
            raise ValueError("samples must be >= 1")
        key = (samples, seed)
        if key not in self._fill_cache:
            self._fill_cache[key] = self._estimate_fill(samples, seed)
        return self._fill_cache[key].value

    def fill_estimate_info(self, samples: int = 20_000,
                           seed: int = 0) -> FillEstimate:
        """The :class:`FillEstimate` backing :meth:`fill_distance_estimate`."""
        self.fill_distance_estimate(samples, seed)
        return self._fill_cache[(samples, seed)]

    def _estimate_fill(self, samples: int, seed: int) -> FillEstimate:
        grid_probes = 0
        worst_chord = 0.0
        if self.dim == 3:
            m = (100 * self.n + 1) // 2
            probe_grid = fibonacci_points(max(m, 50))
            grid_probes = probe_grid.shape[0]
            worst_chord = self._max_probe_chord(probe_grid)
        rng = np.random.default_rng(seed)
        random_probes = samples if self.dim == 3 else 100 * self.n + samples
        chunk = 200_000
        done = 0
        while done < random_probes:
            take = min(chunk, random_probes - done)
            g = rng.standard_normal((take, self.dim))
            g /= np.linalg.norm(g, axis=1, keepdims=True)
            worst_chord = max(worst_chord, self._max_probe_chord(g))
            done += take
        return FillEstimate(
            value=float(_geodesic_from_chord(worst_chord)),
            probe_count=grid_probes + random_probes,
            grid_probes=grid_probes,
            random_probes=random_probes,
            seed=seed,
        )

    def _max_probe_chord(self, probes: np.ndarray) -> float:
        worst = 0.0
        for lo in range(0, probes.shape[0], 200_000):
            d, _ = self.tree.query(probes[lo:lo + 200_000], workers=-1)
            worst = max(worst, float(d.max()))
        return worst

    # -- range queries ----------------------------------------------------

    def neighbors_in_cap(self, center, delta: float) -> np.ndarray:
        """Indices of nodes strictly inside the open cap around ``center``.

        Returns ascending indices, identical to a brute-force scan with
        the comparator ``arccos(clip(<y_i, center>)) < delta``.
        """
        if not delta > 0:
            raise ValueError("delta must be positive")
        center = check_unit_vector(center, name="center")
        if center.shape[0] != self.dim:
            raise ValueError(
                f"center has dimension {center.shape[0]}, nodes {self.dim}")
        # inflate the chord radius so borderline candidates reach the
        # exact geodesic filter below
        radius = _chord(delta) * (1.0 + 1e-12) + 1e-12
        idx = np.asarray(self.tree.query_ball_point(center, radius),
                         dtype=np.intp)
        if idx.size == 0:
            return idx
        idx.sort()
        dist = geodesic_distances(self._points[idx], center)
        return idx[dist < delta]

    # -- persistence ------------------------------------------------------

    @classmethod
    def from_file(cls, path) -> "NodeSet":
        """Read nodes from a text file, one point per line.

        Coordinates are whitespace separated; lines starting with ``#``
        are ignored.
        """
        rows = []
        width = None
        with open(path, "r", encoding="utf-8") as fh:
            for lineno, line in enumerate(fh, start=1):
                stripped = line.strip()
                if not stripped or stripped.startswith("#"):
                    continue
                parts = stripped.split()
                if width is None:
                    width = len(parts)
                elif len(parts) != width:
                    raise ValueError(
                        f"{path}:{lineno}: expected {width} coordinates, "
                        f"got {len(parts)}")
                rows.append([float(p) for p in parts])
        if not rows:
            raise ValueError(f"{path}: no points found")
        return cls(np.asarray(rows))

    def save(self, path) -> None:
        """Write nodes as plain text, 17 significant digits per coordinate."""
        with open(path, "w", encoding="utf-8") as fh:
            for row in self._points:
                fh.write(" ".join(format(v, ".17g") for v in row) + "\n")


def fibonacci_points(n: int) -> np.ndarray:
    """Raw coordinates of the symmetric Fibonacci grid with ``2n + 1`` points."""
    if n < 1:
        raise ValueError("n must be >= 1")
    i = np.arange(-n, n + 1, dtype=float)
    count = 2 * n + 1
    z = 2.0 * i / count
    lam = 2.0 * np.pi * i / _GOLDEN
    r = np.sqrt(np.maximum(1.0 - z * z, 0.0))
    return np.column_stack([r * np.cos(lam), r * np.sin(lam), z])


def fibonacci_grid(n: int) -> NodeSet:
    """Symmetric Fibonacci grid on ``S^2`` with ``N = 2n + 1`` nodes.

    Row ``i`` (i = -n..n) sits at height ``z_i = 2i / (2n + 1)`` and
    longitude ``2 pi i / golden_ratio``; the symmetric index range avoids
    clustering at the poles.  Deterministic in ``n``.
    """
    return NodeSet(fibonacci_points(n))


def node_count_in_cap_bound(q: float, delta: float, d: int) -> float:
    """Upper bound on how many nodes with separation ``q`` fit in a cap.

    For any node set with separation distance ``q`` and any open cap of
    radius ``delta`` on ``S^{d-1}`` the node count is at most
    ``((q + delta) / q)^(d-1) * (pi / 2)^(d-2)``.
    """
    if not (q > 0 and delta > 0):
        raise ValueError("q and delta must be positive")
    if d < 2:
        raise ValueError("d must be >= 2")
    return ((q + delta) / q) ** (d - 1) * (np.pi / 2.0) ** (d - 2)


def load_nodes(path) -> NodeSet:
    """Alias for :meth:`NodeSet.from_file`."""
    return NodeSet.from_file(path)
