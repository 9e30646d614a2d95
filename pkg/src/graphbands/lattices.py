"""Built-in quotient-graph generators for the standard crystal lattices.

Each generator emits a PeriodicGraphSpec with a fixed vertex order and a
fixed edge-index list, so identical parameters always produce byte-identical
specs.  Index lists for the cubic-derived crystals are transcribed, not
re-derived from coordinates: the closed-form spectra checked in the tests
depend on these exact offsets.
"""

from __future__ import annotations

import re
from collections import deque
from dataclasses import dataclass

from .errors import ParameterError, ValidationError
from .graph import EdgeRecord, PeriodicGraphSpec, VertexInfo, with_potentials


def _unit(dimension: int, axis: int) -> tuple[int, ...]:
    return tuple(1 if s == axis else 0 for s in range(dimension))


def _zero(dimension: int) -> tuple[int, ...]:
    return (0,) * dimension


def _apply_q(spec: PeriodicGraphSpec, q) -> PeriodicGraphSpec:
    if q is None:
        return spec
    if isinstance(q, (int, float)):
        q = (q,) * spec.num_vertices
    return with_potentials(spec, q)


def cubic(dimension: int, q=None) -> PeriodicGraphSpec:
    """Integer lattice: one cell vertex carrying one loop per axis."""
    if dimension < 1:
        raise ParameterError("cubic lattice needs dimension >= 1")
    vertices = (VertexInfo("v1", position=_zero(dimension)),)
    edges = tuple(EdgeRecord(0, 0, _unit(dimension, s)) for s in range(dimension))
    return _apply_q(PeriodicGraphSpec(dimension, vertices, edges), q)


def triangular(q=None) -> PeriodicGraphSpec:
    """Planar lattice of coordination 6: one vertex, three crossing loops."""
    vertices = (VertexInfo("v1", position=(0.0, 0.0)),)
    edges = (
        EdgeRecord(0, 0, (1, 0)),
        EdgeRecord(0, 0, (0, 1)),
        EdgeRecord(0, 0, (1, 1)),
    )
    return _apply_q(PeriodicGraphSpec(2, vertices, edges), q)


def hexagonal(q=None) -> PeriodicGraphSpec:
    """Honeycomb lattice: two vertices joined by three parallel edges."""
    vertices = (
        VertexInfo("v1", position=(0.0, 0.0)),
        VertexInfo("v2", position=(1.0 / 3.0, 1.0 / 3.0)),
    )
    edges = (
        EdgeRecord(0, 1, (0, 0)),
        EdgeRecord(0, 1, (1, 0)),
        EdgeRecord(0, 1, (0, 1)),
    )
    return _apply_q(PeriodicGraphSpec(2, vertices, edges), q)


def bcc(q=None) -> PeriodicGraphSpec:
    """Body-centered cubic lattice: corner vertex plus cube-center vertex."""
    vertices = (
        VertexInfo("corner", position=(0.0, 0.0, 0.0)),
        VertexInfo("center", position=(0.5, 0.5, 0.5)),
    )
    edges = (
        EdgeRecord(1, 1, (1, 0, 0)),
        EdgeRecord(1, 1, (0, 1, 0)),
        EdgeRecord(1, 1, (0, 0, 1)),
        EdgeRecord(0, 1, (0, 0, 0)),
        EdgeRecord(0, 1, (1, 0, 0)),
        EdgeRecord(0, 1, (0, 1, 0)),
        EdgeRecord(0, 1, (0, 0, 1)),
        EdgeRecord(0, 1, (1, 1, 0)),
        EdgeRecord(0, 1, (1, 0, 1)),
        EdgeRecord(0, 1, (0, 1, 1)),
        EdgeRecord(0, 1, (1, 1, 1)),
    )
    return _apply_q(PeriodicGraphSpec(3, vertices, edges), q)


def fcc(q=None) -> PeriodicGraphSpec:
    """Face-centered cubic lattice: three face vertices plus the corner vertex."""
    vertices = (
        VertexInfo("face_xy", position=(0.5, 0.5, 0.0)),
        VertexInfo("face_xz", position=(0.5, 0.0, 0.5)),
        VertexInfo("face_yz", position=(0.0, 0.5, 0.5)),
        VertexInfo("corner", position=(0.0, 0.0, 0.0)),
    )
    edges = (
        EdgeRecord(3, 3, (1, 0, 0)),
        EdgeRecord(3, 3, (0, 1, 0)),
        EdgeRecord(3, 3, (0, 0, 1)),
        EdgeRecord(0, 3, (0, 0, 0)),
        EdgeRecord(0, 3, (1, 0, 0)),
        EdgeRecord(0, 3, (0, 1, 0)),
        EdgeRecord(0, 3, (1, 1, 0)),
        EdgeRecord(1, 3, (0, 0, 0)),
        EdgeRecord(1, 3, (1, 0, 0)),
        EdgeRecord(1, 3, (0, 0, 1)),
        EdgeRecord(1, 3, (1, 0, 1)),
        EdgeRecord(2, 3, (0, 0, 0)),
        EdgeRecord(2, 3, (0, 1, 0)),
        EdgeRecord(2, 3, (0, 0, 1)),
        EdgeRecord(2, 3, (0, 1, 1)),
    )
    return _apply_q(PeriodicGraphSpec(3, vertices, edges), q)


def star(dimension: int, nu: int, q=None) -> PeriodicGraphSpec:
    """Integer-lattice hub decorated with nu-1 pendant vertices (hub last)."""
    if dimension < 1:
        raise ParameterError("star lattice needs dimension >= 1")
    if nu < 2:
        raise ParameterError("star lattice needs at least 2 cell vertices")
    vertices = tuple(VertexInfo(f"p{j + 1}") for j in range(nu - 1)) + (
        VertexInfo("hub"),
    )
    hub = nu - 1
    edges = tuple(EdgeRecord(j, hub, _zero(dimension)) for j in range(nu - 1))
    edges += tuple(EdgeRecord(hub, hub, _unit(dimension, s)) for s in range(dimension))
    return _apply_q(PeriodicGraphSpec(dimension, vertices, edges), q)


def subdivided(dimension: int, n: int, q=None) -> PeriodicGraphSpec:
    """Integer lattice with n extra vertices on every edge (hub last).

    Axis s carries the path hub - w[s,1] - ... - w[s,n] - hub where only the
    closing edge crosses a cell boundary.  Any other single placement of the
    crossing along the path gives a unitarily equivalent fiber.
    """
    if dimension < 1:
        raise ParameterError("subdivided lattice needs dimension >= 1")
    if n < 1:
        raise ParameterError("subdivided lattice needs n >= 1 added vertices per edge")
    vertices = []
    positions_step = 1.0 / (n + 1)
    for s in range(dimension):
        for i in range(n):
            pos = tuple(
                (i + 1) * positions_step if axis == s else 0.0
                for axis in range(dimension)
            )
            vertices.append(VertexInfo(f"w{s + 1}_{i + 1}", position=pos))
    vertices.append(VertexInfo("hub", position=_zero(dimension)))
    hub = dimension * n
    edges = []
    for s in range(dimension):
        first = s * n
        edges.append(EdgeRecord(hub, first, _zero(dimension)))
        for i in range(n - 1):
            edges.append(EdgeRecord(first + i, first + i + 1, _zero(dimension)))
        edges.append(EdgeRecord(first + n - 1, hub, _unit(dimension, s)))
    return _apply_q(PeriodicGraphSpec(dimension, tuple(vertices), tuple(edges)), q)


def bipartite_chain(dimension: int, nu: int, q=None) -> PeriodicGraphSpec:
    """Bipartite 4-regular chain closed by one crossing loop at each end.

    Consecutive vertices are joined by double zero-index edges so every
    degree is even; the two end loops carry the axis offsets, which keeps the
    cover connected for dimension <= 2 and bipartite for every length.
    """
    if not 1 <= dimension <= 2:
        raise ParameterError("bipartite chain exists for dimension 1 or 2 only")
    if nu < 2:
        raise ParameterError("bipartite chain needs at least 2 cell vertices")
    vertices = tuple(VertexInfo(f"c{j + 1}") for j in range(nu))
    edges = []
    for j in range(nu - 1):
        edges.append(EdgeRecord(j, j + 1, _zero(dimension)))
        edges.append(EdgeRecord(j, j + 1, _zero(dimension)))
    edges.append(EdgeRecord(0, 0, _unit(dimension, 0)))
    edges.append(EdgeRecord(nu - 1, nu - 1, _unit(dimension, dimension - 1)))
    return _apply_q(PeriodicGraphSpec(dimension, vertices, tuple(edges)), q)


@dataclass(frozen=True)
class FiniteGraph:
    """A finite attachment graph glued onto a periodic base by decorate()."""

    size: int
    edges: tuple[tuple[int, int], ...]
    potentials: tuple[float, ...] | None = None

    def __post_init__(self):
        object.__setattr__(self, "size", int(self.size))
        object.__setattr__(
            self, "edges", tuple((int(a), int(b)) for a, b in self.edges)
        )
        if self.size < 1:
            raise ParameterError("attachment graph needs at least one vertex")
        for a, b in self.edges:
            if not (0 <= a < self.size and 0 <= b < self.size):
                raise ParameterError("attachment edge references an invalid vertex")
        if self.potentials is not None:
            values = tuple(float(x) for x in self.potentials)
            if len(values) != self.size:
                raise ParameterError("attachment potential count mismatch")
            object.__setattr__(self, "potentials", values)

    def is_connected(self) -> bool:
        adjacency = [[] for _ in range(self.size)]
        for a, b in self.edges:
            adjacency[a].append(b)
            adjacency[b].append(a)
        seen = {0}
        queue = deque([0])
        while queue:
            u = queue.popleft()
            for v in adjacency[u]:
                if v not in seen:
                    seen.add(v)
                    queue.append(v)
        return len(seen) == self.size


def decorate(
    base: PeriodicGraphSpec,
    attachment: FiniteGraph,
    attach_vertex: int,
    glue_vertex: int = 0,
) -> PeriodicGraphSpec:
    """Glue a copy of a finite graph onto one cell vertex of the base.

    The attachment's glue_vertex is identified with base vertex
    attach_vertex; all new edges carry zero indices, so bridges (and any
    phase-flipping corner point) of the base are preserved.
    """
    if not 0 <= attach_vertex < base.num_vertices:
        raise ParameterError("attach_vertex is out of range")
    if not 0 <= glue_vertex < attachment.size:
        raise ParameterError("glue_vertex is out of range")
    if not attachment.is_connected():
        raise ValidationError("attachment graph must be connected")
    mapping = {}
    new_vertices = list(base.vertices)
    for j in range(attachment.size):
        if j == glue_vertex:
            mapping[j] = attach_vertex
            continue
        mapping[j] = len(new_vertices)
        potential = attachment.potentials[j] if attachment.potentials else 0.0
        new_vertices.append(VertexInfo(f"dec{j + 1}", potential=potential))
    zero = _zero(base.dimension)
    new_edges = list(base.edges)
    for a, b in attachment.edges:
        new_edges.append(EdgeRecord(mapping[a], mapping[b], zero))
    return PeriodicGraphSpec(base.dimension, tuple(new_vertices), tuple(new_edges))


BUILTINS = {
    "cubic": (cubic, "cubic(d)", "integer lattice: 1 cell vertex with d loop edges"),
    "triangular": (
        triangular,
        "triangular",
        "planar lattice of coordination 6: 1 vertex, 3 crossing loops",
    ),
    "hexagonal": (
        hexagonal,
        "hexagonal",
        "honeycomb lattice: 2 vertices joined by 3 parallel edges",
    ),
    "bcc": (
        bcc,
        "bcc",
        "body-centered cubic: 2 vertices, 3 loops plus 8 cross edges",
    ),
    "fcc": (
        fcc,
        "fcc",
        "face-centered cubic: 4 vertices, 3 loops plus 12 cross edges",
    ),
    "star": (
        star,
        "star(d, nu)",
        "integer-lattice hub with nu-1 pendant vertices",
    ),
    "subdivided": (
        subdivided,
        "subdivided(d, n)",
        "integer lattice with n extra vertices on every edge",
    ),
    "bipartite_chain": (
        bipartite_chain,
        "bipartite_chain(d, nu)",
        "bipartite 4-regular chain closed by crossing loops (d <= 2)",
    ),
}

_BUILTIN_RE = re.compile(r"^([a-z_]+)\s*(?:\(([^()]*)\))?$")


def parse_builtin(text: str) -> PeriodicGraphSpec:
    """Instantiate a generator from an id like 'fcc' or 'star(2, 3)'."""
    match = _BUILTIN_RE.match(text.strip())
    if not match:
        raise ValidationError(f"cannot parse builtin id {text!r}")
    name, arg_text = match.groups()
    if name not in BUILTINS:
        known = ", ".join(sorted(BUILTINS))
        raise ValidationError(f"unknown builtin {name!r} (known: {known})")
    args = []
    if arg_text:
        for piece in arg_text.split(","):
            piece = piece.strip()
            try:
                args.append(int(piece))
            except ValueError:
                raise ValidationError(
                    f"builtin argument {piece!r} is not an integer"
                ) from None
    factory = BUILTINS[name][0]
    try:
        return factory(*args)
    except TypeError:
        raise ValidationError(
            f"wrong number of arguments for builtin {BUILTINS[name][1]}"
        ) from None


def builtin_catalog() -> tuple[tuple[str, str], ...]:
    """(signature, description) rows in a stable order for the CLI listing."""
    return tuple((sig, desc) for _, sig, desc in BUILTINS.values())
