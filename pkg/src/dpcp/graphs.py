"""Graphs, per-vertex inputs, language membership oracles, and generators.

Vertex ids are 0..n-1 and globally known.  The closed neighborhood N(i)
includes i itself; adjacency lists store only the open neighborhood and
helpers expose both.  All verified instances come from the promise family
of connected graphs, checked at construction.
"""

from __future__ import annotations

import enum
from collections import deque
from dataclasses import dataclass, replace
from typing import FrozenSet, Iterable, List, Optional, Sequence, Tuple

from .errors import FormatError, GenerationError
from .rng import SplitMix, chain

ROOT_MARKER = "root"


class Language(enum.Enum):
    NONBIPARTITE = "nonbipartite"
    LEADER = "leader"
    SPAN = "span"

    @classmethod
    def from_string(cls, name: str) -> "Language":
        try:
            return cls(name.strip().lower())
        except ValueError:
            raise FormatError(f"unknown language: {name!r}") from None


class Graph:
    """Undirected simple graph on vertices 0..n-1."""

    __slots__ = ("_n", "_adj")

    def __init__(self, n: int, edges: Iterable[Tuple[int, int]],
                 require_connected: bool = True):
        if n < 1:
            raise FormatError("graphs need at least one vertex")
        adj: List[set] = [set() for _ in range(n)]
        for u, v in edges:
            if not (0 <= u < n and 0 <= v < n):
                raise FormatError(f"edge ({u},{v}) out of range for n={n}")
            if u == v:
                raise FormatError(f"self-loop at vertex {u}")
            if v in adj[u]:
                raise FormatError(f"duplicate edge ({u},{v})")
            adj[u].add(v)
            adj[v].add(u)
        self._n = n
        self._adj = tuple(tuple(sorted(s)) for s in adj)
        if require_connected and not self.is_connected():
            raise GenerationError("graph violates the connectivity promise")

    @property
    def n(self) -> int:
        return self._n

    def neighbors(self, i: int) -> Tuple[int, ...]:
        """Open neighborhood, i excluded."""
        return self._adj[i]

    def closed_neighborhood(self, i: int) -> Tuple[int, ...]:
        """N(i) under the convention that i belongs to it."""
        return tuple(sorted(self._adj[i] + (i,)))

    def degree(self, i: int) -> int:
        return len(self._adj[i])

    def has_edge(self, u: int, v: int) -> bool:
        return v in self._adj[u]

    def edges(self) -> List[Tuple[int, int]]:
        return [(u, v) for u in range(self._n) for v in self._adj[u] if u < v]

    def edge_count(self) -> int:
        return sum(len(a) for a in self._adj) // 2

    def is_connected(self) -> bool:
        seen = [False] * self._n
        seen[0] = True
        queue = deque([0])
        count = 1
        while queue:
            u = queue.popleft()
            for v in self._adj[u]:
                if not seen[v]:
                    seen[v] = True
                    count += 1
                    queue.append(v)
        return count == self._n

    def csr(self):
        """Adjacency in CSR form for the Monte Carlo kernels."""
        import numpy as np
        indptr = np.zeros(self._n + 1, dtype=np.int64)
        for i in range(self._n):
            indptr[i + 1] = indptr[i] + len(self._adj[i])
        indices = np.empty(indptr[-1], dtype=np.int64)
        pos = 0
        for i in range(self._n):
            for v in self._adj[i]:
                indices[pos] = v
                pos += 1
        return indptr, indices

    def __eq__(self, other) -> bool:
        return isinstance(other, Graph) and self._n == other._n and self._adj == other._adj

    def __repr__(self) -> str:
        return f"Graph(n={self._n}, m={self.edge_count()})"


@dataclass(frozen=True)
class Instance:
    """A promise-family graph together with one input string per vertex."""

    graph: Graph
    inputs: Tuple[str, ...]

    def __post_init__(self):
        if len(self.inputs) != self.graph.n:
            raise FormatError("inputs must cover exactly the vertex set")

    @classmethod
    def bare(cls, graph: Graph) -> "Instance":
        return cls(graph, tuple("" for _ in range(graph.n)))

    def x(self, i: int) -> str:
        return self.inputs[i]

    def with_inputs(self, inputs: Sequence[str]) -> "Instance":
        return Instance(self.graph, tuple(inputs))


# ---------------------------------------------------------------------------
# Language oracles
# ---------------------------------------------------------------------------

def is_nonbipartite(g: Graph) -> bool:
    """True iff no proper 2-coloring exists (BFS coloring attempt)."""
    color = [-1] * g.n
    for start in range(g.n):
        if color[start] != -1:
            continue
        color[start] = 0
        queue = deque([start])
        while queue:
            u = queue.popleft()
            for v in g.neighbors(u):
                if color[v] == -1:
                    color[v] = color[u] ^ 1
                    queue.append(v)
                elif color[v] == color[u]:
                    return True
    return False


def find_odd_cycle(g: Graph) -> Optional[FrozenSet[int]]:
    """Vertex set of a shortest odd cycle, or None on bipartite graphs.

    Among all shortest odd cycles the one with the lexicographically
    smallest sorted vertex-id sequence is returned, which makes the honest
    prover deterministic.
    """
    if not is_nonbipartite(g):
        return None
    for length in range(3, g.n + 1, 2):
        found: List[Tuple[int, ...]] = []
        for anchor in range(g.n):
            _extend_cycle(g, anchor, [anchor], length, found)
        if found:
            return frozenset(min(found))
    raise AssertionError("nonbipartite graph without an odd cycle")


def _extend_cycle(g: Graph, anchor: int, path: List[int], length: int,
                  found: List[Tuple[int, ...]]) -> None:
    if len(path) == length:
        if g.has_edge(path[-1], anchor):
            found.append(tuple(sorted(path)))
        return
    for v in g.neighbors(path[-1]):
        # anchor stays the cycle minimum so each cycle appears predictably
        if v > anchor and v not in path:
            path.append(v)
            _extend_cycle(g, anchor, path, length, found)
            path.pop()


def leader_count(inst: Instance) -> int:
    """Number of vertices with input 1; membership in Leader means 1."""
    count = 0
    for i in range(inst.graph.n):
        x = inst.x(i)
        if x == "1":
            count += 1
        elif x != "0":
            raise FormatError(f"leader input at vertex {i} must be 0 or 1, got {x!r}")
    return count


def parse_parent(inst: Instance, i: int) -> Optional[object]:
    """Parse x(i) for the spanning-tree language.

    Returns ROOT_MARKER, a vertex id, or None when the string is not a
    well-formed pointer (which is a rejected instance, not an error).
    """
    x = inst.x(i)
    if x == ROOT_MARKER:
        return ROOT_MARKER
    if not x.isdigit():
        return None
    v = int(x)
    if not 0 <= v < inst.graph.n:
        return None
    return v


def is_valid_spanning_tree(inst: Instance) -> bool:
    """True iff the parent pointers in x define a spanning tree.

    Exactly one root, every non-root names a graph neighbor, and following
    parent pointers from every vertex reaches the root.
    """
    g = inst.graph
    parents: List[Optional[int]] = [None] * g.n
    roots = []
    for i in range(g.n):
        p = parse_parent(inst, i)
        if p == ROOT_MARKER:
            roots.append(i)
        elif p is None:
            return False
        else:
            if p == i or not g.has_edge(i, p):
                return False
            parents[i] = p
    if len(roots) != 1:
        return False
    root = roots[0]
    for i in range(g.n):
        cur = i
        for _ in range(g.n):
            if cur == root:
                break
            cur = parents[cur]
        else:
            return False
    return True


def span_parent_array(inst: Instance):
    """Parent pointers as arrays for verifiers and kernels.

    parent[i] is -1 for a root claim, -2 when x(i) does not name any
    queryable vertex, else the named id.  syntax[i] records the local
    syntactic check: x(i) is 'root' or names a member of N(i) other than i.
    """
    import numpy as np
    g = inst.graph
    parent = np.full(g.n, -2, dtype=np.int64)
    syntax = np.zeros(g.n, dtype=np.uint8)
    for i in range(g.n):
        p = parse_parent(inst, i)
        if p == ROOT_MARKER:
            parent[i] = -1
            syntax[i] = 1
        elif p is None:
            parent[i] = -2
        else:
            parent[i] = p if p != i else -2
            if p != i and g.has_edge(i, p):
                syntax[i] = 1
    return parent, syntax


def membership(inst: Instance, language: Language) -> bool:
    if language is Language.NONBIPARTITE:
        return is_nonbipartite(inst.graph)
    if language is Language.LEADER:
        return leader_count(inst) == 1
    return is_valid_spanning_tree(inst)


# ---------------------------------------------------------------------------
# Generators
# ---------------------------------------------------------------------------

def cycle_graph(m: int) -> Graph:
    if m < 3:
        raise GenerationError("cycles need at least 3 vertices")
    return Graph(m, [(i, (i + 1) % m) for i in range(m)])


def path_graph(m: int) -> Graph:
    if m < 1:
        raise GenerationError("paths need at least 1 vertex")
    return Graph(m, [(i, i + 1) for i in range(m - 1)])


def complete_graph(m: int) -> Graph:
    if m < 1:
        raise GenerationError("complete graphs need at least 1 vertex")
    return Graph(m, [(u, v) for u in range(m) for v in range(u + 1, m)])


def random_tree(m: int, stream: SplitMix) -> Graph:
    if m < 1:
        raise GenerationError("trees need at least 1 vertex")
    edges = [(stream.randint(i), i) for i in range(1, m)]
    return Graph(m, edges)


def random_connected_graph(m: int, edge_prob: float, stream: SplitMix) -> Graph:
    """Bernoulli edges plus a random spanning skeleton for connectivity."""
    if m < 1:
        raise GenerationError("graphs need at least 1 vertex")
    if not 0.0 <= edge_prob <= 1.0:
        raise GenerationError("edge probability must lie in [0,1]")
    present = set()
    for u in range(m):
        for v in range(u + 1, m):
            if stream.random() < edge_prob:
                present.add((u, v))
    order = list(range(m))
    stream.shuffle(order)
    for k in range(1, m):
        u = order[k]
        v = order[stream.randint(k)]
        present.add((min(u, v), max(u, v)))
    g = Graph(m, sorted(present))
    assert g.is_connected()
    return g


@dataclass(frozen=True)
class GenSpec:
    """Parsed generator descriptor.

    ``base`` picks the graph family; ``language``/``variant`` optionally
    attach inputs whose ground-truth membership is asserted at generation
    time (yes-variants must be members, corrupted variants must not).
    """

    base: str
    size: int
    edge_prob: float = 0.3
    language: Optional[Language] = None
    variant: str = "yes"
    leader_at: Optional[int] = None
    expect_member: Optional[bool] = None

    def describe(self) -> str:
        parts = [self.base, str(self.size)]
        if self.base == "random-connected":
            parts.append(str(self.edge_prob))
        if self.language is Language.LEADER:
            tag = self.variant if self.leader_at is None else str(self.leader_at)
            parts.append(f"leader={tag}")
        elif self.language is Language.SPAN:
            parts.append(f"span={self.variant}")
        elif self.language is Language.NONBIPARTITE and self.expect_member is not None:
            parts.append(f"nonbipartite={'yes' if self.expect_member else 'no'}")
        return " ".join(parts)


_BASES = ("cycle", "path", "complete", "tree", "random-connected")

SPAN_VARIANTS = ("yes", "planted_cycle", "two_roots", "zero_roots", "non_neighbor")
LEADER_VARIANTS = ("yes", "zero", "two")


def parse_genspec(text: str) -> GenSpec:
    """Parse descriptors like ``cycle 5``, ``path 3 leader=1``,
    ``random-connected 8 0.3 span=two_roots``."""
    tokens = text.split()
    if not tokens:
        raise FormatError("empty generator descriptor")
    base = tokens[0].replace("_", "-")
    if base not in _BASES:
        raise FormatError(f"unknown graph family {tokens[0]!r}")
    if len(tokens) < 2:
        raise FormatError(f"{base} needs a size argument")
    try:
        size = int(tokens[1])
    except ValueError:
        raise FormatError(f"bad size {tokens[1]!r}") from None
    rest = tokens[2:]
    edge_prob = 0.3
    if base == "random-connected" and rest and "=" not in rest[0]:
        try:
            edge_prob = float(rest[0])
        except ValueError:
            raise FormatError(f"bad edge probability {rest[0]!r}") from None
        rest = rest[1:]
    spec = GenSpec(base=base, size=size, edge_prob=edge_prob)
    for tok in rest:
        if "=" not in tok:
            raise FormatError(f"expected key=value, got {tok!r}")
        key, val = tok.split("=", 1)
        if key == "leader":
            if val in ("zero", "two", "yes"):
                spec = replace(spec, language=Language.LEADER, variant=val)
            else:
                try:
                    spec = replace(spec, language=Language.LEADER, variant="yes",
                                   leader_at=int(val))
                except ValueError:
                    raise FormatError(f"bad leader position {val!r}") from None
        elif key == "span":
            if val not in SPAN_VARIANTS:
                raise FormatError(f"unknown span variant {val!r}")
            spec = replace(spec, language=Language.SPAN, variant=val)
        elif key == "nonbipartite":
            if val not in ("yes", "no"):
                raise FormatError("nonbipartite expects yes or no")
            spec = replace(spec, language=Language.NONBIPARTITE,
                           expect_member=(val == "yes"))
        else:
            raise FormatError(f"unknown descriptor key {key!r}")
    return spec


def generate(spec, seed: int) -> Instance:
    """Deterministically build an instance from a descriptor and seed."""
    if isinstance(spec, str):
        spec = parse_genspec(spec)
    stream = SplitMix(chain(seed, 0x67656E))
    if spec.base == "cycle":
        g = cycle_graph(spec.size)
    elif spec.base == "path":
        g = path_graph(spec.size)
    elif spec.base == "complete":
        g = complete_graph(spec.size)
    elif spec.base == "tree":
        g = random_tree(spec.size, stream)
    elif spec.base == "random-connected":
        g = random_connected_graph(spec.size, spec.edge_prob, stream)
    else:
        raise FormatError(f"unknown graph family {spec.base!r}")

    if spec.language is None:
        return Instance.bare(g)
    if spec.language is Language.NONBIPARTITE:
        inst = Instance.bare(g)
        if spec.expect_member is not None and is_nonbipartite(g) != spec.expect_member:
            raise GenerationError(
                f"{spec.describe()}: graph is {'bipartite' if spec.expect_member else 'nonbipartite'}")
        return inst
    if spec.language is Language.LEADER:
        return _attach_leader_inputs(g, spec, stream)
    return _attach_span_inputs(g, spec, stream)


def _attach_leader_inputs(g: Graph, spec: GenSpec, stream: SplitMix) -> Instance:
    xs = ["0"] * g.n
    if spec.variant == "zero":
        pass
    elif spec.variant == "two":
        if g.n < 2:
            raise GenerationError("two-leader variant needs at least 2 vertices")
        a = stream.randint(g.n)
        b = (a + 1 + stream.randint(g.n - 1)) % g.n
        xs[a] = xs[b] = "1"
    else:
        pos = spec.leader_at if spec.leader_at is not None else stream.randint(g.n)
        if not 0 <= pos < g.n:
            raise GenerationError(f"leader position {pos} out of range")
        xs[pos] = "1"
    return Instance(g, tuple(xs))


def _bfs_tree_inputs(g: Graph, root: int) -> List[str]:
    xs: List[Optional[str]] = [None] * g.n
    xs[root] = ROOT_MARKER
    queue = deque([root])
    while queue:
        u = queue.popleft()
        for v in g.neighbors(u):
            if xs[v] is None:
                xs[v] = str(u)
                queue.append(v)
    return [x for x in xs]  # connected promise guarantees no None


def _attach_span_inputs(g: Graph, spec: GenSpec, stream: SplitMix) -> Instance:
    root = stream.randint(g.n)
    xs = _bfs_tree_inputs(g, root)
    if spec.variant == "yes":
        inst = Instance(g, tuple(xs))
        assert is_valid_spanning_tree(inst)
        return inst
    if spec.variant == "two_roots":
        if g.n < 2:
            raise GenerationError("two-roots variant needs at least 2 vertices")
        other = (root + 1 + stream.randint(g.n - 1)) % g.n
        xs[other] = ROOT_MARKER
    elif spec.variant == "zero_roots":
        if not g.neighbors(root):
            raise GenerationError("zero-roots variant needs the root to have a neighbor")
        xs[root] = str(stream.choice(g.neighbors(root)))
    elif spec.variant == "planted_cycle":
        if g.n < 3:
            raise GenerationError("planted-cycle variant needs at least 3 vertices")
        candidates = [(u, v) for u in range(g.n) for v in g.neighbors(u) if u < v]
        u, v = candidates[stream.randint(len(candidates))]
        xs[u], xs[v] = str(v), str(u)
        if root in (u, v):
            others = [w for w in range(g.n) if w not in (u, v)]
            xs[others[stream.randint(len(others))]] = ROOT_MARKER
    elif spec.variant == "non_neighbor":
        picks = [(i, w) for i in range(g.n) if inst_non_root(xs, i)
                 for w in range(g.n) if w != i and not g.has_edge(i, w)]
        if not picks:
            picks = [(i, i) for i in range(g.n) if inst_non_root(xs, i)]
        if not picks:
            raise GenerationError("non-neighbor variant needs a non-root vertex")
        i, w = picks[stream.randint(len(picks))]
        xs[i] = str(w)
    else:
        raise GenerationError(f"unknown span variant {spec.variant!r}")
    inst = Instance(g, tuple(xs))
    if is_valid_spanning_tree(inst):
        raise GenerationError(f"{spec.describe()}: corruption produced a valid tree")
    return inst


def inst_non_root(xs: Sequence[str], i: int) -> bool:
    return xs[i] != ROOT_MARKER


# ---------------------------------------------------------------------------
# Text file format
# ---------------------------------------------------------------------------

def format_graph_text(inst: Instance) -> str:
    """Text format: ``n m`` line, then ``u v`` edge lines with u < v, then
    optional ``input i <string>`` lines for nonempty inputs."""
    g = inst.graph
    lines = [f"{g.n} {g.edge_count()}"]
    lines += [f"{u} {v}" for u, v in g.edges()]
    for i in range(g.n):
        if inst.inputs[i]:
            lines.append(f"input {i} {inst.inputs[i]}")
    return "\n".join(lines) + "\n"


def parse_graph_text(text: str, require_connected: bool = True) -> Instance:
    lines = [ln.strip() for ln in text.splitlines()]
    lines = [ln for ln in lines if ln and not ln.startswith("#")]
    if not lines:
        raise FormatError("empty graph file")
    head = lines[0].split()
    if len(head) != 2:
        raise FormatError(f"header must be 'n m', got {lines[0]!r}")
    try:
        n, m = int(head[0]), int(head[1])
    except ValueError:
        raise FormatError(f"header must be 'n m', got {lines[0]!r}") from None
    if len(lines) < 1 + m:
        raise FormatError(f"expected {m} edge lines, found {len(lines) - 1}")
    edges = []
    for ln in lines[1:1 + m]:
        parts = ln.split()
        if len(parts) != 2:
            raise FormatError(f"bad edge line {ln!r}")
        try:
            u, v = int(parts[0]), int(parts[1])
        except ValueError:
            raise FormatError(f"bad edge line {ln!r}") from None
        if not u < v:
            raise FormatError(f"edge lines need u < v, got {ln!r}")
        edges.append((u, v))
    inputs = [""] * n
    for ln in lines[1 + m:]:
        parts = ln.split(maxsplit=2)
        if len(parts) != 3 or parts[0] != "input":
            raise FormatError(f"unexpected line {ln!r}")
        try:
            i = int(parts[1])
        except ValueError:
            raise FormatError(f"bad input line {ln!r}") from None
        if not 0 <= i < n:
            raise FormatError(f"input vertex {i} out of range")
        inputs[i] = parts[2]
    try:
        g = Graph(n, edges, require_connected=require_connected)
    except GenerationError:
        raise
    return Instance(g, tuple(inputs))
