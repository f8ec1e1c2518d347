"""Problem instances: graphs, agent ownership, costs, file formats, generators.

Two instance kinds are supported.  A vertex-cover instance is an undirected
graph whose nodes are owned by agents; each agent privately knows the cost of
every node it owns, and a node owned by several agents may have a different
cost per owner.  A facility-location instance is a set of facilities (each
owned by exactly one agent, with a private opening cost) plus public
facility-to-client assignment costs satisfying the triangle inequality through
clients and facilities.

Nodes not owned by any agent are public: their effective cost is zero and
they never receive payments.
"""

from __future__ import annotations

import json
import math
import random
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable

from .errors import InvalidInstanceError

__all__ = [
    "Graph",
    "Ownership",
    "VCInstance",
    "UFLInstance",
    "random_vc_instance",
    "generate_random_vc_instance",
    "gadget_skeleton",
    "generate_gadget_Gn",
    "bipartite_gadget_instance",
    "random_ufl_instance",
    "validate_vc_instance",
    "load_vc_instance",
    "load_ufl_instance",
    "load_instance",
    "dump_instance",
    "save_instance",
]


def _check_real(value: object, what: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise InvalidInstanceError(f"{what} must be a real number, got {value!r}")
    value = float(value)
    if not math.isfinite(value) or value < 0.0:
        raise InvalidInstanceError(f"{what} must be finite and nonnegative, got {value}")
    return value


@dataclass(frozen=True)
class Graph:
    """Simple undirected graph on nodes 0..n-1.

    Edges are stored smaller-id-first and sorted; duplicates and self-loops
    are rejected.  Subgraphs keep the original node numbering so costs and
    ownership indices stay valid across decompositions.
    """

    n: int
    edges: tuple[tuple[int, int], ...]

    def __post_init__(self):
        if self.n < 0:
            raise InvalidInstanceError("node count must be nonnegative")
        seen = set()
        for e in self.edges:
            if len(e) != 2:
                raise InvalidInstanceError(f"edge {e!r} is not a pair")
            u, v = e
            if not (isinstance(u, int) and isinstance(v, int)):
                raise InvalidInstanceError(f"edge {e!r} has non-integer endpoints")
            if not (0 <= u < self.n and 0 <= v < self.n):
                raise InvalidInstanceError(f"edge {e!r} out of range for n={self.n}")
            if u == v:
                raise InvalidInstanceError(f"self-loop at node {u}")
            if u > v:
                raise InvalidInstanceError(f"edge {e!r} must list the smaller id first")
            if (u, v) in seen:
                raise InvalidInstanceError(f"duplicate edge {e!r}")
            seen.add((u, v))
        object.__setattr__(self, "edges", tuple((int(u), int(v)) for u, v in self.edges))

    @classmethod
    def from_edges(cls, n: int, edges: Iterable[tuple[int, int]]) -> "Graph":
        """Build a graph, normalizing edge order and sorting."""
        canon = sorted({(min(u, v), max(u, v)) for u, v in edges})
        return cls(n, tuple(canon))

    @cached_property
    def adj(self) -> tuple[tuple[int, ...], ...]:
        nbrs: list[list[int]] = [[] for _ in range(self.n)]
        for u, v in self.edges:
            nbrs[u].append(v)
            nbrs[v].append(u)
        return tuple(tuple(sorted(b)) for b in nbrs)

    @cached_property
    def neighbor_masks(self) -> tuple[int, ...]:
        masks = [0] * self.n
        for u, v in self.edges:
            masks[u] |= 1 << v
            masks[v] |= 1 << u
        return tuple(masks)

    def degree(self, u: int) -> int:
        return len(self.adj[u])

    @property
    def max_degree(self) -> int:
        return max((len(a) for a in self.adj), default=0)

    @property
    def m(self) -> int:
        return len(self.edges)

    def has_edge(self, u: int, v: int) -> bool:
        if u > v:
            u, v = v, u
        return (u, v) in self._edge_set

    @cached_property
    def _edge_set(self) -> frozenset[tuple[int, int]]:
        return frozenset(self.edges)

    def edge_subgraph(self, edges: Iterable[tuple[int, int]]) -> "Graph":
        """Subgraph on the same node universe keeping only the given edges."""
        kept = []
        for u, v in edges:
            if u > v:
                u, v = v, u
            if (u, v) not in self._edge_set:
                raise InvalidInstanceError(f"edge {(u, v)} not present in parent graph")
            kept.append((u, v))
        return Graph.from_edges(self.n, kept)

    def induced_subgraph(self, nodes: Iterable[int]) -> "Graph":
        """Subgraph on the same node universe keeping edges inside `nodes`."""
        keep = set(nodes)
        return Graph.from_edges(self.n, [e for e in self.edges if e[0] in keep and e[1] in keep])

    def nodes_with_edges(self) -> tuple[int, ...]:
        out = set()
        for u, v in self.edges:
            out.add(u)
            out.add(v)
        return tuple(sorted(out))

    def is_vertex_cover(self, nodes: Iterable[int]) -> bool:
        s = set(nodes)
        return all(u in s or v in s for u, v in self.edges)

    def is_independent(self, nodes: Iterable[int]) -> bool:
        s = sorted(set(nodes))
        for i, u in enumerate(s):
            mask = self.neighbor_masks[u]
            for v in s[i + 1:]:
                if mask >> v & 1:
                    return False
        return True


@dataclass(frozen=True)
class Ownership:
    """Which nodes each agent owns.  Sets may overlap unless callers require
    disjointness; every set must be independent in the graph so no agent can
    price an edge unilaterally."""

    sets: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        canon = []
        for i, nodes in enumerate(self.sets):
            uniq = sorted(set(nodes))
            if len(uniq) != len(nodes):
                raise InvalidInstanceError(f"agent {i} lists a node twice")
            if not nodes:
                raise InvalidInstanceError(f"agent {i} owns no nodes")
            canon.append(tuple(int(u) for u in uniq))
        object.__setattr__(self, "sets", tuple(canon))

    @property
    def n_agents(self) -> int:
        return len(self.sets)

    @cached_property
    def dimension(self) -> int:
        """Largest number of nodes owned by a single agent."""
        return max((len(s) for s in self.sets), default=0)

    @cached_property
    def owners(self) -> dict[int, tuple[int, ...]]:
        """node -> sorted tuple of agent ids owning it."""
        out: dict[int, list[int]] = {}
        for i, nodes in enumerate(self.sets):
            for u in nodes:
                out.setdefault(u, []).append(i)
        return {u: tuple(a) for u, a in out.items()}

    @property
    def is_disjoint(self) -> bool:
        return all(len(a) == 1 for a in self.owners.values())

    def validate_for(self, g: Graph) -> None:
        for i, nodes in enumerate(self.sets):
            for u in nodes:
                if not 0 <= u < g.n:
                    raise InvalidInstanceError(f"agent {i} owns out-of-range node {u}")
            if not g.is_independent(nodes):
                raise InvalidInstanceError(
                    f"agent {i} owns two adjacent nodes; ownership sets must be independent"
                )


@dataclass(frozen=True)
class VCInstance:
    """A vertex-cover market: graph, ownership, per-(agent, node) costs."""

    graph: Graph
    ownership: Ownership
    costs: tuple[tuple[float, ...], ...]

    def __post_init__(self):
        self.ownership.validate_for(self.graph)
        if len(self.costs) != self.ownership.n_agents:
            raise InvalidInstanceError("one cost tuple per agent required")
        canon = []
        for i, (nodes, cs) in enumerate(zip(self.ownership.sets, self.costs)):
            if len(cs) != len(nodes):
                raise InvalidInstanceError(
                    f"agent {i}: {len(cs)} costs for {len(nodes)} owned nodes"
                )
            canon.append(tuple(_check_real(c, f"cost of agent {i}") for c in cs))
        object.__setattr__(self, "costs", tuple(canon))

    @property
    def n_agents(self) -> int:
        return self.ownership.n_agents

    def cost(self, agent: int, node: int) -> float:
        try:
            k = self.ownership.sets[agent].index(node)
        except ValueError:
            raise KeyError(f"agent {agent} does not own node {node}") from None
        return self.costs[agent][k]

    @cached_property
    def effective_costs(self) -> tuple[float, ...]:
        """Per-node cost: min over owners, 0 for public nodes."""
        eff = [0.0] * self.graph.n
        owners = self.ownership.owners
        for u in range(self.graph.n):
            if u in owners:
                eff[u] = min(self.cost(i, u) for i in owners[u])
        return tuple(eff)

    def agent_cost_of(self, agent: int, nodes: Iterable[int]) -> float:
        """Total cost agent incurs when `nodes` are selected."""
        chosen = set(nodes)
        return sum(
            c for u, c in zip(self.ownership.sets[agent], self.costs[agent]) if u in chosen
        )

    def with_agent_costs(self, agent: int, new_costs: Iterable[float]) -> "VCInstance":
        repl = list(self.costs)
        repl[agent] = tuple(new_costs)
        return VCInstance(self.graph, self.ownership, tuple(repl))

    def with_node_cost(self, agent: int, node: int, value: float) -> "VCInstance":
        k = self.ownership.sets[agent].index(node)
        row = list(self.costs[agent])
        row[k] = value
        return self.with_agent_costs(agent, row)

    def to_json_dict(self) -> dict:
        return {
            "graph": {"n": self.graph.n, "edges": [list(e) for e in self.graph.edges]},
            "agents": [
                {"nodes": list(nodes), "costs": list(cs)}
                for nodes, cs in zip(self.ownership.sets, self.costs)
            ],
        }


@dataclass(frozen=True)
class UFLInstance:
    """Facility location: per-facility owner and opening cost, public metric
    assignment costs indexed [facility][client]."""

    facility_agent: tuple[int, ...]
    open_costs: tuple[float, ...]
    n_clients: int
    assign: tuple[tuple[float, ...], ...]

    def __post_init__(self):
        nf = len(self.facility_agent)
        if len(self.open_costs) != nf or len(self.assign) != nf:
            raise InvalidInstanceError("facility arrays must have equal length")
        if nf == 0 or self.n_clients <= 0:
            raise InvalidInstanceError("need at least one facility and one client")
        object.__setattr__(
            self, "open_costs", tuple(_check_real(f, "opening cost") for f in self.open_costs)
        )
        rows = []
        for row in self.assign:
            if len(row) != self.n_clients:
                raise InvalidInstanceError("assignment cost row has wrong client count")
            rows.append(tuple(_check_real(c, "assignment cost") for c in row))
        object.__setattr__(self, "assign", tuple(rows))
        agents = sorted(set(self.facility_agent))
        if agents != list(range(len(agents))):
            raise InvalidInstanceError("agent ids must be contiguous from 0")
        if len(agents) < 2:
            raise InvalidInstanceError(
                "need at least two agents, otherwise one agent owns every facility"
            )

    @property
    def n_facilities(self) -> int:
        return len(self.facility_agent)

    @property
    def n_agents(self) -> int:
        return max(self.facility_agent) + 1

    @cached_property
    def agent_facilities(self) -> tuple[tuple[int, ...], ...]:
        sets: list[list[int]] = [[] for _ in range(self.n_agents)]
        for f, a in enumerate(self.facility_agent):
            sets[a].append(f)
        return tuple(tuple(s) for s in sets)

    def validate_metric(self, tol: float = 1e-9) -> None:
        """Check the triangle inequality through clients and facilities."""
        c = self.assign
        for l1 in range(self.n_facilities):
            for l2 in range(self.n_facilities):
                for j1 in range(self.n_clients):
                    for j2 in range(self.n_clients):
                        if c[l1][j1] > c[l1][j2] + c[l2][j2] + c[l2][j1] + tol:
                            raise InvalidInstanceError(
                                f"assignment costs violate the triangle inequality at "
                                f"facilities ({l1},{l2}) clients ({j1},{j2})"
                            )

    def with_open_costs(self, new: Iterable[float]) -> "UFLInstance":
        return UFLInstance(self.facility_agent, tuple(new), self.n_clients, self.assign)

    def agent_open_cost(self, agent: int, open_facilities: Iterable[int]) -> float:
        chosen = set(open_facilities)
        return sum(self.open_costs[f] for f in self.agent_facilities[agent] if f in chosen)

    def to_json_dict(self) -> dict:
        return {
            "facilities": [
                {"agent": a, "open_cost": f}
                for a, f in zip(self.facility_agent, self.open_costs)
            ],
            "clients": self.n_clients,
            "assign_cost": [list(r) for r in self.assign],
        }


# ---------------------------------------------------------------------------
# generators


def random_vc_instance(n: int, p: float, r: int, seed: int) -> VCInstance:
    """Erdos-Renyi graph with agents owning up to r mutually nonadjacent nodes.

    Nodes are shuffled, then greedily grouped: each new agent takes the next
    unassigned node plus up to r-1 later unassigned nodes not adjacent to any
    node already in the group.  Every node ends up owned; on a complete graph
    the groups degenerate to singletons.  Costs are uniform on [0, 1].
    """
    if n <= 0 or r <= 0:
        raise InvalidInstanceError("n and r must be positive")
    if not 0.0 <= p <= 1.0:
        raise InvalidInstanceError("edge probability must lie in [0, 1]")
    rng = random.Random(seed)
    edges = [(u, v) for u in range(n) for v in range(u + 1, n) if rng.random() < p]
    g = Graph.from_edges(n, edges)
    order = list(range(n))
    rng.shuffle(order)
    unassigned = set(order)
    groups: list[list[int]] = []
    for u in order:
        if u not in unassigned:
            continue
        group = [u]
        unassigned.discard(u)
        if len(group) < r:
            for v in order:
                if v in unassigned and len(group) < r:
                    mask = g.neighbor_masks[v]
                    if all(not (mask >> w & 1) for w in group):
                        group.append(v)
                        unassigned.discard(v)
        groups.append(sorted(group))
    ownership = Ownership(tuple(tuple(gp) for gp in groups))
    costs = tuple(tuple(rng.random() for _ in gp) for gp in ownership.sets)
    return VCInstance(g, ownership, costs)


def gadget_skeleton(n: int) -> tuple[Graph, Ownership]:
    """Dense bipartite witness: nodes u_1..u_n (ids 0..n-1), v_1..v_n (ids
    n..2n-1), edges (u_i, v_j) for i != j, agent i owning {u_i, v_i}.  Forces
    many parts in any decomposition that separates each agent's two nodes.
    Costs are left to the caller."""
    if n < 2:
        raise InvalidInstanceError("gadget needs n >= 2")
    edges = []
    for i in range(n):
        for j in range(n):
            if i != j:
                edges.append((i, n + j))
    g = Graph.from_edges(2 * n, edges)
    ownership = Ownership(tuple((i, n + i) for i in range(n)))
    return g, ownership


def bipartite_gadget_instance(n: int, cost: float = 1.0) -> VCInstance:
    """Gadget skeleton dressed with a constant cost on every node."""
    g, ownership = gadget_skeleton(n)
    costs = tuple((float(cost), float(cost)) for _ in range(n))
    return VCInstance(g, ownership, costs)


def random_ufl_instance(
    n_facilities: int, n_clients: int, seed: int, n_agents: int | None = None
) -> UFLInstance:
    """Facilities and clients as random points on a line; assignment cost is
    the distance, so the triangle inequality holds.  Facilities are dealt to
    agents round-robin."""
    if n_facilities < 2:
        raise InvalidInstanceError("need at least two facilities")
    if n_agents is None:
        n_agents = max(2, n_facilities // 2)
    if not 2 <= n_agents <= n_facilities:
        raise InvalidInstanceError("agent count must lie in [2, n_facilities]")
    rng = random.Random(seed)
    fpos = [rng.random() for _ in range(n_facilities)]
    cpos = [rng.random() for _ in range(n_clients)]
    open_costs = tuple(0.05 + 0.95 * rng.random() for _ in range(n_facilities))
    assign = tuple(
        tuple(abs(fp - cp) for cp in cpos) for fp in fpos
    )
    agents = tuple(i % n_agents for i in range(n_facilities))
    return UFLInstance(agents, open_costs, n_clients, assign)


# ---------------------------------------------------------------------------
# JSON formats


def _vc_from_json_dict(data: dict) -> VCInstance:
    try:
        gdata = data["graph"]
        n = gdata["n"]
        raw_edges = gdata["edges"]
        agents = data["agents"]
    except (KeyError, TypeError) as exc:
        raise InvalidInstanceError(f"missing field in vertex-cover instance: {exc}") from exc
    if not isinstance(n, int):
        raise InvalidInstanceError("graph.n must be an integer")
    edges = []
    for e in raw_edges:
        if not (isinstance(e, list) and len(e) == 2):
            raise InvalidInstanceError(f"edge {e!r} must be a two-element list")
        edges.append((e[0], e[1]))
    g = Graph(n, tuple(edges))
    sets = []
    costs = []
    for i, a in enumerate(agents):
        try:
            nodes, cs = a["nodes"], a["costs"]
        except (KeyError, TypeError) as exc:
            raise InvalidInstanceError(f"agent {i} entry malformed: {exc}") from exc
        if len(nodes) != len(cs):
            raise InvalidInstanceError(f"agent {i}: nodes and costs differ in length")
        pairs = sorted(zip(nodes, cs))
        sets.append(tuple(u for u, _ in pairs))
        costs.append(tuple(c for _, c in pairs))
    return VCInstance(g, Ownership(tuple(sets)), tuple(costs))


def _ufl_from_json_dict(data: dict) -> UFLInstance:
    try:
        facs = data["facilities"]
        clients = data["clients"]
        assign = data["assign_cost"]
    except (KeyError, TypeError) as exc:
        raise InvalidInstanceError(f"missing field in facility instance: {exc}") from exc
    if not isinstance(clients, int):
        raise InvalidInstanceError("clients must be an integer count")
    agents = []
    opens = []
    for i, f in enumerate(facs):
        try:
            agents.append(f["agent"])
            opens.append(f["open_cost"])
        except (KeyError, TypeError) as exc:
            raise InvalidInstanceError(f"facility {i} entry malformed: {exc}") from exc
        if not isinstance(agents[-1], int):
            raise InvalidInstanceError(f"facility {i} agent id must be an integer")
    inst = UFLInstance(tuple(agents), tuple(opens), clients, tuple(tuple(r) for r in assign))
    inst.validate_metric()
    return inst


def validate_vc_instance(inst: VCInstance | dict) -> dict:
    """Validation report for an instance or a JSON-shaped dict.

    Returns {"ok": bool, "problems": [messages]} instead of raising, so
    callers can inspect why a candidate fails (graph malformed, an agent
    owning two adjacent nodes, cost shape mismatches, negative costs).
    """
    data = inst.to_json_dict() if isinstance(inst, VCInstance) else inst
    problems: list[str] = []
    try:
        _vc_from_json_dict(data)
    except InvalidInstanceError as exc:
        problems.append(str(exc))
    return {"ok": not problems, "problems": problems}


def load_vc_instance(path: str) -> VCInstance:
    with open(path) as fh:
        return _vc_from_json_dict(json.load(fh))


def load_ufl_instance(path: str) -> UFLInstance:
    with open(path) as fh:
        return _ufl_from_json_dict(json.load(fh))


def load_instance(path: str) -> VCInstance | UFLInstance:
    """Load either instance kind, dispatching on the top-level keys."""
    with open(path) as fh:
        data = json.load(fh)
    if not isinstance(data, dict):
        raise InvalidInstanceError("instance file must hold a JSON object")
    if "graph" in data:
        return _vc_from_json_dict(data)
    if "facilities" in data:
        return _ufl_from_json_dict(data)
    raise InvalidInstanceError("unrecognized instance file (no graph/facilities key)")


def dump_instance(inst: VCInstance | UFLInstance, path: str) -> None:
    with open(path, "w") as fh:
        json.dump(inst.to_json_dict(), fh, indent=2, sort_keys=True)
        fh.write("\n")


# Interface aliases.
generate_random_vc_instance = random_vc_instance
generate_gadget_Gn = gadget_skeleton
save_instance = dump_instance
