"""
Relaxed activity planning as a max-flow problem

One team, preemption allowed, time split into one-minute slots. Slot x covers [x, x+1)
and is open to a job iff release <= x and x + 1 <= deadline. The job set fits iff the
maximum flow saturates every source edge; when it does not, the residual graph names
groups of jobs that cannot all be served.
"""

import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, Iterable, List, Optional, Sequence, Tuple, Union

import networkx as nx
from networkx.algorithms.flow import preflow_push

from .exceptions import ContractViolationError, UnsupportedError
from .models import CutConstraint, Job

logger = logging.getLogger(__name__)

SOURCE = "s"
SINK = "t"


def job_node(job: Job) -> Tuple[str, str]:
    return ("job", job.id)


def instant_node(x: int) -> Tuple[str, int]:
    return ("instant", x)


@dataclass
class FlowNetwork:
    graph: nx.DiGraph
    jobs: Tuple[Job, ...]
    # jobs longer than their slot count; never occurs for validated jobs
    overlong: Tuple[Job, ...] = ()
    residual: Optional[nx.DiGraph] = None

    @property
    def demand(self) -> int:
        return sum(j.duration_min for j in self.jobs)

    @property
    def flow_value(self) -> Optional[int]:
        if self.residual is None:
            return None
        return self.residual.graph["flow_value"]

    def job(self, node) -> Job:
        return self._by_node[node]

    def __post_init__(self) -> None:
        self._by_node: Dict[Tuple[str, str], Job] = {job_node(j): j for j in self.jobs}


@dataclass(frozen=True)
class RappCertificate:
    feasible: bool
    max_flow: int
    cuts: Tuple[CutConstraint, ...] = field(default_factory=tuple)


def build_network(jobs: Iterable[Job]) -> FlowNetwork:
    jobs = tuple(sorted(jobs, key=lambda j: j.id))
    graph = nx.DiGraph()
    graph.add_node(SOURCE, kind="source")
    graph.add_node(SINK, kind="sink")
    instants = set()
    overlong = []
    for job in jobs:
        node = job_node(job)
        graph.add_node(node, kind="job")
        graph.add_edge(SOURCE, node, capacity=job.duration_min)
        slots = range(job.release_min, job.deadline_min)
        if job.duration_min > len(slots):
            overlong.append(job)
        for x in slots:
            graph.add_edge(node, instant_node(x), capacity=1)
            instants.add(x)
    for x in sorted(instants):
        graph.nodes[instant_node(x)]["kind"] = "instant"
        graph.add_edge(instant_node(x), SINK, capacity=1)
    return FlowNetwork(graph=graph, jobs=jobs, overlong=tuple(overlong))


def max_flow(net: FlowNetwork) -> int:
    """Push-relabel maximum flow; the residual network is kept on the FlowNetwork."""
    if net.residual is None:
        net.residual = preflow_push(net.graph, SOURCE, SINK, capacity="capacity")
    return net.flow_value


def _residual_capacity(attrs: dict) -> int:
    return attrs["capacity"] - attrs["flow"]


def extract_cuts(net: FlowNetwork) -> List[CutConstraint]:
    """
    One cut per job whose source edge is not saturated: the job plus every job it reaches
    in the residual graph once the source and sink are removed.
    """
    value = max_flow(net)
    if value >= net.demand:
        raise ContractViolationError("cut extraction on a network whose jobs all fit",
                                     max_flow=value, demand=net.demand)
    residual = net.residual
    reach = _reachability_graph(residual)

    cuts = []
    for job in net.jobs:
        node = job_node(job)
        if _residual_capacity(residual[SOURCE][node]) <= 0:
            continue
        members = [job] + [net.job(n) for n in nx.descendants(reach, node) if n[0] == "job"]
        cuts.append(CutConstraint.from_jobs(members))
    return cuts


def _reachability_graph(residual: nx.DiGraph) -> nx.DiGraph:
    reach = nx.DiGraph()
    reach.add_nodes_from(n for n in residual if n not in (SOURCE, SINK))
    reach.add_edges_from(
        (u, v) for u, v, attrs in residual.edges(data=True)
        if u not in (SOURCE, SINK) and v not in (SOURCE, SINK) and _residual_capacity(attrs) > 0
    )
    return reach


def remove_redundant(cuts: Iterable[CutConstraint]) -> List[CutConstraint]:
    """Smallest first; a cut survives unless it contains a cut that already survived."""
    kept: List[CutConstraint] = []
    for cut in sorted(set(cuts), key=CutConstraint.sort_key):
        if not any(other.members <= cut.members for other in kept):
            kept.append(cut)
    return kept


def solve_rapp(jobs: Sequence[Job], max_teams: int = 1, dump_dir: Optional[Union[str, Path]] = None) -> RappCertificate:
    if max_teams != 1:
        raise UnsupportedError("the flow relaxation is defined for a single team", max_teams=max_teams)
    net = build_network(jobs)
    if not net.jobs:
        return RappCertificate(feasible=True, max_flow=0)

    value = max_flow(net)
    if dump_dir is not None:
        dump_graphs(net, dump_dir)
    if value == net.demand and not net.overlong:
        logger.debug(f"RAPP feasible: flow {value} over {len(net.jobs)} jobs")
        return RappCertificate(feasible=True, max_flow=value)

    cuts = [CutConstraint.from_jobs([job]) for job in net.overlong]
    if value < net.demand:
        cuts.extend(extract_cuts(net))
    cuts = remove_redundant(cuts)
    logger.debug(f"RAPP infeasible: flow {value} < {net.demand}, {len(cuts)} cuts")
    return RappCertificate(feasible=False, max_flow=value, cuts=tuple(cuts))


def _label(node) -> str:
    if isinstance(node, tuple):
        return f"{node[0]}:{node[1]}"
    return str(node)


def dump_graphs(net: FlowNetwork, directory: Union[str, Path]) -> List[Path]:
    """Write the flow network, its residual graph and the reachability graph as GraphML."""
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)

    flow_graph = nx.DiGraph()
    for node, attrs in net.graph.nodes(data=True):
        flow_graph.add_node(_label(node), kind=attrs.get("kind", ""))
    for u, v, attrs in net.graph.edges(data=True):
        flow = net.residual[u][v]["flow"] if net.residual is not None else 0
        flow_graph.add_edge(_label(u), _label(v), capacity=attrs["capacity"], flow=flow)

    written = [directory / "network.graphml"]
    nx.write_graphml(flow_graph, written[0])
    if net.residual is not None:
        residual = nx.DiGraph()
        residual.add_nodes_from(_label(n) for n in net.residual)
        residual.add_edges_from(
            (_label(u), _label(v), {"residual": _residual_capacity(attrs)})
            for u, v, attrs in net.residual.edges(data=True) if _residual_capacity(attrs) > 0
        )
        reach = nx.relabel_nodes(_reachability_graph(net.residual), _label)
        written.append(directory / "residual.graphml")
        nx.write_graphml(residual, written[-1])
        written.append(directory / "reachability.graphml")
        nx.write_graphml(reach, written[-1])
    logger.debug(f"Wrote {len(written)} graphs to {directory}")
    return written
