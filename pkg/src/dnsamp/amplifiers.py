"""Amplifier-set analysis: clustering, stability, churn, and roles.

Events reusing the same reflector pool betray shared infrastructure. Sets are
compared with Jaccard distance and grouped by a deterministic DBSCAN (points
visited in index order, border ties to the first core cluster), so identical
inputs always yield identical labels.
"""

from __future__ import annotations

import csv
from collections import Counter, deque
from dataclasses import dataclass
from datetime import date, datetime, timezone
from typing import Iterable, Mapping, Sequence

import numpy as np

from .detector import AttackEvent

NOISE = -1


def amplifier_sets(events: Sequence[AttackEvent]) -> list[frozenset[str]]:
    """Per-event reflector sets, aligned with the event order."""
    return [frozenset(event.amplifier_set) for event in events]


def jaccard_distance_matrix(sets: Sequence[frozenset[str]]) -> np.ndarray:
    """Symmetric, zero-diagonal matrix of 1 - Jaccard(set_i, set_j).

    Two empty sets are identical (distance 0)."""
    n = len(sets)
    matrix = np.zeros((n, n), dtype=np.float64)
    for i in range(n):
        for j in range(i + 1, n):
            a, b = sets[i], sets[j]
            union = len(a | b)
            distance = 0.0 if union == 0 else 1.0 - len(a & b) / union
            matrix[i, j] = matrix[j, i] = distance
    return matrix


@dataclass(slots=True)
class ClusterResult:
    labels: tuple[int, ...]
    eps: float
    min_pts: int

    @property
    def n_clusters(self) -> int:
        return len({label for label in self.labels if label != NOISE})

    @property
    def outlier_share(self) -> float:
        if not self.labels:
            return 0.0
        return sum(1 for label in self.labels if label == NOISE) / len(self.labels)


def dbscan_cluster(matrix: np.ndarray, eps: float = 0.6,
                   min_pts: int = 5) -> ClusterResult:
    """DBSCAN over a precomputed distance matrix.

    Neighborhoods are closed balls (d <= eps) including the point itself.
    Points are visited in index order and seed sets expand FIFO, so border
    points land in the first cluster (creation order) that reaches them.
    """
    matrix = np.asarray(matrix, dtype=np.float64)
    if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1]:
        raise ValueError(f"need a square distance matrix, got shape {matrix.shape}")
    if not 0.0 <= eps:
        raise ValueError(f"eps must be >= 0, got {eps}")
    if min_pts < 1:
        raise ValueError(f"min_pts must be >= 1, got {min_pts}")
    n = matrix.shape[0]
    neighborhoods = [np.flatnonzero(matrix[i] <= eps) for i in range(n)]
    UNVISITED = -2
    labels = [UNVISITED] * n
    cluster = 0
    for start in range(n):
        if labels[start] != UNVISITED:
            continue
        if len(neighborhoods[start]) < min_pts:
            labels[start] = NOISE
            continue
        labels[start] = cluster
        seeds = deque(int(j) for j in neighborhoods[start] if j != start)
        while seeds:
            point = seeds.popleft()
            if labels[point] == NOISE:
                labels[point] = cluster  # border point adopted by first cluster
            if labels[point] != UNVISITED:
                continue
            labels[point] = cluster
            if len(neighborhoods[point]) >= min_pts:
                seeds.extend(int(j) for j in neighborhoods[point])
        cluster += 1
    return ClusterResult(labels=tuple(labels), eps=eps, min_pts=min_pts)


@dataclass(slots=True)
class StableSetReport:
    cluster_id: int
    n_attacks: int
    n_amplifiers: int
    core_size: int
    first_day: str
    last_day: str
    span_days: int
    mean_drift: float
    max_drift: float
    static: bool


def stable_sets(events: Sequence[AttackEvent], labels: Sequence[int],
                min_attacks: int = 5, min_amplifiers: int = 5) -> list[StableSetReport]:
    """Summarize clusters that qualify as stable amplifier sets.

    A cluster qualifies with at least min_attacks events whose union holds at
    least min_amplifiers reflectors. Drift is the Jaccard distance between
    consecutive member sets in (day, victim) order; a set is static when every
    step has drift zero. span_days counts calendar days inclusively.
    """
    if len(events) != len(labels):
        raise ValueError("events and labels must align")
    members: dict[int, list[AttackEvent]] = {}
    for event, label in zip(events, labels):
        if label != NOISE:
            members.setdefault(label, []).append(event)
    reports = []
    for label in sorted(members):
        group = sorted(members[label], key=lambda e: (e.day, e.victim_ip))
        if len(group) < min_attacks:
            continue
        sets = [frozenset(e.amplifier_set) for e in group]
        union = frozenset().union(*sets)
        if len(union) < min_amplifiers:
            continue
        core = sets[0]
        for s in sets[1:]:
            core &= s
        drifts = []
        for a, b in zip(sets, sets[1:]):
            u = len(a | b)
            drifts.append(0.0 if u == 0 else 1.0 - len(a & b) / u)
        first_day, last_day = group[0].day, group[-1].day
        span = (date.fromisoformat(last_day) - date.fromisoformat(first_day)).days + 1
        reports.append(StableSetReport(
            cluster_id=label,
            n_attacks=len(group),
            n_amplifiers=len(union),
            core_size=len(core),
            first_day=first_day,
            last_day=last_day,
            span_days=span,
            mean_drift=sum(drifts) / len(drifts) if drifts else 0.0,
            max_drift=max(drifts) if drifts else 0.0,
            static=all(d == 0.0 for d in drifts),
        ))
    return reports


@dataclass(slots=True)
class ChurnReport:
    overlaps: tuple[tuple[str, str, float], ...]
    mean_overlap: float | None
    first_last_overlap: float | None


def daily_amplifier_sets(events: Iterable[AttackEvent]) -> dict[str, set[str]]:
    """Union of reflectors abused per UTC day."""
    daily: dict[str, set[str]] = {}
    for event in events:
        daily.setdefault(event.day, set()).update(event.amplifier_set)
    return daily


def churn_metrics(daily_sets: Mapping[str, Iterable[str]]) -> ChurnReport:
    """Day-over-day retention of the abused reflector population.

    overlap_i = |D_i intersect D_i+1| / |D_i| for consecutive observed days;
    first_last compares the first and last day the same way. Days with empty
    sets contribute no overlap entry.
    """
    days = sorted(daily_sets)
    sets = {day: set(daily_sets[day]) for day in days}
    overlaps = []
    for day_a, day_b in zip(days, days[1:]):
        # only calendar-adjacent pairs: bridging a gap day would measure
        # two days of churn and bias the retention estimate downward
        adjacent = date.fromisoformat(day_b).toordinal() \
            - date.fromisoformat(day_a).toordinal() == 1
        if adjacent and sets[day_a]:
            value = len(sets[day_a] & sets[day_b]) / len(sets[day_a])
            overlaps.append((day_a, day_b, value))
    first_last = None
    if len(days) >= 2 and sets[days[0]]:
        first_last = len(sets[days[0]] & sets[days[-1]]) / len(sets[days[0]])
    mean = sum(v for _, _, v in overlaps) / len(overlaps) if overlaps else None
    return ChurnReport(
        overlaps=tuple(overlaps),
        mean_overlap=mean,
        first_last_overlap=first_last,
    )


RECENCY_KNOWN = "known_before_abuse"
RECENCY_PRE_DISCOVERY = "pre_discovery"
RECENCY_UNSEEN = "unseen"

ROLE_AUTHORITATIVE = "authoritative"
ROLE_RESOLVER = "resolver_or_forwarder"
ROLE_UNKNOWN = "unknown"


@dataclass(slots=True)
class AmplifierInfo:
    ip: str
    attack_count: int
    first_abuse_ts: float
    last_abuse_ts: float
    role: str = ROLE_UNKNOWN
    recency: str | None = None
    first_seen: str | None = None
    last_seen: str | None = None


def amplifier_inventory(events: Iterable[AttackEvent]) -> dict[str, AmplifierInfo]:
    """Per-reflector abuse stats. Sum of attack_count over the inventory
    equals the sum of event set sizes (each membership counted once)."""
    inventory: dict[str, AmplifierInfo] = {}
    for event in events:
        for ip in event.amplifier_set:
            info = inventory.get(ip)
            if info is None:
                inventory[ip] = AmplifierInfo(
                    ip=ip, attack_count=1,
                    first_abuse_ts=event.first_ts, last_abuse_ts=event.last_ts)
            else:
                info.attack_count += 1
                info.first_abuse_ts = min(info.first_abuse_ts, event.first_ts)
                info.last_abuse_ts = max(info.last_abuse_ts, event.last_ts)
    return inventory


def involvement_distributions(events: Sequence[AttackEvent]) -> tuple[Counter, Counter]:
    """(attacks-per-amplifier, amplifiers-per-attack) histograms."""
    inventory = amplifier_inventory(events)
    per_amplifier = Counter(info.attack_count for info in inventory.values())
    per_attack = Counter(len(event.amplifier_set) for event in events)
    return per_amplifier, per_attack


def read_seen_table(path: str) -> dict[str, tuple[str, str]]:
    """ip,first_seen,last_seen CSV (ISO dates) from a scan history."""
    table: dict[str, tuple[str, str]] = {}
    with open(path, "r", encoding="utf-8", newline="") as handle:
        reader = csv.reader(handle)
        for lineno, row in enumerate(reader):
            if not row or (lineno == 0 and row[0].lower() == "ip"):
                continue
            if len(row) != 3:
                raise ValueError(f"seen table line {lineno + 1}: expected ip,first_seen,last_seen")
            date.fromisoformat(row[1])
            date.fromisoformat(row[2])
            table[row[0]] = (row[1], row[2])
    return table


def recency_join(inventory: Mapping[str, AmplifierInfo],
                 seen_table: Mapping[str, tuple[str, str]]) -> tuple[dict[str, AmplifierInfo], float]:
    """Join abuse dates against scan history; returns (inventory, coverage).

    pre_discovery marks reflectors abused before the scanner first saw them;
    coverage is the fraction present in the table at all.
    """
    seen_count = 0
    for ip, info in inventory.items():
        seen = seen_table.get(ip)
        if seen is None:
            info.recency = RECENCY_UNSEEN
            info.first_seen = info.last_seen = None
            continue
        seen_count += 1
        info.first_seen, info.last_seen = seen
        abuse_day = datetime.fromtimestamp(info.first_abuse_ts, tz=timezone.utc).date()
        if abuse_day < date.fromisoformat(seen[0]):
            info.recency = RECENCY_PRE_DISCOVERY
        else:
            info.recency = RECENCY_KNOWN
    coverage = seen_count / len(inventory) if inventory else 0.0
    return dict(inventory), coverage


def read_ns_ip_table(path: str) -> dict[str, str]:
    """ip,ns_name CSV mapping addresses to authoritative nameserver names."""
    table: dict[str, str] = {}
    with open(path, "r", encoding="utf-8", newline="") as handle:
        reader = csv.reader(handle)
        for lineno, row in enumerate(reader):
            if not row or (lineno == 0 and row[0].lower() == "ip"):
                continue
            if len(row) != 2:
                raise ValueError(f"ns_ip table line {lineno + 1}: expected ip,ns_name")
            table[row[0]] = row[1]
    return table


def classify_amplifier_role(inventory: Mapping[str, AmplifierInfo],
                            ns_ip_table: Mapping[str, str] | None) -> dict[str, AmplifierInfo]:
    """Authoritative if the address appears in the NS-IP table, otherwise an
    open resolver or forwarder; with no table every role stays unknown."""
    for ip, info in inventory.items():
        if not ns_ip_table:
            info.role = ROLE_UNKNOWN
        elif ip in ns_ip_table:
            info.role = ROLE_AUTHORITATIVE
        else:
            info.role = ROLE_RESOLVER
    return dict(inventory)


def qname_role_breakdown(events: Sequence[AttackEvent],
                         inventory: Mapping[str, AmplifierInfo]) -> dict[str, Counter]:
    """Role histogram of the reflectors behind each dominant qname."""
    breakdown: dict[str, Counter] = {}
    for event in events:
        qname = event.dominant_qname()
        counts = breakdown.setdefault(qname, Counter())
        for ip in event.amplifier_set:
            info = inventory.get(ip)
            counts[info.role if info else ROLE_UNKNOWN] += 1
    return breakdown


def write_distance_matrix(matrix: np.ndarray, path: str) -> None:
    with open(path, "w", encoding="utf-8") as handle:
        for row in np.asarray(matrix, dtype=np.float64):
            handle.write(",".join(repr(float(v)) for v in row))
            handle.write("\n")
