"""Attack detection over per-client, per-UTC-day aggregates.

A client-day becomes an attack event when at least min_sampled_packets DNS
packets were sampled for the client and at least share_threshold of them
carry misused names. Original packet volumes are estimated by scaling sampled
counts with the sampling denominator (integer arithmetic, so threshold cases
stay exact).
"""

from __future__ import annotations

import json
import math
from collections import Counter, defaultdict
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .selectors import MisusedNameList
from .trace import PacketRecord

ROOT_NAME = "."


@dataclass(slots=True)
class DetectorConfig:
    share_threshold: float = 0.9
    min_sampled_packets: int = 10
    sampling_denominator: int = 16000

    def __post_init__(self) -> None:
        if not 0.0 < self.share_threshold <= 1.0:
            raise ValueError(f"share_threshold must be in (0, 1], got {self.share_threshold}")
        if self.min_sampled_packets < 1:
            raise ValueError(f"min_sampled_packets must be >= 1, got {self.min_sampled_packets}")
        if self.sampling_denominator < 1:
            raise ValueError(f"sampling_denominator must be >= 1, got {self.sampling_denominator}")


@dataclass(slots=True)
class ClientDayStats:
    """Aggregate of one client's sampled DNS packets on one UTC day.

    Only client-days with at least one misused-name packet are kept; the
    packet detail lists hold misused packets only (the request-side sublists
    feed header-field fingerprinting)."""

    client_ip: str
    day: str
    total_pkts: int = 0
    misused_pkts: int = 0
    misused_nonroot_pkts: int = 0
    first_ts: float = math.inf
    last_ts: float = -math.inf
    qname_counts: Counter = field(default_factory=Counter)
    request_count: int = 0
    response_count: int = 0
    amplifiers: set = field(default_factory=set)
    dns_id_seq: list = field(default_factory=list)      # (ts, dns_id), misused pkts
    req_field_seq: list = field(default_factory=list)   # (ts, ip_id, src_port, dns_id)
    ingress_as_counts: Counter = field(default_factory=Counter)
    client_as_counts: Counter = field(default_factory=Counter)

    @property
    def share(self) -> float:
        return self.misused_pkts / self.total_pkts if self.total_pkts else 0.0

    @property
    def share_excluding_root(self) -> float:
        """Share recomputed as if the root name were not on the list."""
        return self.misused_nonroot_pkts / self.total_pkts if self.total_pkts else 0.0


def aggregate_client_days(records: Iterable[PacketRecord],
                          names: MisusedNameList | set[str]) -> list[ClientDayStats]:
    """Group sampled packets by (client_ip, UTC day).

    total_pkts counts every DNS packet of the client that day; the misused
    fields and detail lists cover only packets whose qname is on the list.
    Client-days without misused packets are dropped. Root-name packets count
    as misused only if "." itself is on the list.
    """
    name_set = names.name_set() if isinstance(names, MisusedNameList) else set(names)
    totals: Counter[tuple[str, str]] = Counter()
    details: dict[tuple[str, str], ClientDayStats] = {}
    for record in records:
        key = (record.client_ip, record.day)
        totals[key] += 1
        if record.qname not in name_set:
            continue
        stats = details.get(key)
        if stats is None:
            stats = details[key] = ClientDayStats(client_ip=key[0], day=key[1])
        stats.misused_pkts += 1
        if record.qname != ROOT_NAME:
            stats.misused_nonroot_pkts += 1
        stats.first_ts = min(stats.first_ts, record.ts)
        stats.last_ts = max(stats.last_ts, record.ts)
        stats.qname_counts[record.qname] += 1
        stats.amplifiers.add(record.server_ip)
        stats.dns_id_seq.append((record.ts, record.dns_id))
        if record.is_response:
            stats.response_count += 1
        else:
            stats.request_count += 1
            stats.req_field_seq.append(
                (record.ts, record.ip_id, record.src_port, record.dns_id))
        if record.ingress_as is not None:
            stats.ingress_as_counts[record.ingress_as] += 1
        if record.client_as is not None:
            stats.client_as_counts[record.client_as] += 1
    out = []
    for key in sorted(details):
        stats = details[key]
        stats.total_pkts = totals[key]
        stats.dns_id_seq.sort(key=lambda pair: pair[0])
        stats.req_field_seq.sort(key=lambda row: row[0])
        out.append(stats)
    return out


@dataclass(slots=True)
class AttackEvent:
    """One detected reflection attack: a qualifying (victim, UTC day) pair."""

    victim_ip: str
    day: str
    packet_count: int
    misused_packet_count: int
    est_original_packets: int
    est_misused_packets: int
    share: float
    share_excluding_root: float
    first_ts: float
    last_ts: float
    request_count: int
    response_count: int
    qname_counts: dict[str, int]
    amplifier_set: tuple[str, ...]
    dns_ids: tuple[int, ...]
    req_ip_ids: tuple[int, ...]
    req_src_ports: tuple[int, ...]
    req_dns_ids: tuple[int, ...]
    ingress_as_counts: dict[int, int]
    victim_as: int | None = None
    intensity_decile: int | None = None

    @property
    def duration_s(self) -> float:
        return self.last_ts - self.first_ts

    @property
    def start(self) -> float:
        return self.first_ts

    @property
    def end(self) -> float:
        return self.last_ts

    def dominant_qname(self) -> str:
        """Plurality name of the event's misused packets, ties lexicographic."""
        if not self.qname_counts:
            return ""
        return min(self.qname_counts, key=lambda q: (-self.qname_counts[q], q))


def _majority_as(counts: Counter) -> int | None:
    if not counts:
        return None
    return min(counts, key=lambda asn: (-counts[asn], asn))


def detect_attacks(stats: Sequence[ClientDayStats],
                   config: DetectorConfig | None = None) -> list[AttackEvent]:
    """Apply the two detection thresholds and materialize events.

    Events are sorted by (day, victim_ip). Estimated original volumes are
    sampled counts times the sampling denominator; the misused estimate uses
    the misused sampled count directly so the arithmetic stays integral.
    """
    cfg = config or DetectorConfig()
    events = []
    for s in stats:
        if s.total_pkts < cfg.min_sampled_packets:
            continue
        if s.share < cfg.share_threshold:
            continue
        events.append(AttackEvent(
            victim_ip=s.client_ip,
            day=s.day,
            packet_count=s.total_pkts,
            misused_packet_count=s.misused_pkts,
            est_original_packets=s.total_pkts * cfg.sampling_denominator,
            est_misused_packets=s.misused_pkts * cfg.sampling_denominator,
            share=s.share,
            share_excluding_root=s.share_excluding_root,
            first_ts=s.first_ts,
            last_ts=s.last_ts,
            request_count=s.request_count,
            response_count=s.response_count,
            qname_counts={q: s.qname_counts[q] for q in sorted(s.qname_counts)},
            amplifier_set=tuple(sorted(s.amplifiers)),
            dns_ids=tuple(i for _, i in s.dns_id_seq),
            req_ip_ids=tuple(row[1] for row in s.req_field_seq),
            req_src_ports=tuple(row[2] for row in s.req_field_seq),
            req_dns_ids=tuple(row[3] for row in s.req_field_seq),
            ingress_as_counts={a: s.ingress_as_counts[a]
                               for a in sorted(s.ingress_as_counts)},
            victim_as=_majority_as(s.client_as_counts),
        ))
    events.sort(key=lambda e: (e.day, e.victim_ip))
    return events


def decile_ranks(values: Sequence[int]) -> list[int]:
    """Decile (1..10) per value, ascending, average ranks on ties.

    decile = ceil(10 * avg_rank / N), computed in integer arithmetic:
    tied values share the mean of their 1-based sort positions.
    """
    n = len(values)
    if n == 0:
        return []
    order = sorted(range(n), key=lambda i: values[i])
    deciles = [0] * n
    pos = 0
    while pos < n:
        end = pos
        while end + 1 < n and values[order[end + 1]] == values[order[pos]]:
            end += 1
        # 1-based positions pos+1 .. end+1 share one average rank
        rank_sum = (pos + 1 + end + 1) * (end - pos + 1) // 2
        count = end - pos + 1
        decile = (10 * rank_sum + count * n - 1) // (count * n)
        for k in range(pos, end + 1):
            deciles[order[k]] = decile
        pos = end + 1
    return deciles


def intensity_deciles(events: Sequence[AttackEvent]) -> list[AttackEvent]:
    """Score events 1..10 by sampled packet count (ascending), in place."""
    for event, decile in zip(events, decile_ranks([e.packet_count for e in events])):
        event.intensity_decile = decile
    return list(events)


def visibility_curve(stats: Sequence[ClientDayStats],
                     max_packets: int | None = None) -> list[tuple[int, float]]:
    """Share of client-days with at least p sampled packets, p = 1..max.

    Non-increasing in p by construction."""
    if not stats:
        return []
    totals = sorted(s.total_pkts for s in stats)
    top = max_packets if max_packets is not None else totals[-1]
    n = len(totals)
    curve = []
    idx = 0
    for p in range(1, top + 1):
        while idx < n and totals[idx] < p:
            idx += 1
        curve.append((p, (n - idx) / n))
    return curve


def _v4_prefix(ip: str, bits: int) -> str | None:
    parts = ip.split(".")
    if len(parts) != 4:
        return None
    try:
        octets = [int(p) for p in parts]
    except ValueError:
        return None
    keep = bits // 8
    return ".".join(str(o) for o in octets[:keep]) + f"/{bits}"


def victim_summary(events: Sequence[AttackEvent]) -> dict:
    """Daily victim/prefix/AS counts plus duration percentiles."""
    daily: dict[str, dict[str, set]] = defaultdict(
        lambda: {"victims": set(), "p24": set(), "p16": set(), "p8": set(), "ases": set()})
    for event in events:
        bucket = daily[event.day]
        bucket["victims"].add(event.victim_ip)
        for bits, key in ((24, "p24"), (16, "p16"), (8, "p8")):
            prefix = _v4_prefix(event.victim_ip, bits)
            if prefix is not None:
                bucket[key].add(prefix)
        if event.victim_as is not None:
            bucket["ases"].add(event.victim_as)
    rows = [
        {
            "day": day,
            "victims": len(daily[day]["victims"]),
            "prefixes_24": len(daily[day]["p24"]),
            "prefixes_16": len(daily[day]["p16"]),
            "prefixes_8": len(daily[day]["p8"]),
            "victim_ases": len(daily[day]["ases"]),
        }
        for day in sorted(daily)
    ]
    durations = np.array([e.duration_s for e in events], dtype=float)
    percentiles = {}
    if durations.size:
        for p in (25, 50, 75, 90):
            percentiles[f"p{p}"] = float(np.percentile(durations, p))
    return {"daily": rows, "duration_percentiles": percentiles}


_EVENT_FIELDS = (
    "victim_ip", "day", "packet_count", "misused_packet_count",
    "est_original_packets", "est_misused_packets", "share",
    "share_excluding_root", "first_ts", "last_ts", "request_count",
    "response_count", "qname_counts", "amplifier_set", "dns_ids",
    "req_ip_ids", "req_src_ports", "req_dns_ids", "ingress_as_counts",
    "victim_as", "intensity_decile",
)


def event_to_obj(event: AttackEvent) -> dict:
    obj = {}
    for name in _EVENT_FIELDS:
        value = getattr(event, name)
        if isinstance(value, tuple):
            value = list(value)
        elif name == "ingress_as_counts":
            value = {str(k): v for k, v in value.items()}
        obj[name] = value
    obj["duration_s"] = event.duration_s
    return obj


def event_from_obj(obj: dict) -> AttackEvent:
    return AttackEvent(
        victim_ip=obj["victim_ip"],
        day=obj["day"],
        packet_count=obj["packet_count"],
        misused_packet_count=obj["misused_packet_count"],
        est_original_packets=obj["est_original_packets"],
        est_misused_packets=obj["est_misused_packets"],
        share=obj["share"],
        share_excluding_root=obj["share_excluding_root"],
        first_ts=obj["first_ts"],
        last_ts=obj["last_ts"],
        request_count=obj["request_count"],
        response_count=obj["response_count"],
        qname_counts=dict(obj["qname_counts"]),
        amplifier_set=tuple(obj["amplifier_set"]),
        dns_ids=tuple(obj["dns_ids"]),
        req_ip_ids=tuple(obj["req_ip_ids"]),
        req_src_ports=tuple(obj["req_src_ports"]),
        req_dns_ids=tuple(obj["req_dns_ids"]),
        ingress_as_counts={int(k): v for k, v in obj["ingress_as_counts"].items()},
        victim_as=obj.get("victim_as"),
        intensity_decile=obj.get("intensity_decile"),
    )


def write_events(events: Iterable[AttackEvent], path: str) -> None:
    with open(path, "w", encoding="utf-8") as handle:
        for event in events:
            handle.write(json.dumps(event_to_obj(event), separators=(",", ":")))
            handle.write("\n")


def read_events(path: str) -> list[AttackEvent]:
    events = []
    with open(path, "r", encoding="utf-8") as handle:
        for line in handle:
            line = line.strip()
            if line:
                events.append(event_from_obj(json.loads(line)))
    return events
