"""Honeypot request logs: event inference and comparison with trace events.

Honeypot sensors emulate amplifiers and log unsampled attacker requests, so
they see a different slice of the same attacks than a sampled trace does.
Requests are segmented into events per sensor, merged across sensors, and
matched against trace-side events by victim and time window.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass
from typing import Iterable, Sequence

from .detector import AttackEvent, decile_ranks

# Inference presets: classic amplifier-honeypot thresholds.
PRESETS: dict[str, tuple[int, float]] = {
    "ccc": (5, 900.0),
    "amppot": (100, 3600.0),
}


@dataclass(slots=True)
class HoneypotRequest:
    ts: float
    sensor_id: str
    victim_ip: str
    qname: str
    qtype: int


@dataclass(slots=True)
class HoneypotEvent:
    victim_ip: str
    start: float
    end: float
    request_count: int
    sensor_ids: tuple[str, ...]
    intensity_decile: int | None = None

    @property
    def duration_s(self) -> float:
        return self.end - self.start


def read_honeypot_csv(path: str) -> tuple[list[HoneypotRequest], int]:
    """ts,sensor_id,victim_ip,qname,qtype rows; malformed rows counted."""
    requests: list[HoneypotRequest] = []
    skipped = 0
    with open(path, "r", encoding="utf-8", newline="") as handle:
        reader = csv.reader(handle)
        for lineno, row in enumerate(reader):
            if not row or (lineno == 0 and row[0].lower() == "ts"):
                continue
            if len(row) != 5:
                skipped += 1
                continue
            try:
                requests.append(HoneypotRequest(
                    ts=float(row[0]), sensor_id=row[1], victim_ip=row[2],
                    qname=row[3], qtype=int(row[4])))
            except ValueError:
                skipped += 1
    return requests, skipped


def write_honeypot_csv(requests: Iterable[HoneypotRequest], path: str) -> None:
    with open(path, "w", encoding="utf-8", newline="") as handle:
        handle.write("ts,sensor_id,victim_ip,qname,qtype\n")
        for req in requests:
            handle.write(f"{req.ts!r},{req.sensor_id},{req.victim_ip},{req.qname},{req.qtype}\n")


def infer_honeypot_attacks(requests: Sequence[HoneypotRequest],
                           min_requests: int = 5,
                           max_gap_s: float = 900.0) -> list[HoneypotEvent]:
    """Segment request streams into attack events.

    Per (sensor, victim) the time-sorted stream splits wherever consecutive
    requests are more than max_gap_s apart (a gap of exactly max_gap_s does
    not split); segments shorter than min_requests are discarded. Same-victim
    segments from different sensors whose windows intersect (touching counts)
    merge into one event with the union of sensors.
    """
    if min_requests < 1:
        raise ValueError(f"min_requests must be >= 1, got {min_requests}")
    if max_gap_s <= 0:
        raise ValueError(f"max_gap_s must be > 0, got {max_gap_s}")
    streams: dict[tuple[str, str], list[float]] = {}
    for req in requests:
        streams.setdefault((req.sensor_id, req.victim_ip), []).append(req.ts)

    segments: dict[str, list[tuple[float, float, int, str]]] = {}
    for (sensor, victim), stamps in streams.items():
        stamps.sort()
        seg_start = 0
        for i in range(1, len(stamps) + 1):
            if i == len(stamps) or stamps[i] - stamps[i - 1] > max_gap_s:
                size = i - seg_start
                if size >= min_requests:
                    segments.setdefault(victim, []).append(
                        (stamps[seg_start], stamps[i - 1], size, sensor))
                seg_start = i

    events: list[HoneypotEvent] = []
    for victim in sorted(segments):
        spans = sorted(segments[victim])
        current = None
        for start, end, count, sensor in spans:
            if current is None or start > current[1]:
                if current is not None:
                    events.append(HoneypotEvent(
                        victim_ip=victim, start=current[0], end=current[1],
                        request_count=current[2],
                        sensor_ids=tuple(sorted(current[3]))))
                current = [start, end, count, {sensor}]
            else:
                current[1] = max(current[1], end)
                current[2] += count
                current[3].add(sensor)
        if current is not None:
            events.append(HoneypotEvent(
                victim_ip=victim, start=current[0], end=current[1],
                request_count=current[2], sensor_ids=tuple(sorted(current[3]))))
    events.sort(key=lambda e: (e.start, e.victim_ip))
    return events


def score_honeypot_deciles(events: Sequence[HoneypotEvent]) -> list[HoneypotEvent]:
    """Intensity deciles by request count, same rule as trace-side events."""
    for event, decile in zip(events, decile_ranks([e.request_count for e in events])):
        event.intensity_decile = decile
    return list(events)


@dataclass(slots=True)
class OverlapReport:
    pairs: tuple[tuple[int, int], ...]          # (trace event idx, honeypot event idx)
    trace_total: int
    honeypot_total: int

    @property
    def mutual_count(self) -> int:
        return len(self.pairs)

    @property
    def trace_matched_fraction(self) -> float:
        return self.mutual_count / self.trace_total if self.trace_total else 0.0

    @property
    def honeypot_matched_fraction(self) -> float:
        return self.mutual_count / self.honeypot_total if self.honeypot_total else 0.0


def _windows_intersect(a_start: float, a_end: float,
                       b_start: float, b_end: float, slack: float) -> bool:
    return a_start <= b_end + slack and b_start <= a_end + slack


def overlap(trace_events: Sequence[AttackEvent],
            honeypot_events: Sequence[HoneypotEvent],
            slack_s: float = 300.0) -> OverlapReport:
    """Match trace events to honeypot events seen for the same victim.

    Windows widen by slack_s before the intersection test. The trace side
    drives a greedy pass in earliest-start order; each candidate set is the
    victim's unmatched honeypot events, and the earliest-ending one wins
    (then earliest-starting), which keeps the pairing maximal on interval
    instances. Every event matches at most once.
    """
    by_victim: dict[str, list[int]] = {}
    for idx, event in enumerate(honeypot_events):
        by_victim.setdefault(event.victim_ip, []).append(idx)
    matched_hp: set[int] = set()
    pairs: list[tuple[int, int]] = []
    order = sorted(range(len(trace_events)),
                   key=lambda i: (trace_events[i].first_ts, trace_events[i].victim_ip))
    for trace_idx in order:
        event = trace_events[trace_idx]
        candidates = [
            hp_idx for hp_idx in by_victim.get(event.victim_ip, ())
            if hp_idx not in matched_hp and _windows_intersect(
                event.first_ts, event.last_ts,
                honeypot_events[hp_idx].start, honeypot_events[hp_idx].end,
                slack_s)
        ]
        if not candidates:
            continue
        best = min(candidates, key=lambda i: (honeypot_events[i].end,
                                              honeypot_events[i].start, i))
        matched_hp.add(best)
        pairs.append((trace_idx, best))
    pairs.sort()
    return OverlapReport(
        pairs=tuple(pairs),
        trace_total=len(trace_events),
        honeypot_total=len(honeypot_events),
    )


@dataclass(slots=True)
class IntensityComparison:
    trace_decile_counts: dict[int, int]
    honeypot_decile_counts: dict[int, int]
    trace_mean: float
    honeypot_mean: float


def intensity_comparison(trace_events: Sequence[AttackEvent],
                         honeypot_events: Sequence[HoneypotEvent],
                         report: OverlapReport) -> IntensityComparison:
    """Compare intensity deciles across the mutual pairs of both vantages.

    Both sides must be decile-scored over their full event populations first.
    """
    trace_deciles, hp_deciles = [], []
    for trace_idx, hp_idx in report.pairs:
        trace_event = trace_events[trace_idx]
        hp_event = honeypot_events[hp_idx]
        if trace_event.intensity_decile is None or hp_event.intensity_decile is None:
            raise ValueError("events must be decile-scored before comparison")
        trace_deciles.append(trace_event.intensity_decile)
        hp_deciles.append(hp_event.intensity_decile)
    if not trace_deciles:
        raise ValueError("no mutual pairs to compare")
    return IntensityComparison(
        trace_decile_counts={d: trace_deciles.count(d) for d in range(1, 11)},
        honeypot_decile_counts={d: hp_deciles.count(d) for d in range(1, 11)},
        trace_mean=sum(trace_deciles) / len(trace_deciles),
        honeypot_mean=sum(hp_deciles) / len(hp_deciles),
    )


def convergence_curve(events: Sequence[HoneypotEvent]) -> list[tuple[int, float]]:
    """Victim coverage as sensors are added in descending coverage order.

    Sensor order: by distinct victims seen, descending, sensor id as the tie
    break. The curve is non-decreasing and ends at 1.0.
    """
    victims_by_sensor: dict[str, set[str]] = {}
    all_victims: set[str] = set()
    for event in events:
        all_victims.add(event.victim_ip)
        for sensor in event.sensor_ids:
            victims_by_sensor.setdefault(sensor, set()).add(event.victim_ip)
    if not all_victims:
        return []
    order = sorted(victims_by_sensor,
                   key=lambda s: (-len(victims_by_sensor[s]), s))
    covered: set[str] = set()
    curve = []
    for rank, sensor in enumerate(order, start=1):
        covered |= victims_by_sensor[sensor]
        curve.append((rank, len(covered) / len(all_victims)))
    return curve


def event_to_obj(event: HoneypotEvent) -> dict:
    return {
        "victim_ip": event.victim_ip,
        "start": event.start,
        "end": event.end,
        "request_count": event.request_count,
        "sensor_ids": list(event.sensor_ids),
        "intensity_decile": event.intensity_decile,
    }


def write_honeypot_events(events: Iterable[HoneypotEvent], path: str) -> None:
    with open(path, "w", encoding="utf-8") as handle:
        for event in events:
            handle.write(json.dumps(event_to_obj(event), separators=(",", ":")))
            handle.write("\n")


def read_honeypot_events(path: str) -> list[HoneypotEvent]:
    events = []
    with open(path, "r", encoding="utf-8") as handle:
        for line in handle:
            line = line.strip()
            if not line:
                continue
            obj = json.loads(line)
            events.append(HoneypotEvent(
                victim_ip=obj["victim_ip"], start=obj["start"], end=obj["end"],
                request_count=obj["request_count"],
                sensor_ids=tuple(obj["sensor_ids"]),
                intensity_decile=obj.get("intensity_decile")))
    return events
