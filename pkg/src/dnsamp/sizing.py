"""Uncompressed ANY-response size estimation from zone record inventories.

Sampled, truncated captures never show full response payloads, so sizes are
reconstructed from the records a name would return to an ANY query: a DNS
header, the question, and one uncompressed resource record per entry. The
daily series of estimates also exposes DNSSEC key-rollover plateaus, where
double signatures inflate responses by a fixed step for a stretch of days.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Iterable, Sequence

from .trace import qname_is_valid, qname_wire_length, normalize_qname

DNS_HEADER_LEN = 12
QUESTION_FIXED_LEN = 4      # QTYPE + QCLASS
RR_FIXED_LEN = 10           # TYPE + CLASS + TTL + RDLENGTH
EDNS_OPT_LEN = 11           # root owner + TYPE + CLASS(payload) + TTL + RDLENGTH
EDNS_DEFAULT_LIMIT = 4096


@dataclass(slots=True)
class ZoneRecord:
    rr_type: str
    ttl: int
    rdata_len: int


@dataclass(slots=True)
class RecordSet:
    """Records a name answers with, as inventoried on one day."""

    owner: str
    records: tuple[ZoneRecord, ...]
    day: str | None = None

    def __post_init__(self) -> None:
        self.owner = normalize_qname(self.owner)


@dataclass(slots=True)
class SizeEstimate:
    owner: str
    est_bytes: int
    exceeds_edns: bool


def estimate_any_response_size(record_set: RecordSet,
                               edns_limit: int = EDNS_DEFAULT_LIMIT) -> SizeEstimate:
    """Uncompressed wire size of the ANY response for a record set.

    est = header + (owner + 4) question + sum(owner + 10 + rdata_len) per
    record. Estimates above the EDNS limit are flagged, never clamped: the
    flag marks answers that need TCP or larger buffers.
    """
    if not qname_is_valid(record_set.owner):
        raise ValueError(f"invalid owner name {record_set.owner!r}")
    owner_wire = qname_wire_length(record_set.owner)
    total = DNS_HEADER_LEN + owner_wire + QUESTION_FIXED_LEN
    for record in record_set.records:
        if record.rdata_len < 0:
            raise ValueError(f"negative rdata_len in {record_set.owner!r}")
        total += owner_wire + RR_FIXED_LEN + record.rdata_len
    return SizeEstimate(
        owner=record_set.owner,
        est_bytes=total,
        exceeds_edns=total > edns_limit,
    )


def request_size(owner: str, edns: bool = False) -> int:
    """Wire size of the ANY query itself (optionally with an EDNS OPT RR)."""
    size = DNS_HEADER_LEN + qname_wire_length(owner) + QUESTION_FIXED_LEN
    return size + EDNS_OPT_LEN if edns else size


@dataclass(slots=True)
class AmplificationRanking:
    rows: tuple[tuple[str, int, float], ...]   # owner, est_bytes, cdf
    count_above_reference: int
    reference_max: int | None
    factors: dict[str, float]


def rank_amplification(estimates: Sequence[SizeEstimate],
                       reference_names: Iterable[str] = (),
                       edns: bool = False) -> AmplificationRanking:
    """Size CDF over all names plus per-name amplification factors.

    reference_names picks out well-known amplification domains already present
    in the estimates; count_above_reference counts names strictly larger than
    the biggest reference. The factor divides the estimated response by the
    ANY request size for the same owner.
    """
    owners = {e.owner for e in estimates}
    references = {normalize_qname(name) for name in reference_names}
    missing = references - owners
    if missing:
        raise ValueError(f"reference names absent from estimates: {sorted(missing)}")
    ordered = sorted(estimates, key=lambda e: (e.est_bytes, e.owner))
    n = len(ordered)
    rows = tuple(
        (e.owner, e.est_bytes, (idx + 1) / n) for idx, e in enumerate(ordered)
    )
    reference_max = max((e.est_bytes for e in estimates if e.owner in references),
                        default=None)
    above = 0
    if reference_max is not None:
        above = sum(1 for e in estimates if e.est_bytes > reference_max)
    factors = {
        e.owner: e.est_bytes / request_size(e.owner, edns=edns) for e in ordered
    }
    return AmplificationRanking(
        rows=rows,
        count_above_reference=above,
        reference_max=reference_max,
        factors=factors,
    )


@dataclass(slots=True)
class Plateau:
    start_index: int
    end_index: int
    height: int
    level: int

    @property
    def length(self) -> int:
        return self.end_index - self.start_index + 1


def detect_rollover_plateaus(series: Sequence[int], min_days: int = 7,
                             min_step_bytes: int = 256) -> list[Plateau]:
    """Find sustained size plateaus in a daily estimate series.

    A plateau starts with an upward step of at least min_step_bytes, holds
    within +/- min_step_bytes/4 of the stepped level, ends with a downward
    step of at least min_step_bytes, and lasts at least min_days entries.
    Invariant to adding a constant to the whole series (only differences
    matter). The series is assumed to be one value per consecutive day.
    """
    if min_days < 1:
        raise ValueError(f"min_days must be >= 1, got {min_days}")
    if min_step_bytes < 1:
        raise ValueError(f"min_step_bytes must be >= 1, got {min_step_bytes}")
    hold = min_step_bytes / 4
    plateaus = []
    n = len(series)
    i = 1
    while i < n:
        if series[i] - series[i - 1] >= min_step_bytes:
            level = series[i]
            j = i
            while j + 1 < n and abs(series[j + 1] - level) <= hold:
                j += 1
            dropped = j + 1 < n and series[j] - series[j + 1] >= min_step_bytes
            if dropped and j - i + 1 >= min_days:
                plateaus.append(Plateau(
                    start_index=i,
                    end_index=j,
                    height=level - series[i - 1],
                    level=level,
                ))
            i = j + 1
        else:
            i += 1
    return plateaus


def read_record_sets(path: str) -> list[RecordSet]:
    """JSONL, one {day, owner, records:[{type, ttl, rdata_len}]} per line."""
    sets = []
    with open(path, "r", encoding="utf-8") as handle:
        for lineno, line in enumerate(handle):
            line = line.strip()
            if not line:
                continue
            try:
                obj = json.loads(line)
                records = tuple(
                    ZoneRecord(rr_type=str(r["type"]), ttl=int(r["ttl"]),
                               rdata_len=int(r["rdata_len"]))
                    for r in obj["records"]
                )
                sets.append(RecordSet(owner=obj["owner"], records=records,
                                      day=obj.get("date")))
            except (KeyError, TypeError, ValueError, json.JSONDecodeError) as exc:
                raise ValueError(f"records file line {lineno + 1}: {exc}")
    return sets


def daily_series(record_sets: Sequence[RecordSet],
                 edns_limit: int = EDNS_DEFAULT_LIMIT) -> dict[str, list[tuple[str, int]]]:
    """Per-owner (day, est_bytes) series, day-sorted, for plateau scans."""
    series: dict[str, list[tuple[str, int]]] = {}
    for record_set in record_sets:
        if record_set.day is None:
            continue
        estimate = estimate_any_response_size(record_set, edns_limit=edns_limit)
        series.setdefault(record_set.owner, []).append((record_set.day, estimate.est_bytes))
    for owner in series:
        series[owner].sort()
    return series
