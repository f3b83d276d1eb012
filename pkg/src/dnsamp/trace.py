"""Sampled DNS trace model: JSONL parsing, sanitization, AS annotation.

Traces come from packet-sampled, truncated captures, so records carry only
header-level fields. The client side of a flow is the source of requests and
the destination of responses; everything downstream keys on that convention.
"""

from __future__ import annotations

import ipaddress
import json
import math
from dataclasses import dataclass
from datetime import datetime, timezone
from typing import Iterable, Iterator, TextIO

# Canonical JSONL field order. Serialization always emits these fields in this
# order so that parse -> serialize round-trips byte-identically.
TRACE_FIELDS = (
    "ts", "src_ip", "dst_ip", "src_port", "dst_port", "ip_ttl", "ip_id",
    "udp_len", "qr", "dns_id", "qname", "qtype", "rcode", "ancount", "nscount",
)

DNS_PORT = 53
UDP_HEADER_LEN = 8
MAX_NAME_WIRE_LEN = 255
MAX_LABEL_LEN = 63


def normalize_qname(qname: str) -> str:
    """Lowercase and append the trailing dot; the root name is ".".

    Idempotent: normalize_qname(normalize_qname(x)) == normalize_qname(x).
    """
    name = qname.strip().lower()
    if name in ("", "."):
        return "."
    if not name.endswith("."):
        name += "."
    return name


def qname_labels(qname: str) -> list[str]:
    """Labels of a normalized name, without the empty root label."""
    name = normalize_qname(qname)
    if name == ".":
        return []
    return name[:-1].split(".")


def qname_wire_length(qname: str) -> int:
    """Uncompressed wire length of a name: one length byte per label plus
    the label bytes, terminated by the single zero byte of the root label."""
    labels = qname_labels(qname)
    return sum(len(label) + 1 for label in labels) + 1


def qname_is_valid(qname: str) -> bool:
    """Grammar check after normalization: labels 1..63 bytes, wire length
    capped at 255 bytes, no empty interior labels."""
    name = normalize_qname(qname)
    if name == ".":
        return True
    labels = name[:-1].split(".")
    if any(not 1 <= len(label) <= MAX_LABEL_LEN for label in labels):
        return False
    return qname_wire_length(name) <= MAX_NAME_WIRE_LEN


@dataclass(slots=True)
class PacketRecord:
    """One sampled DNS packet, truncated to header-level fields."""

    ts: float
    src_ip: str
    dst_ip: str
    src_port: int
    dst_port: int
    ip_ttl: int
    ip_id: int
    udp_len: int
    is_response: bool
    dns_id: int
    qname: str
    qtype: int
    rcode: int
    ancount: int
    nscount: int
    src_as: int | None = None
    dst_as: int | None = None

    @property
    def client_ip(self) -> str:
        """Source of requests, destination of responses."""
        return self.dst_ip if self.is_response else self.src_ip

    @property
    def server_ip(self) -> str:
        return self.src_ip if self.is_response else self.dst_ip

    @property
    def client_as(self) -> int | None:
        return self.dst_as if self.is_response else self.src_as

    @property
    def ingress_as(self) -> int | None:
        """Origin-side AS of the packet as it arrived (source AS)."""
        return self.src_as

    @property
    def dns_payload_len(self) -> int:
        return self.udp_len - UDP_HEADER_LEN

    @property
    def day(self) -> str:
        """UTC calendar day of the packet, ISO formatted."""
        return datetime.fromtimestamp(self.ts, tz=timezone.utc).date().isoformat()


@dataclass(slots=True)
class TraceMeta:
    """Capture parameters of a sampled trace."""

    sampling_denominator: int = 16000
    truncation_bytes: int = 128

    def __post_init__(self) -> None:
        if self.sampling_denominator < 1:
            raise ValueError(
                f"sampling_denominator must be >= 1, got {self.sampling_denominator}")
        if self.truncation_bytes < 0:
            raise ValueError(
                f"truncation_bytes must be >= 0, got {self.truncation_bytes}")


_INT_FIELDS = ("src_port", "dst_port", "ip_ttl", "ip_id", "udp_len",
               "dns_id", "qtype", "rcode", "ancount", "nscount")


def _record_from_obj(obj: dict) -> PacketRecord | None:
    """Build a record from one decoded JSONL object; None if structurally bad."""
    if not isinstance(obj, dict):
        return None
    try:
        ts = obj["ts"]
        if isinstance(ts, bool) or not isinstance(ts, (int, float)):
            return None
        qr = obj["qr"]
        # the bit arrives as true/false or 0/1 depending on the exporter
        if not isinstance(qr, bool):
            if isinstance(qr, int) and qr in (0, 1):
                qr = bool(qr)
            else:
                return None
        src_ip, dst_ip, qname = obj["src_ip"], obj["dst_ip"], obj["qname"]
        if not (isinstance(src_ip, str) and isinstance(dst_ip, str)
                and isinstance(qname, str)):
            return None
        ints = {}
        for name in _INT_FIELDS:
            value = obj[name]
            if isinstance(value, bool) or not isinstance(value, int):
                return None
            ints[name] = value
    except KeyError:
        return None
    for as_field in ("src_as", "dst_as"):
        value = obj.get(as_field)
        if value is not None and (isinstance(value, bool) or not isinstance(value, int)):
            return None
    return PacketRecord(
        ts=float(ts),
        src_ip=src_ip,
        dst_ip=dst_ip,
        is_response=qr,
        qname=normalize_qname(qname),
        src_as=obj.get("src_as"),
        dst_as=obj.get("dst_as"),
        **ints,
    )


def parse_trace(source: str | TextIO | Iterable[str],
                meta: TraceMeta | None = None) -> tuple[list[PacketRecord], int]:
    """Parse a JSONL trace into records.

    `source` is a file path, an open text handle, or an iterable of lines.
    Returns (records, skipped_line_count); malformed lines (bad JSON, missing
    fields, wrong types) are counted and skipped, never raised. Semantic
    validity is sanitize()'s job.
    """
    if meta is not None:
        TraceMeta(meta.sampling_denominator, meta.truncation_bytes)  # validate
    if isinstance(source, str):
        with open(source, "r", encoding="utf-8") as handle:
            return parse_trace(handle)
    records: list[PacketRecord] = []
    skipped = 0
    for line in source:
        line = line.strip()
        if not line:
            continue
        try:
            obj = json.loads(line)
        except json.JSONDecodeError:
            skipped += 1
            continue
        record = _record_from_obj(obj)
        if record is None:
            skipped += 1
        else:
            records.append(record)
    return records, skipped


def record_to_obj(record: PacketRecord) -> dict:
    """Canonical-order dict for one record; AS fields only when annotated."""
    obj = {
        "ts": record.ts,
        "src_ip": record.src_ip,
        "dst_ip": record.dst_ip,
        "src_port": record.src_port,
        "dst_port": record.dst_port,
        "ip_ttl": record.ip_ttl,
        "ip_id": record.ip_id,
        "udp_len": record.udp_len,
        "qr": record.is_response,
        "dns_id": record.dns_id,
        "qname": record.qname,
        "qtype": record.qtype,
        "rcode": record.rcode,
        "ancount": record.ancount,
        "nscount": record.nscount,
    }
    if record.src_as is not None or record.dst_as is not None:
        obj["src_as"] = record.src_as
        obj["dst_as"] = record.dst_as
    return obj


def serialize_trace(records: Iterable[PacketRecord]) -> Iterator[str]:
    """Yield canonical JSONL lines (no trailing newline per line)."""
    for record in records:
        yield json.dumps(record_to_obj(record), separators=(",", ":"))


def write_trace(records: Iterable[PacketRecord], path: str) -> None:
    with open(path, "w", encoding="utf-8") as handle:
        for line in serialize_trace(records):
            handle.write(line)
            handle.write("\n")


def _ip_or_none(text: str) -> ipaddress.IPv4Address | ipaddress.IPv6Address | None:
    try:
        return ipaddress.ip_address(text)
    except ValueError:
        return None


def _record_is_valid(record: PacketRecord) -> bool:
    if not (isinstance(record.ts, float) and math.isfinite(record.ts)):
        return False
    if _ip_or_none(record.src_ip) is None or _ip_or_none(record.dst_ip) is None:
        return False
    for port in (record.src_port, record.dst_port):
        if not 0 <= port <= 65535:
            return False
    # Exactly one endpoint on the DNS port, consistent with the QR bit:
    # requests travel to port 53, responses come from it.
    if (record.src_port == DNS_PORT) == (record.dst_port == DNS_PORT):
        return False
    if record.is_response and record.src_port != DNS_PORT:
        return False
    if not record.is_response and record.dst_port != DNS_PORT:
        return False
    if not 0 <= record.ip_ttl <= 255:
        return False
    if not 0 <= record.ip_id <= 65535:
        return False
    if not 0 <= record.dns_id <= 65535:
        return False
    if record.udp_len < UDP_HEADER_LEN:
        return False
    if not 0 <= record.qtype <= 65535:
        return False
    if not 0 <= record.rcode <= 15:
        return False
    if record.ancount < 0 or record.nscount < 0:
        return False
    return qname_is_valid(record.qname)


def sanitize(records: Iterable[PacketRecord]) -> tuple[list[PacketRecord], int]:
    """Keep semantically well-formed records, count the rest.

    Idempotent: a second pass over the kept records drops nothing. Kept
    records get their qname normalized so hand-built input behaves like
    parsed input.
    """
    kept: list[PacketRecord] = []
    dropped = 0
    for record in records:
        record.qname = normalize_qname(record.qname)
        if _record_is_valid(record):
            kept.append(record)
        else:
            dropped += 1
    return kept, dropped


class PrefixTable:
    """Longest-prefix-match IP-to-AS table built from (cidr, asn) rows."""

    def __init__(self, rows: Iterable[tuple[str, int]]):
        # maps (ip_version, prefix_len) -> {masked_int: asn}
        self._buckets: dict[tuple[int, int], dict[int, int]] = {}
        self._lengths: dict[int, list[int]] = {4: [], 6: []}
        count = 0
        for index, (prefix, asn) in enumerate(rows):
            try:
                network = ipaddress.ip_network(prefix, strict=True)
            except ValueError as exc:
                raise ValueError(f"prefix table row {index}: bad CIDR {prefix!r}: {exc}")
            if not isinstance(asn, int) or isinstance(asn, bool) or asn < 0:
                raise ValueError(f"prefix table row {index}: bad ASN {asn!r}")
            key = (network.version, network.prefixlen)
            self._buckets.setdefault(key, {})[int(network.network_address)] = asn
            count += 1
        for version in (4, 6):
            lengths = sorted({plen for (ver, plen) in self._buckets if ver == version},
                             reverse=True)
            self._lengths[version] = lengths
        self._size = count

    def __len__(self) -> int:
        return self._size

    @classmethod
    def from_csv(cls, path: str) -> "PrefixTable":
        """Load `prefix,asn` rows; a header line is tolerated."""
        rows: list[tuple[str, int]] = []
        with open(path, "r", encoding="utf-8") as handle:
            for lineno, line in enumerate(handle):
                line = line.strip()
                if not line:
                    continue
                parts = line.split(",")
                if len(parts) != 2:
                    raise ValueError(f"prefix table line {lineno + 1}: expected prefix,asn")
                if lineno == 0 and parts[0].lower() == "prefix":
                    continue
                try:
                    asn = int(parts[1])
                except ValueError:
                    raise ValueError(f"prefix table line {lineno + 1}: bad ASN {parts[1]!r}")
                try:
                    ipaddress.ip_network(parts[0])
                except ValueError as exc:
                    raise ValueError(f"prefix table line {lineno + 1}: {exc}") from None
                rows.append((parts[0], asn))
        return cls(rows)

    def lookup(self, ip: str) -> int | None:
        addr = _ip_or_none(ip)
        if addr is None:
            return None
        max_bits = addr.max_prefixlen
        addr_int = int(addr)
        for plen in self._lengths[addr.version]:
            masked = (addr_int >> (max_bits - plen)) << (max_bits - plen) if plen else 0
            asn = self._buckets[(addr.version, plen)].get(masked)
            if asn is not None:
                return asn
        return None


def annotate(records: list[PacketRecord], table: PrefixTable) -> list[PacketRecord]:
    """Fill src_as/dst_as in place via longest-prefix match; membership of the
    record list never changes. Unmatched addresses stay None."""
    cache: dict[str, int | None] = {}
    for record in records:
        for ip in (record.src_ip, record.dst_ip):
            if ip not in cache:
                cache[ip] = table.lookup(ip)
        record.src_as = cache[record.src_ip]
        record.dst_as = cache[record.dst_ip]
    return records
