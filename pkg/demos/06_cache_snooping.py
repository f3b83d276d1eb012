"""Which open DNS speakers took part, and were they asked recently?

Probes query each speaker for an anchor name whose authoritative server
echoes the querying resolver's address back as the A record. The echo
splits resolvers from forwarders; the answer TTL, compared against the
authoritative default, tells whether the name already sat in the cache
(someone asked before us) or was fetched fresh for our probe.
"""

from dnsamp import snoop

ANCHOR = "anchor.example."
DEFAULT_TTLS = {ANCHOR: 300}


def probe(target: str, responder: str, echo: str | None, ttl: int,
          rcode: int = 0, ts: float = 0.0) -> snoop.ProbeResponse:
    return snoop.ProbeResponse(
        target_ip=target, responder_ip=responder, echoed_a_record=echo,
        qname=ANCHOR, answer_ttls=(("A", ttl),), rcode=rcode, ts=ts)


def main() -> None:
    responses = [
        # honest resolver (echoes itself), answer aged in its cache -> hit
        probe("93.184.216.1", "93.184.216.1", "93.184.216.1", 120, ts=1.0),
        # forwarder: echo names its upstream, TTL still at default -> miss
        probe("93.184.216.2", "93.184.216.2", "93.184.216.53", 300, ts=2.0),
        # no echoed record at all -> role and cache stay unclassified/unknown
        snoop.ProbeResponse(target_ip="93.184.216.3",
                            responder_ip="93.184.216.3",
                            echoed_a_record=None, qname="other.example.",
                            answer_ttls=(("A", 42),), rcode=0, ts=3.0),
        # manipulation: echoes a private address -> dropped
        probe("93.184.216.4", "93.184.216.4", "10.0.0.1", 120, ts=4.0),
        # impossible TTL above the authoritative default -> dropped
        probe("93.184.216.5", "93.184.216.5", "93.184.216.5", 9999, ts=5.0),
        # SERVFAIL -> dropped
        probe("93.184.216.6", "93.184.216.6", None, 300, rcode=2, ts=6.0),
        # duplicate responder: second answer from .1 -> dropped, first kept
        probe("93.184.216.99", "93.184.216.1", "93.184.216.1", 60, ts=7.0),
    ]

    print("=== sanitization ===")
    kept, dropped = snoop.sanitize_probe_responses(responses, DEFAULT_TTLS)
    print(f"{len(responses)} responses in, {len(kept)} kept, "
          f"{dropped} dropped (private echo, impossible TTL, SERVFAIL, "
          f"duplicate responder)")

    print()
    print("=== classification ===")
    rows = snoop.classification_table(kept, DEFAULT_TTLS)
    print(f"{'responder':<14} {'role':<13} {'cache':<8} two-way")
    for row in rows:
        print(f"{row['responder_ip']:<14} {row['role']:<13} "
              f"{row['cache']:<8} {row['cache_two_way']}")

    print()
    print("=== why TTL == default means miss ===")
    fresh = probe("93.184.216.7", "93.184.216.7", "93.184.216.7", 300)
    aged = probe("93.184.216.7", "93.184.216.7", "93.184.216.7", 299)
    print(f"TTL 300 of 300 -> {snoop.classify_cache_state(fresh, 300)} "
          "(fetched for our probe; nobody asked before us)")
    print(f"TTL 299 of 300 -> {snoop.classify_cache_state(aged, 300)} "
          "(already cached; the speaker served someone else recently)")
    mixed = snoop.ProbeResponse(
        target_ip="93.184.216.8", responder_ip="93.184.216.8",
        echoed_a_record="93.184.216.8", qname=ANCHOR,
        answer_ttls=(("A", 300), ("TXT", 120)), rcode=0)
    print(f"mixed TTLs 300+120   -> three-way "
          f"{snoop.classify_cache_state(mixed, 300)}, two-way "
          f"{snoop.two_way_cache_state(mixed, 300)}")


if __name__ == "__main__":
    main()
