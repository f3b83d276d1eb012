"""Command-line pipeline over the library.

Subcommands map one-to-one onto analysis stages and exchange plain files
(JSONL/CSV/JSON), so stages can be re-run, diffed, and composed per day.
Outputs are deterministic: identical inputs produce byte-identical files.

Exit codes: 0 success, 1 processing error, 2 usage error.
"""

from __future__ import annotations

import argparse
import json
import sys
from collections import Counter
from pathlib import Path

from . import amplifiers as amp
from . import detector as det
from . import fingerprint as fp
from . import honeypot as hp
from . import selectors as sel
from . import sizing
from . import snoop
from . import synth
from . import trace as tr

_DEFAULTS = {
    "share_threshold": 0.9,
    "min_packets": 10,
    "sampling": 16000,
    "k_max": 64,
    "slack": 300.0,
    "min_requests": 5,
    "max_gap": 900.0,
    "eps": 0.6,
    "min_pts": 5,
    "min_segment": 3,
    "min_days": 7,
    "min_step": 256,
}


def _resolve(args: argparse.Namespace, config: dict, key: str):
    """Flag beats config file beats built-in default."""
    value = getattr(args, key.replace("-", "_"), None)
    if value is not None:
        return value
    if key in config:
        return config[key]
    return _DEFAULTS[key]


def _load_config(path: str | None) -> dict:
    if path is None:
        return {}
    with open(path, "r", encoding="utf-8") as handle:
        obj = json.load(handle)
    if not isinstance(obj, dict):
        raise ValueError("config file must hold a single JSON object")
    return obj


def _out_dir(args: argparse.Namespace) -> Path:
    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    return out


def _load_names(path: str) -> set[str]:
    if path.endswith(".json"):
        return sel.read_name_list(path).name_set()
    return sel.read_plain_names(path)


def _prepared_records(trace_path: str, prefix_table: str | None) -> tuple[list, int, int]:
    records, skipped = tr.parse_trace(trace_path)
    kept, dropped = tr.sanitize(records)
    if prefix_table:
        tr.annotate(kept, tr.PrefixTable.from_csv(prefix_table))
    return kept, skipped, dropped


def _cmd_ingest(args: argparse.Namespace, config: dict) -> int:
    out = _out_dir(args)
    records, skipped = tr.parse_trace(args.trace)
    total_bytes = sum(r.udp_len for r in records)
    kept, dropped = tr.sanitize(records)
    kept_bytes = sum(r.udp_len for r in kept)
    if args.prefix_table:
        tr.annotate(kept, tr.PrefixTable.from_csv(args.prefix_table))
    tr.write_trace(kept, str(out / "annotated.jsonl"))
    stats = {
        "parsed_records": len(records),
        "skipped_lines": skipped,
        "dropped_records": dropped,
        "kept_records": len(kept),
        "dropped_packet_share": dropped / len(records) if records else 0.0,
        "dropped_byte_share": (1.0 - kept_bytes / total_bytes) if total_bytes else 0.0,
    }
    with open(out / "ingest_stats.json", "w", encoding="utf-8") as handle:
        json.dump(stats, handle, indent=2)
        handle.write("\n")
    print(f"kept {len(kept)} records ({skipped} malformed lines, {dropped} dropped)")
    return 0


def _cmd_select_names(args: argparse.Namespace, config: dict) -> int:
    out = _out_dir(args)
    k_max = int(_resolve(args, config, "k_max"))
    slack = float(_resolve(args, config, "slack"))
    records, _, _ = _prepared_records(args.trace, None)
    rankings = [sel.selector_max_size(records), sel.selector_any_volume(records)]
    if args.honeypot:
        requests, _ = hp.read_honeypot_csv(args.honeypot)
        events = hp.infer_honeypot_attacks(
            requests,
            min_requests=int(_resolve(args, config, "min_requests")),
            max_gap_s=float(_resolve(args, config, "max_gap")))
        rankings.append(sel.selector_ground_truth(records, events, slack_s=slack))
    else:
        rankings.append(sel.SelectorRanking(sel.SELECTOR_GROUND_TRUTH, ()))
    names = sel.consensus_merge(rankings, k_max=k_max)
    sel.write_name_list(names, str(out / "names.json"))
    sel.write_plain_names(names, str(out / "names.txt"))
    sel.write_consensus_curve(names, str(out / "curve.csv"))
    if args.previous:
        previous = _load_names(args.previous)
        delta = sel.jaccard(names.name_set(), previous)
        with open(out / "delta.json", "w", encoding="utf-8") as handle:
            json.dump({"previous_jaccard": delta}, handle, indent=2)
            handle.write("\n")
        print(f"day-over-day name-list jaccard: {delta:.4f}")
    flagged = f" (empty selectors: {', '.join(names.missing_selectors)})" \
        if names.missing_selectors else ""
    print(f"consensus k*={names.k_star}, {len(names)} names{flagged}")
    return 0


def _cmd_detect(args: argparse.Namespace, config: dict) -> int:
    out = _out_dir(args)
    cfg = det.DetectorConfig(
        share_threshold=float(_resolve(args, config, "share_threshold")),
        min_sampled_packets=int(_resolve(args, config, "min_packets")),
        sampling_denominator=int(_resolve(args, config, "sampling")))
    records, _, _ = _prepared_records(args.trace, args.prefix_table)
    names = _load_names(args.names)
    stats = det.aggregate_client_days(records, names)
    events = det.detect_attacks(stats, cfg)
    det.intensity_deciles(events)
    det.write_events(events, str(out / "attacks.jsonl"))
    summary = det.victim_summary(events)
    with open(out / "victims_daily.csv", "w", encoding="utf-8") as handle:
        handle.write("day,victims,prefixes_24,prefixes_16,prefixes_8,victim_ases\n")
        for row in summary["daily"]:
            handle.write(
                f"{row['day']},{row['victims']},{row['prefixes_24']},"
                f"{row['prefixes_16']},{row['prefixes_8']},{row['victim_ases']}\n")
    with open(out / "duration_percentiles.csv", "w", encoding="utf-8") as handle:
        handle.write("percentile,seconds\n")
        for name, value in summary["duration_percentiles"].items():
            handle.write(f"{name},{value!r}\n")
    print(f"{len(events)} attack events from {len(stats)} suspicious client-days")
    return 0


def _cmd_fingerprint(args: argparse.Namespace, config: dict) -> int:
    out = _out_dir(args)
    min_segment = int(_resolve(args, config, "min_segment"))
    events = det.read_events(args.attacks)
    fingerprint = fp.read_fingerprint(args.fingerprint_spec)
    attributed, share = fp.attribute_entity(events, fingerprint, min_segment=min_segment)
    attributed_keys = {(e.victim_ip, e.day) for e in attributed}
    with open(out / "attribution.jsonl", "w", encoding="utf-8") as handle:
        for event in events:
            row = {
                "victim_ip": event.victim_ip,
                "day": event.day,
                "dominant_qname": event.dominant_qname(),
                "attributed": (event.victim_ip, event.day) in attributed_keys,
            }
            if len(event.dns_ids) >= 2:
                pattern = fp.classify_dnsid_pattern(event, min_segment=min_segment)
                row["id_pattern"] = pattern.kind
                row["change_point"] = pattern.change_point
            else:
                row["id_pattern"] = None
                row["change_point"] = None
            for field in ("ip_id", "src_port", "dns_id"):
                try:
                    profile = fp.field_cardinality_profile(event, field)
                    row[f"{field}_ratio"] = profile.ratio
                    row[f"{field}_low_entropy"] = profile.low_entropy
                except ValueError:
                    row[f"{field}_ratio"] = None
                    row[f"{field}_low_entropy"] = None
            handle.write(json.dumps(row, separators=(",", ":")))
            handle.write("\n")
    names = _load_names(args.names) if args.names else None
    timeline = fp.build_name_timeline(events, names)
    timeline_obj = {
        "intervals": {q: list(v) for q, v in sorted(timeline.intervals.items())},
        "transitions": [list(t) for t in timeline.transitions],
        "lexicographic": timeline.lexicographic,
        "overlaps": [list(o) for o in timeline.overlaps],
        "parity_period_days": timeline.parity_period_days,
        "daily_dominant": [list(d) for d in timeline.daily_dominant],
        "ingress_concentration": fp.ingress_concentration(events),
    }
    with open(out / "timeline.json", "w", encoding="utf-8") as handle:
        json.dump(timeline_obj, handle, indent=2)
        handle.write("\n")
    print(f"attributed {len(attributed)}/{len(events)} events (share {share:.4f})")
    return 0


def _cmd_cluster(args: argparse.Namespace, config: dict) -> int:
    out = _out_dir(args)
    eps = float(_resolve(args, config, "eps"))
    min_pts = int(_resolve(args, config, "min_pts"))
    events = det.read_events(args.attacks)
    sets = amp.amplifier_sets(events)
    matrix = amp.jaccard_distance_matrix(sets)
    amp.write_distance_matrix(matrix, str(out / "distance_matrix.csv"))
    result = amp.dbscan_cluster(matrix, eps=eps, min_pts=min_pts)
    stable = amp.stable_sets(events, result.labels)
    clusters_obj = {
        "eps": eps,
        "min_pts": min_pts,
        "n_clusters": result.n_clusters,
        "outlier_share": result.outlier_share,
        "labels": [
            {"victim_ip": e.victim_ip, "day": e.day, "label": label}
            for e, label in zip(events, result.labels)
        ],
        "stable_sets": [
            {
                "cluster_id": s.cluster_id, "n_attacks": s.n_attacks,
                "n_amplifiers": s.n_amplifiers, "core_size": s.core_size,
                "first_day": s.first_day, "last_day": s.last_day,
                "span_days": s.span_days, "mean_drift": s.mean_drift,
                "max_drift": s.max_drift, "static": s.static,
            }
            for s in stable
        ],
    }
    with open(out / "clusters.json", "w", encoding="utf-8") as handle:
        json.dump(clusters_obj, handle, indent=2)
        handle.write("\n")

    churn = amp.churn_metrics(amp.daily_amplifier_sets(events))
    with open(out / "churn.csv", "w", encoding="utf-8") as handle:
        handle.write("day,next_day,overlap\n")
        for day_a, day_b, value in churn.overlaps:
            handle.write(f"{day_a},{day_b},{value!r}\n")

    inventory = amp.amplifier_inventory(events)
    coverage = None
    if args.seen_table:
        inventory, coverage = amp.recency_join(inventory, amp.read_seen_table(args.seen_table))
    ns_table = amp.read_ns_ip_table(args.ns_table) if args.ns_table else None
    amp.classify_amplifier_role(inventory, ns_table)
    with open(out / "amplifiers.csv", "w", encoding="utf-8") as handle:
        handle.write("ip,attack_count,first_abuse_ts,last_abuse_ts,role,recency,first_seen,last_seen\n")
        for ip in sorted(inventory):
            info = inventory[ip]
            handle.write(
                f"{info.ip},{info.attack_count},{info.first_abuse_ts!r},"
                f"{info.last_abuse_ts!r},{info.role},{info.recency or ''},"
                f"{info.first_seen or ''},{info.last_seen or ''}\n")
    breakdown = amp.qname_role_breakdown(events, inventory)
    with open(out / "qname_roles.csv", "w", encoding="utf-8") as handle:
        handle.write("qname,role,count\n")
        for qname in sorted(breakdown):
            for role in sorted(breakdown[qname]):
                handle.write(f"{qname},{role},{breakdown[qname][role]}\n")
    line = (f"{result.n_clusters} clusters, outlier share {result.outlier_share:.4f}, "
            f"{len(stable)} stable sets")
    if coverage is not None:
        line += f", scan coverage {coverage:.4f}"
    print(line)
    return 0


def _cmd_estimate(args: argparse.Namespace, config: dict) -> int:
    out = _out_dir(args)
    min_days = int(_resolve(args, config, "min_days"))
    min_step = int(_resolve(args, config, "min_step"))
    record_sets = sizing.read_record_sets(args.records)
    rows = []
    for record_set in record_sets:
        estimate = sizing.estimate_any_response_size(record_set)
        rows.append((record_set.day or "", estimate))
    with open(out / "estimates.csv", "w", encoding="utf-8") as handle:
        handle.write("day,owner,est_bytes,exceeds_edns\n")
        for day, estimate in sorted(rows, key=lambda r: (r[0], r[1].owner)):
            handle.write(f"{day},{estimate.owner},{estimate.est_bytes},"
                         f"{str(estimate.exceeds_edns).lower()}\n")

    latest: dict[str, tuple[str, sizing.SizeEstimate]] = {}
    for day, estimate in rows:
        if estimate.owner not in latest or day > latest[estimate.owner][0]:
            latest[estimate.owner] = (day, estimate)
    snapshot = [estimate for _, (_, estimate) in sorted(latest.items())]
    references = []
    if args.reference_names:
        with open(args.reference_names, "r", encoding="utf-8") as handle:
            references = [line.strip() for line in handle if line.strip()]
    ranking = sizing.rank_amplification(snapshot, references, edns=args.edns)
    ranking_obj = {
        "count_above_reference": ranking.count_above_reference,
        "reference_max": ranking.reference_max,
        "factors": {owner: ranking.factors[owner] for owner in sorted(ranking.factors)},
        "cdf": [{"owner": o, "est_bytes": b, "cdf": c} for o, b, c in ranking.rows],
    }
    with open(out / "ranking.json", "w", encoding="utf-8") as handle:
        json.dump(ranking_obj, handle, indent=2)
        handle.write("\n")

    with open(out / "plateaus.csv", "w", encoding="utf-8") as handle:
        handle.write("owner,start_day,end_day,days,height\n")
        for owner, series in sorted(sizing.daily_series(record_sets).items()):
            values = [value for _, value in series]
            for plateau in sizing.detect_rollover_plateaus(values, min_days=min_days,
                                                           min_step_bytes=min_step):
                handle.write(f"{owner},{series[plateau.start_index][0]},"
                             f"{series[plateau.end_index][0]},{plateau.length},"
                             f"{plateau.height}\n")
    print(f"{len(snapshot)} names sized, {ranking.count_above_reference} above reference")
    return 0


def _cmd_snoop(args: argparse.Namespace, config: dict) -> int:
    out = _out_dir(args)
    responses, skipped = snoop.read_probe_responses(args.responses)
    ttls = snoop.read_default_ttls(args.ttl_table) if args.ttl_table else {}
    kept, dropped = snoop.sanitize_probe_responses(responses, ttls)
    rows = snoop.classification_table(kept, ttls)
    with open(out / "snoop.jsonl", "w", encoding="utf-8") as handle:
        for row in rows:
            handle.write(json.dumps(row, separators=(",", ":")))
            handle.write("\n")
    roles = Counter(row["role"] for row in rows)
    caches = Counter(row["cache"] for row in rows)
    print(f"{len(rows)} responders kept ({skipped} malformed, {dropped} dropped); "
          f"roles {dict(sorted(roles.items()))}; cache {dict(sorted(caches.items()))}")
    return 0


def _cmd_synth(args: argparse.Namespace, config: dict) -> int:
    out = _out_dir(args)
    cfg = synth.read_scenario(args.scenario)
    if args.seed is not None:
        obj = json.loads(json.dumps(synth_cfg_obj(cfg)))
        obj["seed"] = args.seed
        cfg = synth.scenario_from_obj(obj)
    records, hp_requests, truth = synth.generate_scenario(cfg)
    tr.write_trace(records, str(out / "trace.jsonl"))
    hp.write_honeypot_csv(hp_requests, str(out / "honeypot.csv"))
    synth.write_truth(truth, str(out / "ground_truth.json"))
    with open(out / "prefixes.csv", "w", encoding="utf-8") as handle:
        handle.write("prefix,asn\n")
        for prefix, asn in synth.synthetic_prefix_table(cfg):
            handle.write(f"{prefix},{asn}\n")
    print(f"{len(records)} trace records, {len(hp_requests)} honeypot requests, "
          f"{len(truth.attacks)} planted attacks")
    return 0


def synth_cfg_obj(cfg: synth.ScenarioConfig) -> dict:
    """Round-trippable plain-object form of a scenario config."""
    obj = {
        "seed": cfg.seed,
        "duration_days": cfg.duration_days,
        "start_day": cfg.start_day,
        "sampling_denominator": cfg.sampling_denominator,
        "background_clients": cfg.background_clients,
        "background_daily_rate": list(cfg.background_daily_rate),
        "background_names": cfg.background_names,
        "background_any_fraction": cfg.background_any_fraction,
        "amplifier_pool_size": cfg.amplifier_pool_size,
        "churn_retention": cfg.churn_retention,
        "sensor_count": cfg.sensor_count,
        "honeypot_requests_per_sensor": cfg.honeypot_requests_per_sensor,
        "sensor_coverage": list(cfg.sensor_coverage),
        "attacks": [],
    }
    for spec in cfg.attacks:
        obj["attacks"].append({
            "victim_ip": spec.victim_ip, "qname": spec.qname, "qps": spec.qps,
            "start_s": spec.start_s, "duration_s": spec.duration_s,
            "amplifiers_per_attack": spec.amplifiers_per_attack,
            "dns_id_mode": spec.dns_id_mode,
            "honeypot_visible": spec.honeypot_visible,
            "request_fraction": spec.request_fraction,
            "response_size": spec.response_size,
            "benign_packets_per_day": spec.benign_packets_per_day,
            "entity": spec.entity, "amplifier_mode": spec.amplifier_mode,
            "amplifier_group": spec.amplifier_group,
            "drift_per_event": spec.drift_per_event,
            "dns_id_pool": spec.dns_id_pool, "ip_ttl": spec.ip_ttl,
            "honeypot_requests_per_sensor": spec.honeypot_requests_per_sensor,
        })
    return obj


def _cmd_compare(args: argparse.Namespace, config: dict) -> int:
    out = _out_dir(args)
    preset = hp.PRESETS[args.preset] if args.preset else None
    min_requests = int(args.min_requests if args.min_requests is not None
                       else preset[0] if preset else _resolve(args, config, "min_requests"))
    max_gap = float(args.max_gap if args.max_gap is not None
                    else preset[1] if preset else _resolve(args, config, "max_gap"))
    slack = float(_resolve(args, config, "slack"))
    events = det.read_events(args.attacks)
    if any(e.intensity_decile is None for e in events):
        det.intensity_deciles(events)
    requests, _ = hp.read_honeypot_csv(args.honeypot)
    hp_events = hp.infer_honeypot_attacks(requests, min_requests=min_requests,
                                          max_gap_s=max_gap)
    hp.score_honeypot_deciles(hp_events)
    hp.write_honeypot_events(hp_events, str(out / "honeypot_events.jsonl"))
    report = hp.overlap(events, hp_events, slack_s=slack)
    obj = {
        "mutual_count": report.mutual_count,
        "trace_total": report.trace_total,
        "honeypot_total": report.honeypot_total,
        "trace_matched_fraction": report.trace_matched_fraction,
        "honeypot_matched_fraction": report.honeypot_matched_fraction,
        "pairs": [
            {
                "victim_ip": events[i].victim_ip, "day": events[i].day,
                "honeypot_start": hp_events[j].start, "honeypot_end": hp_events[j].end,
                "trace_decile": events[i].intensity_decile,
                "honeypot_decile": hp_events[j].intensity_decile,
            }
            for i, j in report.pairs
        ],
        "intensity": None,
    }
    if report.pairs:
        comparison = hp.intensity_comparison(events, hp_events, report)
        obj["intensity"] = {
            "trace_decile_counts": {str(k): v for k, v
                                    in sorted(comparison.trace_decile_counts.items())},
            "honeypot_decile_counts": {str(k): v for k, v
                                       in sorted(comparison.honeypot_decile_counts.items())},
            "trace_mean": comparison.trace_mean,
            "honeypot_mean": comparison.honeypot_mean,
        }
    with open(out / "overlap.json", "w", encoding="utf-8") as handle:
        json.dump(obj, handle, indent=2)
        handle.write("\n")
    with open(out / "convergence.csv", "w", encoding="utf-8") as handle:
        handle.write("sensors,victim_fraction\n")
        for rank, fraction in hp.convergence_curve(hp_events):
            handle.write(f"{rank},{fraction!r}\n")
    print(f"{report.mutual_count} mutual events "
          f"({report.trace_matched_fraction:.4f} of trace, "
          f"{report.honeypot_matched_fraction:.4f} of honeypot)")
    return 0


def _cmd_report(args: argparse.Namespace, config: dict) -> int:
    out = _out_dir(args)
    events = det.read_events(args.attacks)
    names = sorted(_load_names(args.names)) if args.names else sorted(
        {q for e in events for q in e.qname_counts})
    max_sizes: dict[str, int] = {}
    nscounts: list[int] = []
    if args.trace:
        records, _, _ = _prepared_records(args.trace, None)
        for record in records:
            if record.is_response:
                nscounts.append(record.nscount)
                if record.qname in set(names):
                    size = record.dns_payload_len
                    if size > max_sizes.get(record.qname, -1):
                        max_sizes[record.qname] = size

    def tld(qname: str) -> str:
        labels = tr.qname_labels(qname)
        return labels[-1] + "." if labels else "."

    per_tld_names: dict[str, set[str]] = {}
    for qname in names:
        per_tld_names.setdefault(tld(qname), set()).add(qname)
    packets_per_tld: Counter[str] = Counter()
    attacks_per_tld: Counter[str] = Counter()
    total_misused = 0
    for event in events:
        tlds = set()
        for qname, count in event.qname_counts.items():
            packets_per_tld[tld(qname)] += count
            total_misused += count
            tlds.add(tld(qname))
        for label in tlds:
            attacks_per_tld[label] += 1
    with open(out / "tld_summary.csv", "w", encoding="utf-8") as handle:
        handle.write("tld,names,packets,packet_share,attacks,max_response_size\n")
        for label in sorted(per_tld_names):
            packets = packets_per_tld.get(label, 0)
            share = packets / total_misused if total_misused else 0.0
            size = max((max_sizes.get(q, 0) for q in per_tld_names[label]), default=0)
            handle.write(f"{label},{len(per_tld_names[label])},{packets},"
                         f"{share!r},{attacks_per_tld.get(label, 0)},{size}\n")
    request_total = sum(e.request_count for e in events)
    response_total = sum(e.response_count for e in events)
    obj = {
        "events": len(events),
        "victims": len({e.victim_ip for e in events}),
        "request_count": request_total,
        "response_count": response_total,
        "request_share": request_total / (request_total + response_total)
        if request_total + response_total else 0.0,
        "ingress_concentration": fp.ingress_concentration(events),
        "nscount_le1_share": None,
        "nscount_le10_share": None,
    }
    if nscounts:
        obj["nscount_le1_share"] = sum(1 for n in nscounts if n <= 1) / len(nscounts)
        obj["nscount_le10_share"] = sum(1 for n in nscounts if n <= 10) / len(nscounts)
    with open(out / "report.json", "w", encoding="utf-8") as handle:
        json.dump(obj, handle, indent=2)
        handle.write("\n")
    print(f"report over {len(events)} events, {len(names)} names")
    return 0


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="dnsamp",
        description="DNS reflection-attack analysis over sampled traces")
    parser.add_argument("--config", help="JSON config file; flags override its keys")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("ingest", help="parse, sanitize, and annotate a trace")
    p.add_argument("--trace", required=True)
    p.add_argument("--prefix-table")
    p.add_argument("--out-dir", default=".")
    p.set_defaults(func=_cmd_ingest)

    p = sub.add_parser("select-names", help="build the misused-name consensus list")
    p.add_argument("--trace", required=True)
    p.add_argument("--honeypot")
    p.add_argument("--k-max", type=int)
    p.add_argument("--slack", type=float)
    p.add_argument("--min-requests", type=int)
    p.add_argument("--max-gap", type=float)
    p.add_argument("--previous", help="previous day's names.json for fluctuation check")
    p.add_argument("--out-dir", default=".")
    p.set_defaults(func=_cmd_select_names)

    p = sub.add_parser("detect", help="detect attack events per client-day")
    p.add_argument("--trace", required=True)
    p.add_argument("--names", required=True)
    p.add_argument("--prefix-table")
    p.add_argument("--share-threshold", type=float)
    p.add_argument("--min-packets", type=int)
    p.add_argument("--sampling", type=int)
    p.add_argument("--out-dir", default=".")
    p.set_defaults(func=_cmd_detect)

    p = sub.add_parser("fingerprint", help="classify header patterns, attribute entities")
    p.add_argument("--attacks", required=True)
    p.add_argument("--fingerprint-spec", required=True)
    p.add_argument("--names")
    p.add_argument("--min-segment", type=int)
    p.add_argument("--out-dir", default=".")
    p.set_defaults(func=_cmd_fingerprint)

    p = sub.add_parser("cluster", help="cluster events by amplifier-set distance")
    p.add_argument("--attacks", required=True)
    p.add_argument("--eps", type=float)
    p.add_argument("--min-pts", type=int)
    p.add_argument("--seen-table")
    p.add_argument("--ns-table")
    p.add_argument("--out-dir", default=".")
    p.set_defaults(func=_cmd_cluster)

    p = sub.add_parser("estimate", help="size ANY responses from record inventories")
    p.add_argument("--records", required=True)
    p.add_argument("--reference-names")
    p.add_argument("--edns", action="store_true",
                   help="assume an EDNS OPT record in the request size")
    p.add_argument("--min-days", type=int)
    p.add_argument("--min-step", type=int)
    p.add_argument("--out-dir", default=".")
    p.set_defaults(func=_cmd_estimate)

    p = sub.add_parser("snoop", help="classify cache-snooping probe responses")
    p.add_argument("--responses", required=True)
    p.add_argument("--ttl-table")
    p.add_argument("--out-dir", default=".")
    p.set_defaults(func=_cmd_snoop)

    p = sub.add_parser("synth", help="generate a synthetic scenario")
    p.add_argument("--scenario", required=True)
    p.add_argument("--seed", type=int, help="override the scenario seed")
    p.add_argument("--out-dir", default=".")
    p.set_defaults(func=_cmd_synth)

    p = sub.add_parser("compare", help="match trace events against honeypot events")
    p.add_argument("--attacks", required=True)
    p.add_argument("--honeypot", required=True)
    p.add_argument("--preset", choices=sorted(hp.PRESETS))
    p.add_argument("--min-requests", type=int)
    p.add_argument("--max-gap", type=float)
    p.add_argument("--slack", type=float)
    p.add_argument("--out-dir", default=".")
    p.set_defaults(func=_cmd_compare)

    p = sub.add_parser("report", help="aggregate tables from detected events")
    p.add_argument("--attacks", required=True)
    p.add_argument("--names")
    p.add_argument("--trace")
    p.add_argument("--out-dir", default=".")
    p.set_defaults(func=_cmd_report)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        config = _load_config(args.config)
        return args.func(args, config)
    except (OSError, ValueError, KeyError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
