"""Analysis pipeline and report rendering (text, CSV, machine-readable JSON)."""

from __future__ import annotations

import csv
import dataclasses
import io
import json
from collections.abc import Sequence
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

from .detect import (
    AnomalySet,
    CloneGroup,
    FilterConfig,
    apply_filters,
    detect_anomalies,
)
from .facts import SchemaViolation, parse_facts
from .metrics import (
    Correlation,
    CorrelationReport,
    InterfaceMetrics,
    SystemMetrics,
    correlate,
    interface_metrics,
    system_metrics,
)
from .model import CodeModel, MethodDecl, MethodSignature, TypeRef, build_model
from .parser import EncodingError, MalformedFile, parse_source, read_source_dir
from .suggest import REMOVE_UNUSED, RefactoringSuggestion, Savings, suggest

CSV_HEADER = ("interface", "size", "dm", "rdm", "um", "rum", "num", "iuc", "clients")
SORT_KEYS = ("rum", "rdm", "size", "dm", "um", "num", "iuc", "clients")


class InputError(Exception):
    """Unreadable or invalid analysis input."""


class InconsistentResult(AssertionError):
    pass


@dataclass(frozen=True)
class AnalysisResult:
    system: SystemMetrics
    interfaces: tuple[InterfaceMetrics, ...]
    anomalies: AnomalySet
    correlations: CorrelationReport
    suggestions: tuple[RefactoringSuggestion, ...]
    provenance: dict[str, Any] = field(default_factory=dict)


def worst_first(metrics: Sequence[InterfaceMetrics], keys: Sequence[str] = ("rum", "rdm", "size")):
    """Sort descending by ``keys``; exempt/undefined values sort last; ties by name."""

    def key(m: InterfaceMetrics):
        vals = []
        for k in keys:
            v = m.client_count if k == "clients" else getattr(m, k)
            vals.append(float("inf") if v is None else -v)
        return (*vals, m.interface.qualified)

    return sorted(metrics, key=key)


def load_model(source: str | Path | None = None, facts: str | Path | None = None):
    """Run the selected frontend; returns (model, frontend name, diagnostics, counters)."""
    if (source is None) == (facts is None):
        raise InputError("exactly one of source or facts is required")
    try:
        if source is not None:
            root = Path(source)
            if not root.is_dir():
                raise InputError(f"source directory not found: {root}")
            parsed = parse_source(read_source_dir(root))
            model = build_model(parsed.interfaces, parsed.classes, parsed.calls, parsed.system_loc)
            counters = {
                "chained_calls_skipped": parsed.chained_calls_skipped,
                "unresolved_receivers": parsed.unresolved_receivers,
            }
            return model, "source", parsed.diagnostics, counters
        path = Path(facts)
        try:
            text = path.read_text(encoding="utf-8")
        except (OSError, UnicodeDecodeError) as exc:
            raise InputError(f"cannot read facts file {path}: {exc}") from None
        result = parse_facts(text.splitlines(), str(path))
        return result.build(), "facts", result.diagnostics, {}
    except (SchemaViolation, MalformedFile, EncodingError) as exc:
        raise InputError(str(exc)) from exc


def analyze_model(
    model: CodeModel,
    config: FilterConfig | None = None,
    sort_keys: Sequence[str] = ("rum", "rdm", "size"),
    provenance: dict[str, Any] | None = None,
) -> AnalysisResult:
    config = config or FilterConfig()
    filtered = apply_filters(model, config)
    anomalies = detect_anomalies(filtered)
    per_iface = interface_metrics(filtered, anomalies)
    system = system_metrics(filtered, anomalies, per_iface)
    result = AnalysisResult(
        system=system,
        interfaces=tuple(worst_first(per_iface, sort_keys)),
        anomalies=anomalies,
        correlations=correlate(per_iface),
        suggestions=tuple(suggest(filtered, anomalies, config.treat_as_library)),
        provenance={
            **(provenance or {}),
            "filters": dataclasses.asdict(config),
            "interfaces_before_filtering": len(model.interfaces),
            "classes_before_filtering": len(model.classes),
            "interfaces_analyzed": len(filtered.interfaces),
            "classes_analyzed": len(filtered.classes),
            "model_warnings": filtered.warnings,
        },
    )
    check_consistency(result)
    return result


def run_analysis(
    source: str | Path | None = None,
    facts: str | Path | None = None,
    config: FilterConfig | None = None,
    sort_keys: Sequence[str] = ("rum", "rdm", "size"),
) -> AnalysisResult:
    """Frontend, filters, detection, metrics, suggestions; deterministic for equal input.

    Raises:
        InputError: unreadable input, malformed source, or schema violations.
        ModelError: the declarations do not form a valid model.
    """
    model, frontend, diags, counters = load_model(source, facts)
    severities = {"warning": 0, "error": 0}
    for d in diags:
        severities[d.severity] = severities.get(d.severity, 0) + 1
    provenance = {
        "frontend": frontend,
        "input": str(source if source is not None else facts),
        "diagnostics": severities,
        **counters,
    }
    return analyze_model(model, config, sort_keys, provenance)


def check_consistency(result: AnalysisResult) -> None:
    """Re-assert the cross-module invariants; raises InconsistentResult."""
    s, a = result.system, result.anomalies
    ms = result.interfaces

    def need(cond: bool, what: str) -> None:
        if not cond:
            raise InconsistentResult(what)

    need(s.total_interface_methods == sum(m.size for m in ms), "total interface methods")
    need(s.sdm == sum(m.dm for m in ms), "sdm = sum dm")
    need(s.sdm == sum(len(g.members) for g in a.clone_groups), "sdm = clone group members")
    need(s.distinct_dup_signatures == len(a.clone_groups), "|dS|")
    need(s.reim == s.sdm - s.distinct_dup_signatures >= 0, "reim")
    need(s.sum == sum(len(v) for v in a.unused.values()), "sum = sum um")
    need(s.snum == sum(len(v) for v in a.never_used.values()), "snum = sum num")
    need(s.snum <= s.sum <= s.total_interface_methods, "snum <= sum <= total")
    need(0 <= s.rsnum <= s.rsum <= 1 and 0 <= s.rreim <= s.rsdm <= 1, "ratio ordering")
    for q, u in a.unused.items():
        need(a.never_used[q] <= u, f"never_used subset of unused for {q}")
        need(a.internal_only[q] == u - a.never_used[q], f"internal_only for {q}")
    for m in ms:
        need(m.dm <= m.size, f"dm <= size for {m.interface}")
        if m.um is not None:
            need(m.num <= m.um <= m.size, f"num <= um <= size for {m.interface}")
        need((m.iuc is None) == (m.client_count == 0), f"iuc defined iff clients for {m.interface}")
    loc = sum(x.savings.loc for x in result.suggestions if x.kind == REMOVE_UNUSED)
    need(loc == s.nulc, "never-used suggestion loc = nulc")


# -- machine-readable ------------------------------------------------------------


def _decl_dict(d: MethodDecl) -> dict:
    return {
        "owner": d.owner.qualified,
        "signature": d.signature.text(),
        "loc": d.loc,
        "public": d.is_public,
        "abstract": d.is_abstract,
    }


def _decl_from(d: dict) -> MethodDecl:
    return MethodDecl(
        TypeRef.parse(d["owner"]),
        MethodSignature.parse(d["signature"]),
        d["loc"],
        d["public"],
        d["abstract"],
    )


def _sorted_decls(ds) -> list[dict]:
    return [_decl_dict(d) for d in sorted(ds, key=lambda d: d.signature.text())]


def _target_dict(t) -> dict:
    if isinstance(t, TypeRef):
        return {"type": t.qualified}
    return {"method": _decl_dict(t)}


def result_to_dict(result: AnalysisResult) -> dict:
    a = result.anomalies
    return {
        "system": dataclasses.asdict(result.system),
        "interfaces": [
            {**dataclasses.asdict(m), "interface": m.interface.qualified} for m in result.interfaces
        ],
        "anomalies": {
            "clone_groups": [
                {
                    "signature": g.signature.text(),
                    "hierarchy_related": g.hierarchy_related,
                    "members": [{"interface": r.qualified, "method": _decl_dict(d)} for r, d in g.members],
                }
                for g in a.clone_groups
            ],
            "duplicate_interface_pairs": [[x.qualified, y.qualified] for x, y in a.duplicate_interface_pairs],
            "unused": {q: _sorted_decls(v) for q, v in sorted(a.unused.items())},
            "never_used": {q: _sorted_decls(v) for q, v in sorted(a.never_used.items())},
            "internal_only": {q: _sorted_decls(v) for q, v in sorted(a.internal_only.items())},
        },
        "correlations": [dataclasses.asdict(c) for c in result.correlations.entries],
        "suggestions": [
            {
                "kind": s.kind,
                "targets": [_target_dict(t) for t in s.targets],
                "estimated_savings": dataclasses.asdict(s.savings),
                "narrative": s.narrative,
                "signatures": [sig.text() for sig in s.signatures],
                "creates": s.creates,
            }
            for s in result.suggestions
        ],
        "provenance": result.provenance,
    }


def result_from_dict(data: dict) -> AnalysisResult:
    sysd = dict(data["system"])
    sysd["notes"] = tuple(sysd.get("notes", ()))
    an = data["anomalies"]

    def decl_map(m: dict) -> dict[str, frozenset[MethodDecl]]:
        return {q: frozenset(_decl_from(d) for d in ds) for q, ds in m.items()}

    anomalies = AnomalySet(
        clone_groups=tuple(
            CloneGroup(
                MethodSignature.parse(g["signature"]),
                tuple((TypeRef.parse(m["interface"]), _decl_from(m["method"])) for m in g["members"]),
                g["hierarchy_related"],
            )
            for g in an["clone_groups"]
        ),
        duplicate_interface_pairs=tuple(
            (TypeRef.parse(x), TypeRef.parse(y)) for x, y in an["duplicate_interface_pairs"]
        ),
        unused=decl_map(an["unused"]),
        never_used=decl_map(an["never_used"]),
        internal_only=decl_map(an["internal_only"]),
    )
    return AnalysisResult(
        system=SystemMetrics(**sysd),
        interfaces=tuple(
            InterfaceMetrics(**{**m, "interface": TypeRef.parse(m["interface"])})
            for m in data["interfaces"]
        ),
        anomalies=anomalies,
        correlations=CorrelationReport(tuple(Correlation(**c) for c in data["correlations"])),
        suggestions=tuple(
            RefactoringSuggestion(
                kind=s["kind"],
                targets=tuple(
                    TypeRef.parse(t["type"]) if "type" in t else _decl_from(t["method"])
                    for t in s["targets"]
                ),
                savings=Savings(**s["estimated_savings"]),
                narrative=s["narrative"],
                signatures=tuple(MethodSignature.parse(x) for x in s["signatures"]),
                creates=s["creates"],
            )
            for s in data["suggestions"]
        ),
        provenance=data["provenance"],
    )


# -- rendering ------------------------------------------------------------------------


def _num(x: float | None) -> str:
    if x is None:
        return "NA"
    if isinstance(x, int):
        return str(x)
    return f"{x:.6f}".rstrip("0").rstrip(".") or "0"


def _pct(x: float) -> str:
    return f"{100 * x:.1f}%"


def render(result: AnalysisResult, fmt: str = "text", correlation: str = "both", top: int = 20) -> str:
    if fmt == "machine":
        return json.dumps(result_to_dict(result), indent=2, ensure_ascii=False) + "\n"
    if fmt == "csv":
        return _render_csv(result, correlation)
    if fmt == "text":
        return _render_text(result, correlation, top)
    raise ValueError(f"unknown format {fmt!r}")


def _methods_for(correlation: str) -> list[str]:
    return ["pearson", "spearman"] if correlation == "both" else [correlation]


def _render_csv(result: AnalysisResult, correlation: str) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_HEADER)
    for m in result.interfaces:
        w.writerow(
            [m.interface.qualified, m.size, m.dm, _num(m.rdm), _num(m.um), _num(m.rum),
             _num(m.num), _num(m.iuc), m.client_count]
        )
    s = result.system
    w.writerow(
        ["__system__", s.total_interface_methods, s.sdm, _num(s.rsdm), s.sum, _num(s.rsum),
         s.snum, "NA", "NA"]
    )
    # correlation rows: dm/rdm/um/rum columns hold coefficients against IUC,
    # size holds the DM/RDM sample size and num the UM/RUM sample size
    c = result.correlations
    for method in _methods_for(correlation):
        w.writerow(
            [f"__{method}__", c.get("dm").n,
             _num(getattr(c.get("dm"), method)), _num(getattr(c.get("rdm"), method)),
             _num(getattr(c.get("um"), method)), _num(getattr(c.get("rum"), method)),
             c.get("um").n, "NA", "NA"]
        )
    return buf.getvalue()


def _render_text(result: AnalysisResult, correlation: str, top: int) -> str:
    s, a = result.system, result.anomalies
    library = result.provenance.get("filters", {}).get("treat_as_library", False)
    lines = []
    out = lines.append
    out("Interface design anomalies")
    out("==========================")
    prov = result.provenance
    if "frontend" in prov:
        out(f"input: {prov['input']} ({prov['frontend']})")
    out(
        f"interfaces analyzed: {len(result.interfaces)}   interface methods: "
        f"{s.total_interface_methods}   system LOC: {s.system_loc}"
    )
    out("")
    out("System")
    out("------")
    out(f"  duplicate methods   SDM  {s.sdm:>6}   RSDM  {_pct(s.rsdm):>7}")
    out(f"  unused methods      SUM  {s.sum:>6}   RSUM  {_pct(s.rsum):>7}")
    out(f"  never used          SNUM {s.snum:>6}   RSNUM {_pct(s.rsnum):>7}")
    out(f"  redundancy          ReIM {s.reim:>6}   RReIM {_pct(s.rreim):>7}   (|dS| = {s.distinct_dup_signatures})")
    out(f"  never-used LOC      NULC {s.nulc:>6}   RNULC {_pct(s.rnulc):>7}")
    out(
        f"  shared implementations {s.shared_impl_count} "
        f"({_pct(s.shared_impl_ratio)} of implementations of duplicate methods)"
    )
    for note in s.notes:
        out(f"  * {note}")
    out("")
    shown = list(result.interfaces[:top])
    out(f"Interfaces (worst first, top {len(shown)} of {len(result.interfaces)})")
    out("-" * 40)
    if shown:
        width = max(len("interface"), *(len(m.interface.qualified) for m in shown))
        out(f"  {'interface':<{width}}  {'size':>5} {'DM':>4} {'RDM':>6} {'UM':>4} {'RUM':>6} {'NUM':>4} {'IUC':>6} {'clients':>7}")
        for m in shown:
            out(
                f"  {m.interface.qualified:<{width}}  {m.size:>5} {m.dm:>4} {_num(m.rdm):>6} "
                f"{_num(m.um):>4} {_num(m.rum):>6} {_num(m.num):>4} {_num(m.iuc):>6} {m.client_count:>7}"
            )
    out("")
    out("Correlation with IUC")
    out("--------------------")
    methods = _methods_for(correlation)
    out("  metric    n  " + "  ".join(f"{k:>9}" for k in methods))
    for e in result.correlations.entries:
        out(f"  {e.x.upper():<5} {e.n:>4}  " + "  ".join(f"{_num(getattr(e, k)):>9}" for k in methods))
    out("")
    out(f"Clone groups: {len(a.clone_groups)}")
    for g in a.clone_groups:
        tag = " [hierarchy]" if g.hierarchy_related else ""
        out(f"  {g.signature.text()}{tag}: {', '.join(r.qualified for r in g.interfaces)}")
    if a.duplicate_interface_pairs:
        out("Duplicate interfaces (i is duplicated by i_x):")
        for x, y in a.duplicate_interface_pairs:
            out(f"  {x.qualified} -> {y.qualified}")
    flagged = [q for q, u in sorted(a.unused.items()) if u]
    heading = "Unused methods (review: possible external API)" if library else "Unused methods"
    out(f"{heading}: {sum(len(a.unused[q]) for q in flagged)} in {len(flagged)} interfaces")
    for q in flagged:
        for d in sorted(a.unused[q], key=lambda d: d.signature.text()):
            status = "never used" if d in a.never_used[q] else "internal only"
            out(f"  {q}#{d.signature.text()}  ({status})")
    out("")
    out(f"Suggestions: {len(result.suggestions)}")
    for k, sg in enumerate(result.suggestions, 1):
        sv = sg.savings
        out(f"  {k}. [{sg.kind}] {sg.narrative}")
        if sv.declarations or sv.implementations or sv.loc:
            out(
                f"     saves {sv.declarations} declaration(s), {sv.implementations} "
                f"implementation(s), {sv.loc} line(s)"
            )
    return "\n".join(lines) + "\n"

