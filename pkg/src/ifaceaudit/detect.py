"""Anomaly detectors: duplicate interface methods and unused interface methods."""

from __future__ import annotations

import dataclasses
from collections import defaultdict
from dataclasses import dataclass, field

from .model import (
    CallRecord,
    ClassDecl,
    CodeModel,
    MethodDecl,
    MethodSignature,
    TypeRef,
    build_model,
)
from .parser import classify_test


@dataclass(frozen=True)
class FilterConfig:
    exclude_tests: bool = True
    exclude_markers: bool = True
    min_implementations: int = 1  # gates the unused analysis only
    treat_as_library: bool = False  # reporting hint, never changes numbers

    def __post_init__(self) -> None:
        if self.min_implementations < 0:
            raise ValueError("min_implementations must be >= 0")

    @classmethod
    def all_off(cls) -> FilterConfig:
        return cls(exclude_tests=False, exclude_markers=False, min_implementations=0)


@dataclass(frozen=True)
class CloneGroup:
    signature: MethodSignature
    members: tuple[tuple[TypeRef, MethodDecl], ...]
    hierarchy_related: bool = False

    @property
    def interfaces(self) -> tuple[TypeRef, ...]:
        return tuple(ref for ref, _ in self.members)

    def __len__(self) -> int:
        return len(self.members)


@dataclass(frozen=True)
class AnomalySet:
    """Detector output. Unused maps are keyed by qualified interface name and
    only contain interfaces that were eligible for the unused analysis."""

    clone_groups: tuple[CloneGroup, ...] = ()
    duplicate_interface_pairs: tuple[tuple[TypeRef, TypeRef], ...] = ()
    unused: dict[str, frozenset[MethodDecl]] = field(default_factory=dict)
    never_used: dict[str, frozenset[MethodDecl]] = field(default_factory=dict)
    internal_only: dict[str, frozenset[MethodDecl]] = field(default_factory=dict)

    @property
    def duplicated_declarations(self) -> frozenset[MethodDecl]:
        return frozenset(d for g in self.clone_groups for _, d in g.members)

    @property
    def mutual_pairs(self) -> list[tuple[TypeRef, TypeRef]]:
        pairs = set(self.duplicate_interface_pairs)
        return [(a, b) for a, b in self.duplicate_interface_pairs if (b, a) in pairs]


# -- filtering ---------------------------------------------------------------


def apply_filters(model: CodeModel, config: FilterConfig) -> CodeModel:
    """Return a model with excluded types removed and unused-exempt interfaces marked.

    Removed types are spliced out of the hierarchy: a retained type that
    extended or implemented a removed one inherits the removed type's own
    supertypes, and calls through a removed receiver type are retargeted
    to its retained supertypes. Calls made by removed classes are dropped.
    """
    removed_i: set[str] = set()
    removed_c: set[str] = set()
    if config.exclude_tests:
        removed_c = {q for q, c in model.classes.items() if c.is_test or classify_test(c, model)}
        removed_i = {q for q, i in model.interfaces.items() if i.is_test or classify_test(i, model)}
    if config.exclude_markers:
        removed_i |= {q for q, i in model.interfaces.items() if i.size == 0}

    if removed_i or removed_c:
        model = _without(model, removed_i, removed_c)
    exempt = frozenset(
        q for q in model.interfaces if len(model.implementations(q)) < config.min_implementations
    )
    if exempt != model.unused_exempt:
        model = dataclasses.replace(model, unused_exempt=exempt)
    return model


def _without(model: CodeModel, removed_i: set[str], removed_c: set[str]) -> CodeModel:
    iface_memo: dict[str, frozenset[TypeRef]] = {}

    def lift_iface(ref: TypeRef) -> frozenset[TypeRef]:
        # retained (or external) interfaces standing in for ``ref``
        q = ref.qualified
        if q not in removed_i:
            return frozenset({ref})
        if q not in iface_memo:
            out: set[TypeRef] = set()
            for sup in model.interfaces[q].extends:
                out |= lift_iface(sup)
            iface_memo[q] = frozenset(out)
        return iface_memo[q]

    def lift_ifaces(refs) -> frozenset[TypeRef]:
        out: set[TypeRef] = set()
        for r in refs:
            out |= lift_iface(r)
        return frozenset(out)

    def lift_class(ref: TypeRef | None) -> tuple[TypeRef | None, frozenset[TypeRef]]:
        # (nearest retained ancestor, interfaces picked up from removed ones)
        extra: set[TypeRef] = set()
        while ref is not None and ref.qualified in removed_c:
            decl = model.classes[ref.qualified]
            extra |= lift_ifaces(decl.implements)
            ref = decl.extends
        return ref, frozenset(extra)

    interfaces = [
        dataclasses.replace(decl, extends=lift_ifaces(decl.extends))
        for q, decl in model.interfaces.items()
        if q not in removed_i
    ]
    classes: list[ClassDecl] = []
    for q, decl in model.classes.items():
        if q in removed_c:
            continue
        parent, extra = lift_class(decl.extends)
        classes.append(
            dataclasses.replace(
                decl, extends=parent, implements=lift_ifaces(decl.implements) | extra
            )
        )

    calls: list[CallRecord] = []
    for call in model.calls:
        if call.caller.qualified in removed_c:
            continue
        rq = call.receiver_type.qualified
        if rq in removed_i:
            targets = sorted(lift_iface(call.receiver_type))
        elif rq in removed_c:
            parent, extra = lift_class(call.receiver_type)
            targets = sorted(extra | ({parent} if parent is not None else set()))
        else:
            calls.append(call)
            continue
        calls.extend(dataclasses.replace(call, receiver_type=t) for t in targets)
    return build_model(interfaces, classes, calls, model.system_loc)


# -- duplication -------------------------------------------------------------


def find_clone_groups(model: CodeModel) -> list[CloneGroup]:
    """Group interface declarations by signature; keep signatures declared in 2+ interfaces."""
    by_sig: dict[MethodSignature, list[tuple[TypeRef, MethodDecl]]] = defaultdict(list)
    for decl in model.sorted_interfaces():
        for d in decl.methods:
            by_sig[d.signature].append((decl.ref, d))
    groups = []
    for sig in sorted(by_sig, key=MethodSignature.text):
        members = by_sig[sig]
        if len(members) < 2:
            continue
        refs = {r for r, _ in members}
        related = any(model.sub_interfaces(r) & refs for r in refs)
        groups.append(CloneGroup(sig, tuple(members), related))
    return groups


def find_duplicate_interfaces(
    model: CodeModel, groups: list[CloneGroup]
) -> list[tuple[TypeRef, TypeRef]]:
    """Ordered pairs (i, i_x) where every method of i is re-declared in i_x."""
    declarers: dict[MethodSignature, set[TypeRef]] = {
        g.signature: set(g.interfaces) for g in groups
    }
    pairs = []
    for decl in model.sorted_interfaces():
        if decl.size == 0:
            continue
        common: set[TypeRef] | None = None
        for d in decl.methods:
            others = declarers.get(d.signature, set()) - {decl.ref}
            common = others if common is None else common & others
            if not common:
                break
        for other in sorted(common or (), key=lambda r: r.qualified):
            pairs.append((decl.ref, other))
    return pairs


# -- unused ------------------------------------------------------------------


def find_unused(
    model: CodeModel,
) -> tuple[dict[str, frozenset[MethodDecl]], dict[str, frozenset[MethodDecl]]]:
    """Per eligible interface: (declarations no client reaches, declarations nothing reaches)."""
    unused: dict[str, frozenset[MethodDecl]] = {}
    never: dict[str, frozenset[MethodDecl]] = {}
    for decl in model.sorted_interfaces():
        q = decl.ref.qualified
        if q in model.unused_exempt:
            continue
        impl = {r.qualified for r in model.implementations(q)}
        u, n = set(), set()
        for d in decl.methods:
            callers = model.callers_reaching(q, d)
            if not callers:
                n.add(d)
                u.add(d)
            elif callers <= impl:
                u.add(d)
        unused[q] = frozenset(u)
        never[q] = frozenset(n)
    return unused, never


def detect_anomalies(model: CodeModel) -> AnomalySet:
    groups = find_clone_groups(model)
    pairs = find_duplicate_interfaces(model, groups)
    unused, never = find_unused(model)
    internal = {q: unused[q] - never[q] for q in unused}
    return AnomalySet(tuple(groups), tuple(pairs), unused, never, internal)

