"""Refactoring suggestions for duplicate and unused interface methods.

Suggestions are advisory: structured targets plus a one-sentence rationale.
:func:`apply_suggestions` replays them on an in-memory copy of a model so
their end state can be checked; no source is ever rewritten.

Duplication is resolved in three passes over a planned hierarchy:

1. interfaces with identical method sets collapse into one keeper;
2. an interface whose whole method set is contained in another becomes its
   super-interface, and the re-declarations in the sub-interface go away;
3. signatures still declared by several unrelated interfaces move to a new
   shared super-interface.

After these passes every duplicated signature is declared exactly once.
"""

from __future__ import annotations

import dataclasses
from collections.abc import Iterable
from dataclasses import dataclass

from .detect import AnomalySet
from .metrics import never_used_implementations
from .model import (
    CodeModel,
    InterfaceDecl,
    MethodDecl,
    MethodSignature,
    TypeRef,
    build_model,
)

MERGE = "merge-duplicate-interface"
EXTRACT = "extract-shared-super-interface"
REDECLARATION = "remove-redeclaration-in-subinterface"
REMOVE_UNUSED = "remove-unused-declaration"
DEMOTE = "demote-internal-only-method"
KINDS = (MERGE, EXTRACT, REDECLARATION, REMOVE_UNUSED, DEMOTE)


@dataclass(frozen=True)
class Savings:
    declarations: int = 0
    implementations: int = 0
    loc: int = 0


@dataclass(frozen=True)
class RefactoringSuggestion:
    """One advisory refactoring.

    ``targets`` by kind:

    * merge: ``(removed interface, kept interface)``
    * extract: ``(super-interface, *sub-interfaces)``; ``signatures`` lists what
      the super-interface declares when ``creates`` is set
    * remove-redeclaration: ``(sub-interface, *declarations to drop)``
    * remove-unused: ``(interface, declaration, *removable implementations)``
    * demote: ``(interface, declaration)``
    """

    kind: str
    targets: tuple[TypeRef | MethodDecl, ...]
    savings: Savings
    narrative: str
    signatures: tuple[MethodSignature, ...] = ()
    creates: bool = False

    def __post_init__(self) -> None:
        if self.kind not in KINDS:
            raise ValueError(f"unknown suggestion kind {self.kind!r}")


def _q(ref: TypeRef) -> str:
    return ref.qualified


class _Plan:
    """Mutable planned hierarchy: signature sets and extends edges."""

    def __init__(self, model: CodeModel):
        self.model = model
        self.alive = set(model.interfaces)
        self.sigs = {q: {d.signature for d in i.methods} for q, i in model.interfaces.items()}
        self.extends = {
            q: {_q(r) for r in i.extends if _q(r) in model.interfaces}
            for q, i in model.interfaces.items()
        }

    def supers(self, q: str) -> set[str]:
        out: set[str] = set()
        stack = [q]
        while stack:
            for s in self.extends.get(stack.pop(), ()):
                if s not in out:
                    out.add(s)
                    stack.append(s)
        return out


def suggest_duplication(model: CodeModel, anomalies: AnomalySet) -> list[RefactoringSuggestion]:
    plan = _Plan(model)
    out: list[RefactoringSuggestion] = []
    ref = {q: i.ref for q, i in model.interfaces.items()}

    # 1. identical interfaces
    parent: dict[str, str] = {}

    def find(q: str) -> str:
        while parent.get(q, q) != q:
            q = parent[q]
        return q

    for a, b in anomalies.mutual_pairs:
        ra, rb = find(_q(a)), find(_q(b))
        if ra != rb:
            parent[max(ra, rb)] = min(ra, rb)
    classes: dict[str, list[str]] = {}
    for q in sorted(parent.keys() | set(parent.values())):
        classes.setdefault(find(q), []).append(q)

    def rank(q: str):
        return (-len(model.implementations(q)), -len(model.clients(q)), q)

    for members in sorted(classes.values()):
        keeper = min(members, key=rank)
        for gone in sorted(m for m in members if m != keeper):
            out.append(
                RefactoringSuggestion(
                    MERGE,
                    (ref[gone], ref[keeper]),
                    Savings(declarations=len(plan.sigs[gone])),
                    f"{gone} declares exactly the methods of {keeper}; remove it and move its "
                    f"implementors and clients to {keeper}.",
                )
            )
            plan.alive.discard(gone)
            for q in plan.alive:
                if gone in plan.extends[q]:
                    plan.extends[q].discard(gone)
                    if q != keeper:
                        plan.extends[q].add(keeper)
            keeper_subs = {q for q in plan.alive if keeper in plan.supers(q)}
            plan.extends[keeper] |= {
                s for s in plan.extends[gone] if s != keeper and s not in keeper_subs
            }

    # 2. interfaces wholly contained in another become its super-interface
    dup_sigs = {g.signature for g in anomalies.clone_groups}
    new_edges: dict[str, list[str]] = {}
    for x in sorted(plan.alive):
        cands = [
            h
            for h in plan.alive
            if h != x and plan.sigs[h] and plan.sigs[h] < plan.sigs[x]
        ]
        maximal = [h for h in cands if not any(plan.sigs[h] < plan.sigs[o] for o in cands)]
        for h in sorted(maximal):
            sup_x = plan.supers(x)
            if h in sup_x or x in plan.supers(h):
                continue
            plan.extends[x].add(h)
            new_edges.setdefault(h, []).append(x)
    for h in sorted(new_edges):
        subs = new_edges[h]
        out.append(
            RefactoringSuggestion(
                EXTRACT,
                (ref[h], *(ref[s] for s in subs)),
                Savings(),
                f"{', '.join(subs)} re-declare{'s' if len(subs) == 1 else ''} every method of {h}; "
                f"make {'it' if len(subs) == 1 else 'them'} extend {h}.",
            )
        )

    # 3. redeclarations of inherited signatures
    def drop_redeclarations() -> None:
        inherited = {
            x: set().union(*(plan.sigs[s] for s in plan.supers(x) if s in plan.alive))
            for x in plan.alive
        }
        for x in sorted(plan.alive):
            again = sorted(plan.sigs[x] & inherited[x] & dup_sigs, key=MethodSignature.text)
            if not again:
                continue
            decls = [_decl(model, x, s) for s in again]
            out.append(
                RefactoringSuggestion(
                    REDECLARATION,
                    (ref[x], *decls),
                    Savings(declarations=len(decls)),
                    f"{x} re-declares {len(decls)} inherited method"
                    f"{'s' if len(decls) != 1 else ''}; declare them only in the super-interface.",
                )
            )
            plan.sigs[x] -= set(again)

    drop_redeclarations()

    # 4. leftovers shared by unrelated interfaces get a new super-interface
    declarers: dict[MethodSignature, frozenset[str]] = {}
    for s in dup_sigs:
        holders = frozenset(x for x in plan.alive if s in plan.sigs[x])
        if len(holders) >= 2:
            declarers[s] = holders
    groups: dict[frozenset[str], list[MethodSignature]] = {}
    for s, holders in declarers.items():
        groups.setdefault(holders, []).append(s)
    taken = set(model.interfaces) | set(model.classes)
    for holders in sorted(groups, key=sorted):
        sigs = tuple(sorted(groups[holders], key=MethodSignature.text))
        members = sorted(holders)
        first = ref[members[0]]
        name = _fresh_name(first.package, f"Shared{first.simple_name}", taken)
        new = TypeRef(first.package, name)
        taken.add(new.qualified)
        ref[new.qualified] = new
        out.append(
            RefactoringSuggestion(
                EXTRACT,
                (new, *(ref[m] for m in members)),
                Savings(),
                f"{len(sigs)} method{'s' if len(sigs) != 1 else ''} declared alike in "
                f"{', '.join(members)}; extract them into a new super-interface {new.qualified}.",
                signatures=sigs,
                creates=True,
            )
        )
        plan.alive.add(new.qualified)
        plan.sigs[new.qualified] = set(sigs)
        plan.extends[new.qualified] = set()
        for m in members:
            plan.extends[m].add(new.qualified)
    drop_redeclarations()
    return out


def _fresh_name(package: str, base: str, taken: set[str]) -> str:
    name, k = base, 2
    while (f"{package}.{name}" if package else name) in taken:
        name, k = f"{base}{k}", k + 1
    return name


def _decl(model: CodeModel, q: str, sig: MethodSignature) -> MethodDecl:
    for d in model.interfaces[q].methods:
        if d.signature == sig:
            return d
    raise KeyError((q, sig))


def suggest_unused(
    model: CodeModel, anomalies: AnomalySet, library_mode: bool = False
) -> list[RefactoringSuggestion]:
    impls = never_used_implementations(model, anomalies)
    claimed: set[MethodDecl] = set()
    out = []
    for q in sorted(anomalies.never_used):
        i = model.interfaces[q]
        for d in sorted(anomalies.never_used[q], key=lambda d: d.signature.text()):
            # re-verify against the model itself, not the cached anomaly set
            if any(model.reaches(c, i.ref, d) for c in model.calls):
                continue
            removable = sorted(
                (m for m, ds in impls.items() if d in ds and m not in claimed),
                key=lambda m: (m.owner.qualified, m.signature.text()),
            )
            claimed.update(removable)
            loc = sum(m.loc for m in removable)
            if library_mode:
                text = (
                    f"review: {d.signature.text()} in {q} is never called in this code base; "
                    f"possible external API."
                )
            else:
                text = (
                    f"{d.signature.text()} in {q} is never called; remove the declaration and "
                    f"its {len(removable)} implementation{'s' if len(removable) != 1 else ''} "
                    f"({loc} lines)."
                )
            out.append(
                RefactoringSuggestion(
                    REMOVE_UNUSED,
                    (i.ref, d, *removable),
                    Savings(1, len(removable), loc),
                    text,
                )
            )
    for q in sorted(anomalies.internal_only):
        i = model.interfaces[q]
        for d in sorted(anomalies.internal_only[q], key=lambda d: d.signature.text()):
            prefix = "review: " if library_mode else ""
            out.append(
                RefactoringSuggestion(
                    DEMOTE,
                    (i.ref, d),
                    Savings(declarations=1),
                    f"{prefix}{d.signature.text()} in {q} is only called inside its implementing "
                    f"classes; make it an internal method instead of an interface method.",
                )
            )
    return out


def suggest(
    model: CodeModel, anomalies: AnomalySet, library_mode: bool = False
) -> list[RefactoringSuggestion]:
    return suggest_duplication(model, anomalies) + suggest_unused(model, anomalies, library_mode)


def apply_suggestions(
    model: CodeModel, suggestions: Iterable[RefactoringSuggestion]
) -> CodeModel:
    """Replay suggestions on a copy of ``model`` and return the rebuilt model.

    Unused-method suggestions on an interface that an earlier merge removed are
    skipped: the declaration left with its interface, and the implementing classes
    now answer to the kept interface instead.
    """
    ifaces = {q: i for q, i in model.interfaces.items()}
    classes = {q: c for q, c in model.classes.items()}
    calls = list(model.calls)

    def drop_methods(decl, gone: set[MethodSignature]):
        return dataclasses.replace(
            decl, methods=tuple(m for m in decl.methods if m.signature not in gone)
        )

    for s in suggestions:
        if s.kind == MERGE:
            gone, keeper = (_q(t) for t in s.targets[:2])
            gone_ref, keeper_ref = s.targets[0], s.targets[1]
            removed = ifaces.pop(gone)
            kept = ifaces[keeper]
            sub_of_keeper = {
                q for q in ifaces if keeper in _supers(ifaces, q)
            }
            extra = {r for r in removed.extends if _q(r) != keeper and _q(r) not in sub_of_keeper}
            ifaces[keeper] = dataclasses.replace(kept, extends=kept.extends | extra)
            for q, i in list(ifaces.items()):
                if gone_ref in i.extends:
                    new = (i.extends - {gone_ref}) | ({keeper_ref} if q != keeper else set())
                    ifaces[q] = dataclasses.replace(i, extends=new)
            for q, c in list(classes.items()):
                if gone_ref in c.implements:
                    classes[q] = dataclasses.replace(
                        c, implements=(c.implements - {gone_ref}) | {keeper_ref}
                    )
            calls = [
                dataclasses.replace(c, receiver_type=keeper_ref) if c.receiver_type == gone_ref else c
                for c in calls
            ]
        elif s.kind == EXTRACT:
            sup = s.targets[0]
            if s.creates:
                ifaces[_q(sup)] = InterfaceDecl(
                    sup, methods=tuple(MethodDecl(sup, sig) for sig in s.signatures)
                )
            for sub in s.targets[1:]:
                i = ifaces[_q(sub)]
                ifaces[_q(sub)] = dataclasses.replace(i, extends=i.extends | {sup})
        elif s.kind == REDECLARATION:
            x = _q(s.targets[0])
            ifaces[x] = drop_methods(ifaces[x], {d.signature for d in s.targets[1:]})
        elif s.kind in (REMOVE_UNUSED, DEMOTE):
            q, d = _q(s.targets[0]), s.targets[1]
            if q not in ifaces:
                continue
            ifaces[q] = drop_methods(ifaces[q], {d.signature})
            for m in s.targets[2:]:
                c = classes[_q(m.owner)]
                classes[_q(m.owner)] = drop_methods(c, {m.signature})
    return build_model(
        ifaces.values(), classes.values(), calls, model.system_loc
    )


def _supers(ifaces: dict[str, InterfaceDecl], q: str) -> set[str]:
    out: set[str] = set()
    stack = [q]
    while stack:
        i = ifaces.get(stack.pop())
        if i is None:
            continue
        for r in i.extends:
            if _q(r) not in out:
                out.add(_q(r))
                stack.append(_q(r))
    return out
