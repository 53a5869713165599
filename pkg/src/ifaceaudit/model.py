"""Code entities and the immutable, indexed code model.

The model holds interfaces, classes, and call records, and answers the
hierarchy and call queries the detectors are defined over: sub-interface
closure, implementation closure, call reachability, clients, and the map
from interface declarations to the concrete methods overriding them.
"""

from __future__ import annotations

import re
from collections import defaultdict
from collections.abc import Iterable, Mapping
from dataclasses import dataclass, field

_IDENT = re.compile(r"^[A-Za-z_$][\w$]*$")
_SPACE_AROUND_PUNCT = re.compile(r"\s*([\[\]<>,.?&])\s*")
_RUNS = re.compile(r"\s+")
_WILDCARD_BOUND = re.compile(r"\?(extends|super)\b")


class ModelError(Exception):
    """Base class for invalid declaration sets."""


class CyclicHierarchy(ModelError):
    pass


class DuplicateTypeName(ModelError):
    pass


class DuplicateMethod(ModelError):
    pass


class InvalidHierarchy(ModelError):
    """An extends/implements edge points at the wrong kind of type."""


class UnknownType(KeyError):
    pass


def canonical_type(name: str) -> str:
    """Normalize a type name: drop whitespace around punctuation, collapse runs.

    ``"T [ ]"`` becomes ``"T[]"`` and ``"Map< K , V >"`` becomes ``"Map<K,V>"``.
    """
    name = _SPACE_AROUND_PUNCT.sub(r"\1", name.strip())
    name = _WILDCARD_BOUND.sub(r"? \1", name)
    return _RUNS.sub(" ", name)


@dataclass(frozen=True, order=True)
class TypeRef:
    package: str
    simple_name: str

    def __post_init__(self) -> None:
        if not _IDENT.match(self.simple_name):
            raise ValueError(f"invalid type name: {self.simple_name!r}")

    @property
    def qualified(self) -> str:
        return f"{self.package}.{self.simple_name}" if self.package else self.simple_name

    @classmethod
    def parse(cls, qualified: str) -> TypeRef:
        package, _, simple = qualified.strip().rpartition(".")
        return cls(package, simple)

    def __str__(self) -> str:
        return self.qualified


def as_ref(t: TypeRef | str) -> TypeRef:
    return t if isinstance(t, TypeRef) else TypeRef.parse(t)


@dataclass(frozen=True, order=True)
class MethodSignature:
    """(return type, name, parameter types); equality is componentwise."""

    return_type: str
    name: str
    param_types: tuple[str, ...] = ()

    def __post_init__(self) -> None:
        object.__setattr__(self, "return_type", canonical_type(self.return_type))
        object.__setattr__(
            self, "param_types", tuple(canonical_type(p) for p in self.param_types)
        )
        if not _IDENT.match(self.name):
            raise ValueError(f"invalid method name: {self.name!r}")

    @property
    def arity(self) -> int:
        return len(self.param_types)

    def text(self) -> str:
        """Serialized form ``return name(p1,p2)``, also used as clone key."""
        return f"{self.return_type} {self.name}({','.join(self.param_types)})"

    @classmethod
    def parse(cls, text: str) -> MethodSignature:
        m = re.match(r"^\s*(.+?)\s+([A-Za-z_$][\w$]*)\s*\((.*)\)\s*$", text)
        if not m:
            raise ValueError(f"malformed signature: {text!r}")
        params = _split_top_level(m.group(3))
        return cls(m.group(1), m.group(2), tuple(params))

    def __str__(self) -> str:
        return self.text()


def _split_top_level(s: str) -> list[str]:
    parts, depth, cur = [], 0, []
    for ch in s:
        if ch == "<":
            depth += 1
        elif ch == ">":
            depth -= 1
        if ch == "," and depth == 0:
            parts.append("".join(cur))
            cur = []
        else:
            cur.append(ch)
    if "".join(cur).strip():
        parts.append("".join(cur))
    return [p.strip() for p in parts]


@dataclass(frozen=True, order=True)
class MethodDecl:
    owner: TypeRef
    signature: MethodSignature
    loc: int = 0
    is_public: bool = True
    is_abstract: bool = True

    def __post_init__(self) -> None:
        if self.loc < 0:
            raise ValueError("loc must be >= 0")
        if self.is_abstract and self.loc != 0:
            raise ValueError(f"abstract method {self} must have loc 0")

    @property
    def name(self) -> str:
        return self.signature.name

    def __str__(self) -> str:
        return f"{self.owner.qualified}#{self.signature.text()}"


@dataclass(frozen=True)
class InterfaceDecl:
    ref: TypeRef
    extends: frozenset[TypeRef] = frozenset()
    methods: tuple[MethodDecl, ...] = ()
    is_test: bool = False

    def __post_init__(self) -> None:
        object.__setattr__(self, "extends", frozenset(self.extends))
        object.__setattr__(self, "methods", _sorted_methods(self.methods))
        for m in self.methods:
            if m.owner != self.ref:
                raise ModelError(f"{m} is not owned by {self.ref}")
            if not (m.is_abstract and m.is_public):
                raise ModelError(f"interface method {m} must be public and abstract")

    @property
    def size(self) -> int:
        return len(self.methods)


@dataclass(frozen=True)
class ClassDecl:
    ref: TypeRef
    extends: TypeRef | None = None
    implements: frozenset[TypeRef] = frozenset()
    methods: tuple[MethodDecl, ...] = ()
    is_test: bool = False
    is_abstract: bool = False

    def __post_init__(self) -> None:
        object.__setattr__(self, "implements", frozenset(self.implements))
        object.__setattr__(self, "methods", _sorted_methods(self.methods))
        for m in self.methods:
            if m.owner != self.ref:
                raise ModelError(f"{m} is not owned by {self.ref}")


def _sorted_methods(methods: Iterable[MethodDecl]) -> tuple[MethodDecl, ...]:
    ordered = tuple(sorted(methods, key=lambda m: m.signature.text()))
    for a, b in zip(ordered, ordered[1:]):
        if a.signature == b.signature:
            raise DuplicateMethod(f"{a.owner} declares {a.signature} twice")
    return ordered


@dataclass(frozen=True)
class CallRecord:
    caller: TypeRef
    receiver_type: TypeRef
    method_name: str
    arg_count: int

    def __post_init__(self) -> None:
        if self.arg_count < 0:
            raise ValueError("arg_count must be >= 0")


@dataclass(frozen=True, eq=False)
class CodeModel:
    """Immutable snapshot of declarations plus derived indexes.

    Build through :func:`build_model`. Equality compares the declaration
    fields only; indexes are pure functions of them.
    """

    interfaces: Mapping[str, InterfaceDecl]
    classes: Mapping[str, ClassDecl]
    calls: tuple[CallRecord, ...]
    system_loc: int = 0
    unused_exempt: frozenset[str] = frozenset()
    external_refs: frozenset[str] = frozenset()
    dropped_calls: int = 0

    _sub: dict[str, frozenset[str]] = field(default_factory=dict, repr=False)
    _impl: dict[str, frozenset[str]] = field(default_factory=dict, repr=False)
    _class_ifaces: dict[str, frozenset[str]] = field(default_factory=dict, repr=False)
    _ancestors: dict[str, tuple[TypeRef, ...]] = field(default_factory=dict, repr=False)
    _callers_by_target: dict[tuple[str, str, int], frozenset[str]] = field(
        default_factory=dict, repr=False
    )
    _overrides: dict[MethodDecl, frozenset[MethodDecl]] = field(
        default_factory=dict, repr=False
    )

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, CodeModel):
            return NotImplemented
        return (
            dict(self.interfaces) == dict(other.interfaces)
            and dict(self.classes) == dict(other.classes)
            and self.calls == other.calls
            and self.system_loc == other.system_loc
            and self.unused_exempt == other.unused_exempt
        )

    __hash__ = None  # type: ignore[assignment]

    @property
    def warnings(self) -> int:
        """External supertypes recorded plus unresolvable calls dropped."""
        return len(self.external_refs) + self.dropped_calls

    # -- lookups -----------------------------------------------------------

    def interface(self, i: TypeRef | str) -> InterfaceDecl:
        key = as_ref(i).qualified
        try:
            return self.interfaces[key]
        except KeyError:
            raise UnknownType(key) from None

    def klass(self, c: TypeRef | str) -> ClassDecl:
        key = as_ref(c).qualified
        try:
            return self.classes[key]
        except KeyError:
            raise UnknownType(key) from None

    def is_declared(self, t: TypeRef | str) -> bool:
        key = as_ref(t).qualified
        return key in self.interfaces or key in self.classes

    def sorted_interfaces(self) -> list[InterfaceDecl]:
        return [self.interfaces[k] for k in sorted(self.interfaces)]

    def sorted_classes(self) -> list[ClassDecl]:
        return [self.classes[k] for k in sorted(self.classes)]

    # -- hierarchy ---------------------------------------------------------

    def sub_interfaces(self, i: TypeRef | str) -> set[TypeRef]:
        """Interfaces whose extends-closure contains ``i`` (``i`` excluded)."""
        decl = self.interface(i)
        return {self.interfaces[q].ref for q in self._sub[decl.ref.qualified]}

    def implementations(self, i: TypeRef | str) -> set[TypeRef]:
        decl = self.interface(i)
        return {self.classes[q].ref for q in self._impl[decl.ref.qualified]}

    def superclass_chain(self, c: TypeRef | str) -> tuple[TypeRef, ...]:
        """Superclasses of ``c`` nearest first; may end with an external ref."""
        return self._ancestors[self.klass(c).ref.qualified]

    def interfaces_of(self, c: TypeRef | str) -> set[TypeRef]:
        """Every declared interface ``c`` implements, directly or inherited."""
        return {self.interfaces[q].ref for q in self._class_ifaces[self.klass(c).ref.qualified]}

    # -- calls -------------------------------------------------------------

    def receivable_types(self, i: TypeRef | str) -> set[str]:
        """Qualified names of receiver types through which i's methods are reached."""
        q = self.interface(i).ref.qualified
        return {q} | self._sub[q] | self._impl[q]

    def reaches(self, call: CallRecord, i: TypeRef | str, d: MethodDecl) -> bool:
        return (
            call.method_name == d.signature.name
            and call.arg_count == d.signature.arity
            and call.receiver_type.qualified in self.receivable_types(i)
        )

    def callers_reaching(self, i: TypeRef | str, d: MethodDecl) -> frozenset[str]:
        """Qualified names of classes with some call reaching (i, d)."""
        out: set[str] = set()
        name, arity = d.signature.name, d.signature.arity
        for t in self.receivable_types(i):
            out |= self._callers_by_target.get((t, name, arity), frozenset())
        return frozenset(out)

    def clients(self, i: TypeRef | str) -> set[TypeRef]:
        decl = self.interface(i)
        impl = self._impl[decl.ref.qualified]
        found: set[str] = set()
        for d in decl.methods:
            found |= self.callers_reaching(decl.ref, d)
        return {self.classes[q].ref for q in found - impl}

    def used_by(self, i: TypeRef | str, c: TypeRef | str) -> set[MethodDecl]:
        """Declarations of ``i`` reached by at least one call from class ``c``."""
        decl = self.interface(i)
        cq = as_ref(c).qualified
        return {d for d in decl.methods if cq in self.callers_reaching(decl.ref, d)}

    # -- overriding --------------------------------------------------------

    def override_map(self) -> dict[MethodDecl, frozenset[MethodDecl]]:
        return dict(self._overrides)

    def overriders(self, d: MethodDecl) -> frozenset[MethodDecl]:
        return self._overrides.get(d, frozenset())


def build_model(
    interfaces: Iterable[InterfaceDecl],
    classes: Iterable[ClassDecl],
    calls: Iterable[CallRecord] = (),
    system_loc: int = 0,
    *,
    unused_exempt: Iterable[str] = (),
) -> CodeModel:
    """Validate declarations and compute every derived index.

    Supertypes that are not declared are tolerated as external: they are
    recorded in ``external_refs`` and ignored by the closures. Calls whose
    caller is not a declared class, or whose receiver type is not declared,
    are dropped and counted in ``dropped_calls``.

    Raises:
        DuplicateTypeName: two declarations share a qualified name.
        CyclicHierarchy: an extends cycle among interfaces or among classes.
        InvalidHierarchy: e.g. a class listed under an interface's extends.
    """
    if system_loc < 0:
        raise ValueError("system_loc must be >= 0")
    ifaces: dict[str, InterfaceDecl] = {}
    klasses: dict[str, ClassDecl] = {}
    for decl in interfaces:
        q = decl.ref.qualified
        if q in ifaces:
            raise DuplicateTypeName(q)
        ifaces[q] = decl
    for decl in classes:
        q = decl.ref.qualified
        if q in ifaces or q in klasses:
            raise DuplicateTypeName(q)
        klasses[q] = decl

    external: set[str] = set()
    for decl in ifaces.values():
        for sup in decl.extends:
            if sup.qualified in klasses:
                raise InvalidHierarchy(f"interface {decl.ref} extends class {sup}")
            if sup.qualified not in ifaces:
                external.add(sup.qualified)
    for decl in klasses.values():
        if decl.extends is not None:
            if decl.extends.qualified in ifaces:
                raise InvalidHierarchy(f"class {decl.ref} extends interface {decl.extends}")
            if decl.extends.qualified not in klasses:
                external.add(decl.extends.qualified)
        for sup in decl.implements:
            if sup.qualified in klasses:
                raise InvalidHierarchy(f"class {decl.ref} implements class {sup}")
            if sup.qualified not in ifaces:
                external.add(sup.qualified)

    supers = _interface_super_closure(ifaces)
    sub: dict[str, set[str]] = {q: set() for q in ifaces}
    for q, sups in supers.items():
        for s in sups:
            sub[s].add(q)

    ancestors = _class_ancestors(klasses)
    class_ifaces: dict[str, frozenset[str]] = {}
    impl: dict[str, set[str]] = {q: set() for q in ifaces}
    for q, decl in klasses.items():
        direct: set[str] = set()
        for k in (decl.ref, *ancestors[q]):
            owner = klasses.get(k.qualified)
            if owner is None:
                continue
            direct.update(r.qualified for r in owner.implements if r.qualified in ifaces)
        closed = set(direct)
        for j in direct:
            closed |= supers[j]
        class_ifaces[q] = frozenset(closed)
        for j in closed:
            impl[j].add(q)

    kept_calls: list[CallRecord] = []
    dropped = 0
    by_target: dict[tuple[str, str, int], set[str]] = defaultdict(set)
    for call in calls:
        rq = call.receiver_type.qualified
        if call.caller.qualified not in klasses or (rq not in ifaces and rq not in klasses):
            dropped += 1
            continue
        kept_calls.append(call)
        by_target[(rq, call.method_name, call.arg_count)].add(call.caller.qualified)

    concrete_by_sig: dict[tuple[str, MethodSignature], MethodDecl] = {}
    for q, decl in klasses.items():
        for m in decl.methods:
            if m.is_public and not m.is_abstract:
                concrete_by_sig[(q, m.signature)] = m
    overrides: dict[MethodDecl, frozenset[MethodDecl]] = {}
    for q, decl in ifaces.items():
        for d in decl.methods:
            overrides[d] = frozenset(
                concrete_by_sig[(c, d.signature)]
                for c in impl[q]
                if (c, d.signature) in concrete_by_sig
            )

    return CodeModel(
        interfaces=ifaces,
        classes=klasses,
        calls=tuple(kept_calls),
        system_loc=system_loc,
        unused_exempt=frozenset(unused_exempt),
        external_refs=frozenset(external),
        dropped_calls=dropped,
        _sub={q: frozenset(s) for q, s in sub.items()},
        _impl={q: frozenset(s) for q, s in impl.items()},
        _class_ifaces=class_ifaces,
        _ancestors=ancestors,
        _callers_by_target={k: frozenset(v) for k, v in by_target.items()},
        _overrides=overrides,
    )


def rebuild(model: CodeModel, **changes) -> CodeModel:
    """Build a fresh model from ``model``'s declaration fields, with overrides."""
    args = dict(
        interfaces=list(model.interfaces.values()),
        classes=list(model.classes.values()),
        calls=list(model.calls),
        system_loc=model.system_loc,
        unused_exempt=model.unused_exempt,
    )
    args.update(changes)
    return build_model(
        args["interfaces"],
        args["classes"],
        args["calls"],
        args["system_loc"],
        unused_exempt=args["unused_exempt"],
    )


def _interface_super_closure(ifaces: Mapping[str, InterfaceDecl]) -> dict[str, frozenset[str]]:
    done: dict[str, frozenset[str]] = {}
    visiting: set[str] = set()

    def visit(q: str) -> frozenset[str]:
        if q in done:
            return done[q]
        if q in visiting:
            raise CyclicHierarchy(f"interface extends cycle through {q}")
        visiting.add(q)
        acc: set[str] = set()
        for sup in ifaces[q].extends:
            sq = sup.qualified
            if sq not in ifaces:
                continue
            acc.add(sq)
            acc |= visit(sq)
        visiting.discard(q)
        done[q] = frozenset(acc)
        return done[q]

    for q in ifaces:
        visit(q)
    return done


def _class_ancestors(klasses: Mapping[str, ClassDecl]) -> dict[str, tuple[TypeRef, ...]]:
    out: dict[str, tuple[TypeRef, ...]] = {}
    for q, decl in klasses.items():
        chain: list[TypeRef] = []
        seen = {q}
        cur = decl.extends
        while cur is not None:
            if cur.qualified in seen:
                raise CyclicHierarchy(f"class extends cycle through {q}")
            seen.add(cur.qualified)
            chain.append(cur)
            nxt = klasses.get(cur.qualified)
            cur = nxt.extends if nxt is not None else None
        out[q] = tuple(chain)
    return out
