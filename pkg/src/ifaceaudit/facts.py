"""Line-oriented JSON facts format for code models.

One JSON object per line. Record kinds: ``meta``, ``interface``, ``class``,
``method``, ``call``. Unknown fields are ignored; unknown kinds are errors.
Emission is sorted and byte-stable, and ``parse_facts(emit_facts(m))``
rebuilds a model equal to ``m``.
"""

from __future__ import annotations

import json
from collections.abc import Iterable, Iterator
from dataclasses import dataclass, field

from .model import (
    CallRecord,
    ClassDecl,
    CodeModel,
    InterfaceDecl,
    MethodDecl,
    MethodSignature,
    ModelError,
    TypeRef,
    build_model,
)
from .parser import ParseDiagnostic

_REQUIRED: dict[str, dict[str, tuple[type, ...]]] = {
    "meta": {"system_loc": (int,)},
    "interface": {"name": (str,), "package": (str,), "extends": (list,)},
    "class": {"name": (str,), "package": (str,), "extends": (str, type(None)), "implements": (list,)},
    "method": {
        "owner": (str,),
        "name": (str,),
        "return": (str,),
        "params": (list,),
        "public": (bool,),
        "abstract": (bool,),
        "loc": (int,),
    },
    "call": {"caller": (str,), "receiver": (str,), "method": (str,), "argc": (int,)},
}
_OPTIONAL: dict[str, dict[str, tuple[type, ...]]] = {
    "interface": {"is_test": (bool,)},
    "class": {"is_abstract": (bool,), "is_test": (bool,)},
}


class SchemaViolation(ValueError):
    def __init__(self, line: int, message: str):
        super().__init__(f"line {line}: {message}")
        self.line = line


@dataclass
class FactsResult:
    interfaces: list[InterfaceDecl]
    classes: list[ClassDecl]
    calls: list[CallRecord]
    system_loc: int
    diagnostics: list[ParseDiagnostic] = field(default_factory=list)

    def build(self) -> CodeModel:
        return build_model(self.interfaces, self.classes, self.calls, self.system_loc)


def _check(rec: dict, lineno: int) -> str:
    kind = rec.get("kind")
    if kind not in _REQUIRED:
        raise SchemaViolation(lineno, f"unknown kind {kind!r}")
    for name, types in _REQUIRED[kind].items():
        if name not in rec:
            raise SchemaViolation(lineno, f"{kind} record missing field {name!r}")
        if not _is(rec[name], types):
            raise SchemaViolation(lineno, f"{kind}.{name} has wrong type")
    for name, types in _OPTIONAL.get(kind, {}).items():
        if name in rec and not _is(rec[name], types):
            raise SchemaViolation(lineno, f"{kind}.{name} has wrong type")
    for name in ("extends", "implements", "params"):
        if isinstance(rec.get(name), list) and not all(isinstance(v, str) for v in rec[name]):
            raise SchemaViolation(lineno, f"{kind}.{name} must be a list of strings")
    return kind


def _is(value, types: tuple[type, ...]) -> bool:
    # bool is an int subclass; keep the two apart
    if isinstance(value, bool):
        return bool in types
    return isinstance(value, types)


def parse_facts(lines: Iterable[str], path: str = "<facts>") -> FactsResult:
    """Read a facts stream into build_model inputs.

    Raises:
        SchemaViolation: malformed JSON, a missing or mistyped field, an
            unknown kind, or a method whose owner is never declared.
    """
    ifaces: dict[str, dict] = {}
    classes: dict[str, dict] = {}
    methods: list[tuple[int, dict]] = []
    calls: list[CallRecord] = []
    system_loc: int | None = None
    diags: list[ParseDiagnostic] = []

    for lineno, line in enumerate(lines, start=1):
        if not line.strip():
            continue
        try:
            rec = json.loads(line)
        except json.JSONDecodeError as exc:
            raise SchemaViolation(lineno, f"invalid JSON: {exc.msg}") from None
        if not isinstance(rec, dict):
            raise SchemaViolation(lineno, "record is not an object")
        kind = _check(rec, lineno)
        known = set(_REQUIRED[kind]) | set(_OPTIONAL.get(kind, {})) | {"kind"}
        extra = sorted(set(rec) - known)
        if extra:
            diags.append(
                ParseDiagnostic(path, lineno, "warning", f"ignored unknown fields {', '.join(extra)}")
            )
        try:
            if kind == "meta":
                if system_loc is not None:
                    diags.append(ParseDiagnostic(path, lineno, "warning", "repeated meta record"))
                system_loc = rec["system_loc"]
            elif kind in ("interface", "class"):
                ref = TypeRef(rec["package"], rec["name"])
                if ref.qualified in ifaces or ref.qualified in classes:
                    raise SchemaViolation(lineno, f"type {ref.qualified} declared twice")
                (ifaces if kind == "interface" else classes)[ref.qualified] = dict(
                    rec, _ref=ref, _line=lineno
                )
            elif kind == "method":
                methods.append((lineno, rec))
            else:
                calls.append(
                    CallRecord(
                        TypeRef.parse(rec["caller"]),
                        TypeRef.parse(rec["receiver"]),
                        rec["method"],
                        rec["argc"],
                    )
                )
        except ValueError as exc:
            if isinstance(exc, SchemaViolation):
                raise
            raise SchemaViolation(lineno, str(exc)) from None

    owned: dict[str, list[MethodDecl]] = {q: [] for q in (*ifaces, *classes)}
    for lineno, rec in methods:
        owner = rec["owner"]
        if owner not in owned:
            raise SchemaViolation(lineno, f"method owner {owner!r} is not declared")
        try:
            sig = MethodSignature(rec["return"], rec["name"], tuple(rec["params"]))
            owned[owner].append(
                MethodDecl(TypeRef.parse(owner), sig, rec["loc"], rec["public"], rec["abstract"])
            )
        except ValueError as exc:
            raise SchemaViolation(lineno, str(exc)) from None

    interface_decls = []
    for q, rec in ifaces.items():
        try:
            interface_decls.append(
                InterfaceDecl(
                    rec["_ref"],
                    frozenset(TypeRef.parse(e) for e in rec["extends"]),
                    tuple(owned[q]),
                    rec.get("is_test", False),
                )
            )
        except (ValueError, ModelError) as exc:
            raise SchemaViolation(rec["_line"], str(exc)) from None
    class_decls = []
    for q, rec in classes.items():
        try:
            class_decls.append(
                ClassDecl(
                    rec["_ref"],
                    TypeRef.parse(rec["extends"]) if rec["extends"] else None,
                    frozenset(TypeRef.parse(e) for e in rec["implements"]),
                    tuple(owned[q]),
                    rec.get("is_test", False),
                    rec.get("is_abstract", False),
                )
            )
        except (ValueError, ModelError) as exc:
            raise SchemaViolation(rec["_line"], str(exc)) from None

    if system_loc is None:
        system_loc = sum(m.loc for ms in owned.values() for m in ms)
    return FactsResult(interface_decls, class_decls, calls, system_loc, diags)


_ENCODER = json.JSONEncoder(ensure_ascii=False, separators=(",", ":"))


def _dump(rec: dict) -> str:
    return _ENCODER.encode(rec)


def _method_record(m: MethodDecl) -> dict:
    return {
        "kind": "method",
        "owner": m.owner.qualified,
        "name": m.signature.name,
        "return": m.signature.return_type,
        "params": list(m.signature.param_types),
        "public": m.is_public,
        "abstract": m.is_abstract,
        "loc": m.loc,
    }


def emit_facts(model: CodeModel) -> Iterator[str]:
    """Yield one serialized record per line (no trailing newlines)."""
    yield _dump({"kind": "meta", "system_loc": model.system_loc})
    for decl in model.sorted_interfaces():
        yield _dump(
            {
                "kind": "interface",
                "name": decl.ref.simple_name,
                "package": decl.ref.package,
                "extends": sorted(r.qualified for r in decl.extends),
                "is_test": decl.is_test,
            }
        )
    for decl in model.sorted_classes():
        yield _dump(
            {
                "kind": "class",
                "name": decl.ref.simple_name,
                "package": decl.ref.package,
                "extends": decl.extends.qualified if decl.extends else None,
                "implements": sorted(r.qualified for r in decl.implements),
                "is_abstract": decl.is_abstract,
                "is_test": decl.is_test,
            }
        )
    all_methods = [m for d in model.sorted_interfaces() for m in d.methods]
    all_methods += [m for d in model.sorted_classes() for m in d.methods]
    all_methods.sort(key=lambda m: (m.owner.qualified, m.signature.text()))
    for m in all_methods:
        yield _dump(_method_record(m))
    for call in model.calls:
        yield _dump(
            {
                "kind": "call",
                "caller": call.caller.qualified,
                "receiver": call.receiver_type.qualified,
                "method": call.method_name,
                "argc": call.arg_count,
            }
        )


def dumps(model: CodeModel) -> str:
    return "".join(line + "\n" for line in emit_facts(model))


def loads(text: str) -> CodeModel:
    return parse_facts(text.splitlines()).build()
