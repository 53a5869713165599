"""Lightweight frontend for a curly-brace OO subset (Java-like sources).

Only what the detectors need is extracted: type declarations with their
supertypes, method signatures with physical line spans, field and local
variable types, and message sends inside bodies. Everything else in a
body is skipped opaquely. Recoverable problems become diagnostics; only
unbalanced top-level braces abort a file.
"""

from __future__ import annotations

import dataclasses
import re
from collections.abc import Iterable, Sequence
from dataclasses import dataclass, field
from pathlib import Path

from .model import (
    CallRecord,
    ClassDecl,
    CodeModel,
    InterfaceDecl,
    MethodDecl,
    MethodSignature,
    TypeRef,
    build_model,
)


class MalformedFile(ValueError):
    def __init__(self, path: str, line: int, message: str):
        super().__init__(f"{path}:{line}: {message}")
        self.path, self.line = path, line


class EncodingError(ValueError):
    pass


@dataclass(frozen=True, order=True)
class ParseDiagnostic:
    path: str
    line: int
    severity: str  # "warning" | "error"
    message: str

    def __str__(self) -> str:
        return f"{self.path}:{self.line}: {self.severity}: {self.message}"


@dataclass
class RawMethod:
    name: str
    return_type: str
    params: list[tuple[str, str]]  # (type, name)
    modifiers: frozenset[str]
    start_line: int
    end_line: int
    has_body: bool


@dataclass
class RawType:
    kind: str  # "class" | "interface"
    name: str
    modifiers: frozenset[str]
    extends: list[str]
    implements: list[str]
    start_line: int
    end_line: int
    methods: list[RawMethod] = field(default_factory=list)
    fields: dict[str, str] = field(default_factory=dict)
    # (first token, end token, parameter types by name) for every scanned region
    bodies: list[tuple[int, int, dict[str, str]]] = field(default_factory=list)


@dataclass
class SourceUnit:
    path: str
    package: str
    declared_types: list[RawType]
    line_count: int
    imports: dict[str, str] = field(default_factory=dict)
    wildcard_imports: list[str] = field(default_factory=list)
    tokens: list[Token] = field(default_factory=list, repr=False)


@dataclass
class ParseResult:
    interfaces: list[InterfaceDecl]
    classes: list[ClassDecl]
    calls: list[CallRecord]
    system_loc: int
    diagnostics: list[ParseDiagnostic]
    units: list[SourceUnit] = field(default_factory=list, repr=False)
    chained_calls_skipped: int = 0
    unresolved_receivers: int = 0


# -- lexing ------------------------------------------------------------------


@dataclass(frozen=True)
class Token:
    kind: str  # id | num | str | op
    text: str
    line: int


_TOKEN_RE = re.compile(
    r"""
    (?P<ws>[ \t\r\f\v]+)
  | (?P<nl>\n)
  | (?P<lc>//[^\n]*)
  | (?P<bc>/\*.*?\*/)
  | (?P<ubc>/\*.*)
  | (?P<tb>\"\"\".*?\"\"\")
  | (?P<str>"(?:\\.|[^"\\\n])*")
  | (?P<chr>'(?:\\.|[^'\\\n])+')
  | (?P<id>[^\W\d][\w$]*|\$[\w$]*)
  | (?P<num>\d[\w.]*|\.\d[\w.]*)
  | (?P<op>\.\.\.|::|->|&&|\|\||[=!<>]=|\+\+|--|[{}()\[\];,.@<>?:=+\-*/%&|^!~])
    """,
    re.DOTALL | re.VERBOSE,
)


def tokenize(path: str, text: str) -> tuple[list[Token], list[ParseDiagnostic]]:
    tokens: list[Token] = []
    diags: list[ParseDiagnostic] = []
    line, pos, n = 1, 0, len(text)
    while pos < n:
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            diags.append(ParseDiagnostic(path, line, "warning", f"unexpected character {text[pos]!r}"))
            pos += 1
            continue
        kind = m.lastgroup
        chunk = m.group()
        if kind == "ubc":
            diags.append(ParseDiagnostic(path, line, "error", "unterminated block comment"))
        elif kind in ("str", "chr", "tb"):
            tokens.append(Token("str", chunk, line))
        elif kind in ("id", "num", "op"):
            tokens.append(Token(kind, chunk, line))
        line += chunk.count("\n")
        pos = m.end()
    return tokens, diags


# -- declarations -------------------------------------------------------------

_MODIFIERS = frozenset(
    ["public", "protected", "private", "static", "final", "abstract", "default", "synchronized", "native", "transient", "volatile", "strictfp", "sealed", "non-sealed"]
)
_TYPE_KEYWORDS = frozenset({"class", "interface", "enum", "record"})
_KEYWORDS = frozenset(
    ["abstract", "assert", "break", "case", "catch", "class", "const", "continue", "default", "do", "else", "enum", "extends", "final", "finally", "for", "goto", "if", "implements", "import", "instanceof", "interface", "native", "new", "package", "private", "protected", "public", "return", "static", "strictfp", "super", "switch", "synchronized", "this", "throw", "throws", "transient", "try", "volatile", "while", "yield", "true", "false", "null", "var", "record", "sealed", "permits"]
)
_PRIMITIVES = frozenset(["boolean", "byte", "char", "short", "int", "long", "float", "double", "void"])
_OPEN = {"(": ")", "[": "]", "{": "}"}


def _line_count(text: str) -> int:
    if not text:
        return 0
    return text.count("\n") + (0 if text.endswith("\n") else 1)


class _FileParser:
    def __init__(self, path: str, tokens: list[Token]):
        self.path = path
        self.toks = tokens
        self.diags: list[ParseDiagnostic] = []

    # token helpers

    def text(self, i: int) -> str:
        return self.toks[i].text if 0 <= i < len(self.toks) else ""

    def line(self, i: int) -> int:
        if not self.toks:
            return 1
        return self.toks[min(max(i, 0), len(self.toks) - 1)].line

    def is_ident(self, i: int) -> bool:
        return 0 <= i < len(self.toks) and self.toks[i].kind == "id"

    def warn(self, i: int, msg: str, severity: str = "warning") -> None:
        self.diags.append(ParseDiagnostic(self.path, self.line(i), severity, msg))

    def match_close(self, i: int) -> int:
        """Index of the bracket closing the one at ``i`` (``len`` if missing)."""
        stack = [_OPEN[self.text(i)]]
        j = i + 1
        while j < len(self.toks):
            t = self.toks[j].text
            if t in _OPEN:
                stack.append(_OPEN[t])
            elif t in (")", "]", "}"):
                if t == stack[-1]:
                    stack.pop()
                    if not stack:
                        return j
                elif t == "}":
                    # mismatched paren inside a block; let the brace win
                    while stack and stack[-1] != "}":
                        stack.pop()
                    if stack:
                        stack.pop()
                        if not stack:
                            return j
            j += 1
        return len(self.toks)

    def match_angle(self, i: int) -> int | None:
        """Closing ``>`` for a generic argument list at ``i``, or None."""
        depth = 0
        j = i
        while j < len(self.toks):
            t = self.text(j)
            if t == "<":
                depth += 1
            elif t == ">":
                depth -= 1
                if depth == 0:
                    return j
            elif not (
                self.is_ident(j) or t in (",", ".", "?", "&", "[", "]", "@")
            ):
                return None
            j += 1
        return None

    def skip_annotation(self, i: int) -> int:
        j = i + 1
        while self.is_ident(j) and self.text(j + 1) == "." and self.is_ident(j + 2):
            j += 2
        j += 1
        if self.text(j) == "(":
            j = self.match_close(j) + 1
        return j

    def parse_type(self, i: int) -> tuple[str, int] | None:
        """Parse ``a.b.C<...>[][]`` starting at ``i``; returns (text, next index)."""
        if not self.is_ident(i) or (self.text(i) in _KEYWORDS):
            return None
        parts = [self.text(i)]
        j = i + 1
        while self.text(j) == "." and self.is_ident(j + 1):
            parts.append("." + self.text(j + 1))
            j += 2
        if self.text(j) == "<":
            end = self.match_angle(j)
            if end is None:
                return None
            parts.append(" ".join(t.text for t in self.toks[j : end + 1]))
            j = end + 1
        while self.text(j) == "[" and self.text(j + 1) == "]":
            parts.append("[]")
            j += 2
        if self.text(j) == "...":
            parts.append("...")
            j += 1
        return "".join(parts), j

    def parse_type_list(self, i: int) -> tuple[list[str], int]:
        out = []
        while True:
            while self.text(i) == "@":
                i = self.skip_annotation(i)
            parsed = self.parse_type(i)
            if parsed is None:
                break
            out.append(parsed[0])
            i = parsed[1]
            if self.text(i) != ",":
                break
            i += 1
        return out, i

    # file level

    def parse(self) -> tuple[str, dict[str, str], list[str], list[RawType]]:
        self._check_balance()
        package = ""
        imports: dict[str, str] = {}
        wildcards: list[str] = []
        types: list[RawType] = []
        i = 0
        while i < len(self.toks):
            t = self.text(i)
            if t == ";":
                i += 1
            elif t == "package":
                j = i + 1
                names = []
                while j < len(self.toks) and self.text(j) != ";":
                    names.append(self.text(j))
                    j += 1
                package = "".join(names)
                i = j + 1
            elif t == "import":
                j = i + 1
                if self.text(j) == "static":
                    j += 1
                names = []
                while j < len(self.toks) and self.text(j) != ";":
                    names.append(self.text(j))
                    j += 1
                name = "".join(names)
                if name.endswith(".*"):
                    wildcards.append(name[:-2])
                elif name:
                    imports[name.rpartition(".")[2]] = name
                i = j + 1
            else:
                i = self.parse_type_decl(i, types)
        return package, imports, wildcards, types

    def _check_balance(self) -> None:
        depth = 0
        for tok in self.toks:
            if tok.text == "{":
                depth += 1
            elif tok.text == "}":
                depth -= 1
                if depth < 0:
                    raise MalformedFile(self.path, tok.line, "unbalanced '}'")
        if depth:
            raise MalformedFile(self.path, self.line(len(self.toks) - 1), "unclosed '{'")

    def _recover(self, i: int, limit: int) -> int:
        """Skip to just past the next ';' or balanced block before ``limit``."""
        while i < limit:
            t = self.text(i)
            if t == ";":
                return i + 1
            if t == "{":
                return self.match_close(i) + 1
            if t in ("(", "["):
                i = self.match_close(i) + 1
                continue
            if t == "}":
                return i
            i += 1
        return limit

    def parse_type_decl(self, i: int, out: list[RawType], limit: int | None = None) -> int:
        limit = len(self.toks) if limit is None else limit
        mods: set[str] = set()
        start = None
        while i < limit:
            t = self.text(i)
            if t == "@" and self.text(i + 1) != "interface":
                i = self.skip_annotation(i)
            elif t in _MODIFIERS:
                start = i if start is None else start
                mods.add(t)
                i += 1
            else:
                break
        start = i if start is None else start
        t = self.text(i)
        if t == "@" and self.text(i + 1) == "interface" or t in ("enum", "record"):
            self.warn(i, f"unsupported declaration '{t if t != '@' else '@interface'}' skipped")
            j = i
            while j < limit and self.text(j) != "{":
                j += 1
            return self.match_close(j) + 1 if j < limit else limit
        if t not in ("class", "interface"):
            self.warn(i, f"unexpected token {t!r} at type level", "error")
            return self._recover(i, limit) if i < limit else limit
        kind = t
        if not self.is_ident(i + 1):
            self.warn(i, f"{kind} without a name", "error")
            return self._recover(i, limit)
        name = self.text(i + 1)
        j = i + 2
        if self.text(j) == "<":
            end = self.match_angle(j)
            j = end + 1 if end is not None else j
        extends: list[str] = []
        implements: list[str] = []
        while j < limit and self.text(j) != "{":
            t = self.text(j)
            if t == "extends":
                extends, j = self.parse_type_list(j + 1)
            elif t == "implements":
                implements, j = self.parse_type_list(j + 1)
            elif t == "permits":
                _, j = self.parse_type_list(j + 1)
            else:
                self.warn(j, f"unexpected token {t!r} in {kind} header", "error")
                j += 1
        if j >= limit:
            self.warn(i, f"{kind} {name} has no body", "error")
            return limit
        close = self.match_close(j)
        raw = RawType(
            kind=kind,
            name=name,
            modifiers=frozenset(mods),
            extends=extends if kind == "interface" else extends[:1],
            implements=implements if kind == "class" else [],
            start_line=self.line(start),
            end_line=self.line(close),
        )
        if kind == "class" and len(extends) > 1:
            self.warn(i, f"class {name} extends several types; keeping the first")
        self.parse_members(j + 1, close, raw)
        out.append(raw)
        return close + 1

    # members

    def parse_members(self, i: int, end: int, raw: RawType) -> None:
        is_iface = raw.kind == "interface"
        while i < end:
            t = self.text(i)
            if t == ";":
                i += 1
                continue
            mods: set[str] = set()
            start = None
            while i < end:
                t = self.text(i)
                if t == "@" and self.text(i + 1) != "interface":
                    i = self.skip_annotation(i)
                elif t in _MODIFIERS and not (t == "default" and self.text(i + 1) == ":"):
                    start = i if start is None else start
                    mods.add(t)
                    i += 1
                else:
                    break
            if i >= end:
                break
            start = i if start is None else start
            t = self.text(i)
            if t == "{":
                close = self.match_close(i)
                if not is_iface:
                    raw.bodies.append((i + 1, close, {}))
                i = close + 1
                continue
            if t in _TYPE_KEYWORDS or (t == "@" and self.text(i + 1) == "interface"):
                self.warn(i, f"nested type in {raw.name} skipped")
                j = i
                while j < end and self.text(j) != "{":
                    j += 1
                i = self.match_close(j) + 1 if j < end else end
                continue
            if t == "<":
                close = self.match_angle(i)
                if close is None:
                    self.warn(i, "unparseable type parameters")
                    i = self._recover(i, end)
                    continue
                i = close + 1
            # constructor
            if self.text(i) == raw.name and self.text(i + 1) == "(":
                close = self.match_close(i + 1)
                params = self.parse_params(i + 2, close)
                j = close + 1
                if self.text(j) == "throws":
                    _, j = self.parse_type_list(j + 1)
                if self.text(j) == "{":
                    body_end = self.match_close(j)
                    if not is_iface:
                        raw.bodies.append((j + 1, body_end, {n: ty for ty, n in params}))
                    i = body_end + 1
                else:
                    self.warn(i, f"constructor of {raw.name} has no body")
                    i = self._recover(j, end)
                continue
            parsed = self.parse_type(i)
            if parsed is None or not self.is_ident(parsed[1]):
                self.warn(i, f"unparseable member in {raw.name}")
                i = self._recover(i, end)
                continue
            type_text, j = parsed
            if self.text(j + 1) == "(":
                i = self.parse_method(start, j, type_text, frozenset(mods), raw, end)
            else:
                i = self.parse_fields(j, type_text, raw, end)

    def parse_params(self, i: int, end: int) -> list[tuple[str, str]]:
        params: list[tuple[str, str]] = []
        while i < end:
            while self.text(i) == "@" or self.text(i) == "final":
                i = self.skip_annotation(i) if self.text(i) == "@" else i + 1
            parsed = self.parse_type(i)
            if parsed is None or not self.is_ident(parsed[1]):
                self.warn(i, "unparseable parameter list")
                return params
            ty, j = parsed
            name = self.text(j)
            j += 1
            while self.text(j) == "[" and self.text(j + 1) == "]":
                ty += "[]"
                j += 2
            params.append((ty, name))
            if self.text(j) == ",":
                j += 1
            elif j < end:
                self.warn(j, "unparseable parameter list")
                return params
            i = j
        return params

    def parse_method(
        self, start: int, name_at: int, ret: str, mods: frozenset[str], raw: RawType, end: int
    ) -> int:
        close = self.match_close(name_at + 1)
        params = self.parse_params(name_at + 2, close)
        j = close + 1
        while self.text(j) == "[" and self.text(j + 1) == "]":
            ret += "[]"
            j += 2
        if self.text(j) == "throws":
            _, j = self.parse_type_list(j + 1)
        has_body = self.text(j) == "{"
        if has_body:
            body_end = self.match_close(j)
            if raw.kind == "class":
                raw.bodies.append((j + 1, body_end, {n: ty for ty, n in params}))
            nxt = body_end + 1
            end_line = self.line(body_end)
        elif self.text(j) == ";":
            nxt, end_line = j + 1, self.line(j)
        elif self.text(j) == "default":
            nxt = self._recover(j, end)
            end_line = self.line(nxt - 1)
        else:
            self.warn(j, f"unparseable method {self.text(name_at)} in {raw.name}")
            return self._recover(j, end)
        raw.methods.append(
            RawMethod(
                name=self.text(name_at),
                return_type=ret,
                params=params,
                modifiers=mods,
                start_line=self.line(start),
                end_line=end_line,
                has_body=has_body,
            )
        )
        return nxt

    def parse_fields(self, i: int, type_text: str, raw: RawType, end: int) -> int:
        while i < end:
            if not self.is_ident(i):
                self.warn(i, f"unparseable field in {raw.name}")
                return self._recover(i, end)
            name = self.text(i)
            j = i + 1
            ty = type_text
            while self.text(j) == "[" and self.text(j + 1) == "]":
                ty += "[]"
                j += 2
            raw.fields.setdefault(name, ty)
            if self.text(j) == "=":
                k = j + 1
                while k < end and self.text(k) not in (",", ";"):
                    k = self.match_close(k) + 1 if self.text(k) in _OPEN else k + 1
                if raw.kind == "class":
                    raw.bodies.append((j + 1, k, {}))
                j = k
            if self.text(j) == ",":
                i = j + 1
                continue
            if self.text(j) == ";":
                return j + 1
            self.warn(j, f"unparseable field in {raw.name}")
            return self._recover(j, end)
        return end


# -- body scanning --------------------------------------------------------------

_LOCAL_PREV = frozenset({"{", "}", ";", "(", ",", ":", "final", ")"})
_LOCAL_NEXT = frozenset({"=", ";", ",", ":", ")"})
_NOT_CALLS = frozenset(
    {"if", "for", "while", "switch", "catch", "synchronized", "return", "new",
     "this", "super", "assert", "throw", "try", "do", "else", "case", "yield"}
)


@dataclass
class _ScanStats:
    chained: int = 0


def _strip_generics(type_text: str) -> str:
    depth, out = 0, []
    for ch in type_text:
        if ch == "<":
            depth += 1
        elif ch == ">":
            depth -= 1
        elif depth == 0 and not ch.isspace():
            out.append(ch)
    return "".join(out)


def _scan_body(
    p: _FileParser,
    start: int,
    end: int,
    params: dict[str, str],
    fields: dict[str, str],
    superclass: str | None,
    stats: _ScanStats,
) -> list[tuple[str, str, int]]:
    """Message sends in ``[start, end)`` as (receiver type text, name, argc).

    The receiver type text ``"<self>"`` marks the enclosing class.
    """
    locals_: list[tuple[int, str, str | None]] = []
    for k in range(start, end):
        if not p.is_ident(k) or p.text(k - 1) not in _LOCAL_PREV:
            continue
        if p.text(k) == "var" and p.is_ident(k + 1) and p.text(k + 2) in _LOCAL_NEXT:
            locals_.append((k, p.text(k + 1), None))
            continue
        parsed = p.parse_type(k)
        if parsed is None:
            continue
        ty, j = parsed
        if j < end and p.is_ident(j) and p.text(j) not in _KEYWORDS and p.text(j + 1) in _LOCAL_NEXT:
            locals_.append((k, p.text(j), ty))

    def declared_type(name: str, at: int) -> tuple[bool, str | None]:
        found = None
        for pos, n, ty in locals_:
            if pos < at and n == name:
                found = (True, ty)
        if found:
            return found
        if name in params:
            return True, params[name]
        if name in fields:
            return True, fields[name]
        return False, None

    out: list[tuple[str, str, int]] = []
    for k in range(start, end):
        if not p.is_ident(k) or p.text(k + 1) != "(" or p.text(k) in _NOT_CALLS:
            continue
        prev = p.text(k - 1)
        receiver: str | None
        if prev == ".":
            j = k - 2
            while p.is_ident(j) and p.text(j - 1) == "." and p.is_ident(j - 2):
                j -= 2
            if p.text(j - 1) == "new":
                continue
            r = p.text(k - 2)
            if r in (")", "]"):
                if r == ")":
                    stats.chained += 1
                continue
            if not p.is_ident(k - 2):
                continue
            if p.text(k - 3) == ".":
                if p.text(k - 4) == "this" and p.text(k - 5) != "." and p.text(k - 2) in fields:
                    receiver = fields[p.text(k - 2)]
                else:
                    continue
            elif r == "this":
                receiver = "<self>"
            elif r == "super":
                receiver = superclass
            else:
                known, receiver = declared_type(r, k)
                if not known:
                    continue
        elif prev == "new" or (p.is_ident(k - 1) and prev not in _KEYWORDS) or prev in ("::", "@"):
            continue
        else:
            receiver = "<self>"
        if receiver is None:
            continue
        close = p.match_close(k + 1)
        out.append((receiver, p.text(k), _arg_count(p, k + 1, close)))
    return out


def _arg_count(p: _FileParser, open_at: int, close: int) -> int:
    if close == open_at + 1:
        return 0
    count, j = 1, open_at + 1
    while j < close:
        t = p.text(j)
        if t in _OPEN:
            j = p.match_close(j) + 1
            continue
        if t == "<" and _type_arguments_end(p, j, close) is not None:
            j = _type_arguments_end(p, j, close) + 1
            continue
        if t == ",":
            count += 1
        j += 1
    return count


_TYPE_ARG_TOKENS = frozenset({",", ".", "?", "[", "]", "&", "<", ">", "extends", "super"})
_AFTER_TYPE_ARGS = frozenset({"(", ")", "::", "[", ".", ">"})


def _type_arguments_end(p: _FileParser, at: int, limit: int) -> int | None:
    """Index of the ``>`` closing type arguments opened at ``at``, or None.

    ``a < b, c > d`` inside an argument list is read as two comparisons; the
    angle brackets count as type arguments only after ``.`` (explicit type
    arguments) or when followed by something a relational operand cannot be
    followed by, such as ``(`` in ``new Pair<A, B>(...)``.
    """
    prev = p.text(at - 1)
    if prev != "." and not p.is_ident(at - 1):
        return None
    end = p.match_angle(at)
    if end is None or end >= limit:
        return None
    if any(not (p.is_ident(k) or p.text(k) in _TYPE_ARG_TOKENS) for k in range(at + 1, end)):
        return None
    if prev != "." and p.text(end + 1) not in _AFTER_TYPE_ARGS:
        return None
    return end


# -- resolution ----------------------------------------------------------------


class _Resolver:
    def __init__(self, unit: SourceUnit, known: set[str], by_simple: dict[str, list[str]]):
        self.unit, self.known, self.by_simple = unit, known, by_simple

    def resolve(self, name: str) -> TypeRef | None:
        name = _strip_generics(name)
        if not name or name.endswith(("[]", "...")) or name in _PRIMITIVES:
            return None
        if "." in name:
            head, _, rest = name.partition(".")
            if name not in self.known and head in self.unit.imports:
                name = f"{self.unit.imports[head]}.{rest}"
            return TypeRef.parse(name)
        if name in self.unit.imports:
            return TypeRef.parse(self.unit.imports[name])
        local = f"{self.unit.package}.{name}" if self.unit.package else name
        if local in self.known:
            return TypeRef.parse(local)
        for w in self.unit.wildcard_imports:
            if f"{w}.{name}" in self.known:
                return TypeRef.parse(f"{w}.{name}")
        cands = self.by_simple.get(name, [])
        if len(cands) == 1:
            return TypeRef.parse(cands[0])
        return TypeRef("", name)


# -- test classification ---------------------------------------------------------


def _in_test_package(ref: TypeRef) -> bool:
    return any(seg in ("test", "tests") for seg in ref.package.split("."))


def classify_test(decl: InterfaceDecl | ClassDecl, model: CodeModel) -> bool:
    """True for test classes/interfaces as excluded from the analysis.

    Classes: a ``TestCase`` somewhere up the superclass chain, or a
    ``test``/``tests`` package segment. Interfaces: a test package, or a
    non-empty implementation set made only of test classes.
    """
    if _in_test_package(decl.ref):
        return True
    if isinstance(decl, ClassDecl):
        if decl.ref.qualified in model.classes:
            chain = model.superclass_chain(decl.ref)
        else:
            chain = (decl.extends,) if decl.extends else ()
        return any(r.simple_name == "TestCase" for r in chain)
    if decl.ref.qualified not in model.interfaces:
        return False
    impl = model.implementations(decl.ref)
    return bool(impl) and all(classify_test(model.classes[c.qualified], model) for c in impl)


# -- entry points ------------------------------------------------------------------


def parse_file(path: str, text: str) -> tuple[SourceUnit, list[ParseDiagnostic]]:
    tokens, diags = tokenize(path, text)
    fp = _FileParser(path, tokens)
    package, imports, wildcards, types = fp.parse()
    unit = SourceUnit(path, package, types, _line_count(text), imports, wildcards, tokens)
    return unit, diags + fp.diags


def parse_source(files: Iterable[tuple[str, str]]) -> ParseResult:
    """Extract declarations and calls from ``(path, text)`` pairs.

    Files are processed in path order so output is deterministic.

    Raises:
        MalformedFile: unbalanced braces at the top level of some file.
    """
    units: list[SourceUnit] = []
    diags: list[ParseDiagnostic] = []
    for path, text in sorted(files, key=lambda f: str(f[0])):
        unit, file_diags = parse_file(str(path), text)
        units.append(unit)
        diags.extend(file_diags)

    known: dict[str, tuple[SourceUnit, RawType]] = {}
    for unit in units:
        for raw in unit.declared_types:
            q = f"{unit.package}.{raw.name}" if unit.package else raw.name
            if q in known:
                diags.append(
                    ParseDiagnostic(unit.path, raw.start_line, "error", f"duplicate type {q} ignored")
                )
                continue
            known[q] = (unit, raw)
    by_simple: dict[str, list[str]] = {}
    for q in known:
        by_simple.setdefault(q.rpartition(".")[2], []).append(q)
    known_names = set(known)

    interfaces: list[InterfaceDecl] = []
    classes: list[ClassDecl] = []
    resolvers: dict[str, _Resolver] = {}
    for q, (unit, raw) in known.items():
        res = resolvers.setdefault(unit.path, _Resolver(unit, known_names, by_simple))
        ref = TypeRef.parse(q)
        supers = [r for r in (res.resolve(n) for n in raw.extends) if r is not None]
        methods = _methods(ref, raw, unit, diags)
        if raw.kind == "interface":
            interfaces.append(InterfaceDecl(ref, frozenset(r for r in supers if r != ref), methods))
        else:
            impls = [r for r in (res.resolve(n) for n in raw.implements) if r is not None]
            classes.append(
                ClassDecl(
                    ref,
                    supers[0] if supers else None,
                    frozenset(impls),
                    methods,
                    is_abstract="abstract" in raw.modifiers,
                )
            )

    # provisional model for hierarchy-dependent test classification
    provisional = build_model(interfaces, classes)
    interfaces = [_with_test(d, provisional) for d in interfaces]
    classes = [_with_test(d, provisional) for d in classes]

    stats = _ScanStats()
    calls: list[CallRecord] = []
    unresolved = 0
    for q, (unit, raw) in known.items():
        if raw.kind != "class":
            continue
        res = resolvers[unit.path]
        fp = _FileParser(unit.path, unit.tokens)
        caller = TypeRef.parse(q)
        superclass = raw.extends[0] if raw.extends else None
        for start, end, params in raw.bodies:
            for recv, name, argc in _scan_body(fp, start, end, params, raw.fields, superclass, stats):
                target = caller if recv == "<self>" else res.resolve(recv)
                if target is None or target.qualified not in known_names:
                    unresolved += 1
                    continue
                calls.append(CallRecord(caller, target, name, argc))

    return ParseResult(
        interfaces=interfaces,
        classes=classes,
        calls=calls,
        system_loc=sum(u.line_count for u in units),
        diagnostics=diags,
        units=units,
        chained_calls_skipped=stats.chained,
        unresolved_receivers=unresolved,
    )


def _methods(
    owner: TypeRef, raw: RawType, unit: SourceUnit, diags: list[ParseDiagnostic]
) -> tuple[MethodDecl, ...]:
    out: dict[MethodSignature, MethodDecl] = {}
    for m in raw.methods:
        if raw.kind == "interface" and ({"static", "private"} & m.modifiers):
            continue
        try:
            sig = MethodSignature(m.return_type, m.name, tuple(t for t, _ in m.params))
        except ValueError as exc:
            diags.append(ParseDiagnostic(unit.path, m.start_line, "warning", str(exc)))
            continue
        if sig in out:
            diags.append(
                ParseDiagnostic(unit.path, m.start_line, "warning", f"{owner}: duplicate {sig} ignored")
            )
            continue
        if raw.kind == "interface":
            out[sig] = MethodDecl(owner, sig, 0, True, True)
        elif m.has_body or "abstract" not in m.modifiers:
            loc = m.end_line - m.start_line + 1
            out[sig] = MethodDecl(owner, sig, loc, "public" in m.modifiers, False)
        else:
            out[sig] = MethodDecl(owner, sig, 0, "public" in m.modifiers, True)
    return tuple(out.values())


def _with_test(decl, model: CodeModel):
    flag = classify_test(decl, model)
    return dataclasses.replace(decl, is_test=flag) if flag != decl.is_test else decl


def read_source_dir(root: str | Path, suffixes: Sequence[str] = (".java",)) -> list[tuple[str, str]]:
    """Collect ``(relative path, text)`` for every source file under ``root``.

    Raises:
        EncodingError: a file is not valid UTF-8.
    """
    root = Path(root)
    files = []
    for path in sorted(p for p in root.rglob("*") if p.is_file() and p.suffix in suffixes):
        try:
            text = path.read_bytes().decode("utf-8")
        except UnicodeDecodeError as exc:
            raise EncodingError(f"{path}: {exc}") from None
        files.append((path.relative_to(root).as_posix(), text))
    return files

