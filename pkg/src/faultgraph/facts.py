"""Per-compilation-unit structural facts and the line-delimited facts file.

A compilation unit (CU) is one Java-like source file; it may declare several
classes. The facts captured here are the minimum needed downstream: class
kinds and relationships, per-method type references and external call sites,
per-method field usage (for cohesion), and code line counts.

Facts file format: UTF-8, one JSON object per line, one CU per line, with
fixed top-level keys ``path``, ``package``, ``imports``, ``classes``, ``loc``.
Class records carry ``name``, ``kind``, ``extends``, ``implements``,
``field_types``, ``methods``, ``loc``; method records carry ``name``,
``param_types``, ``referenced_types``, ``external_calls``, ``used_fields``.
Set-valued fields are serialized sorted so the writer is byte-deterministic.
"""

import json
from dataclasses import dataclass

from .errors import FormatError

CLASS_KINDS = ("class", "interface")


# --------------------------------------------------------------------------
# Source scanning: comment/string state machine shared by count_loc and the
# parser (which tokenizes the comment-stripped text).
# --------------------------------------------------------------------------

_CODE, _LINE_COMMENT, _BLOCK_COMMENT, _STRING, _CHAR = range(5)


def scan_source(text: str) -> tuple[list[bool], str]:
    """Scan source text once, tracking comment and literal state.

    Returns (line_has_code, stripped) where line_has_code[i] is True when
    line i contains at least one non-whitespace character outside comments,
    and stripped is the text with comments blanked to spaces (newlines kept,
    string/char literals kept) so token positions match the original.
    """
    has_code: list[bool] = []
    out: list[str] = []
    state = _CODE
    line_code = False
    i, n = 0, len(text)
    while i < n:
        c = text[i]
        nxt = text[i + 1] if i + 1 < n else ""
        if c == "\n":
            # Java string/char literals do not span lines; drop the state
            # leniently so count_loc never fails on malformed input.
            if state in (_LINE_COMMENT, _STRING, _CHAR):
                state = _CODE
            has_code.append(line_code)
            line_code = False
            out.append("\n")
            i += 1
            continue
        if state == _CODE:
            if c == "/" and nxt == "/":
                state = _LINE_COMMENT
                out.append("  ")
                i += 2
                continue
            if c == "/" and nxt == "*":
                state = _BLOCK_COMMENT
                out.append("  ")
                i += 2
                continue
            if c == '"':
                state = _STRING
            elif c == "'":
                state = _CHAR
            if not c.isspace():
                line_code = True
            out.append(c)
            i += 1
        elif state == _LINE_COMMENT:
            out.append(" ")
            i += 1
        elif state == _BLOCK_COMMENT:
            if c == "*" and nxt == "/":
                state = _CODE
                out.append("  ")
                i += 2
            else:
                out.append(" " if c != "\t" else "\t")
                i += 1
        else:  # _STRING or _CHAR
            line_code = True
            quote = '"' if state == _STRING else "'"
            if c == "\\" and nxt:
                out.append(c)
                out.append(nxt)
                i += 2
                continue
            if c == quote:
                state = _CODE
            out.append(c)
            i += 1
    if text and not text.endswith("\n"):
        has_code.append(line_code)
    return has_code, "".join(out)


def count_loc(source_text: str) -> int:
    """Count lines that are neither blank nor entirely comment.

    A line counts when any non-whitespace character on it lies outside line
    and block comments; string literal content is code. Empty input gives 0.
    """
    has_code, _ = scan_source(source_text)
    return sum(has_code)


# --------------------------------------------------------------------------
# Domain types
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class MethodFacts:
    """One declared method (constructors included, named after the class).

    external_calls holds (receiver type name, method name) pairs for calls
    whose receiver type is not the enclosing class; used_fields holds names
    of the enclosing class's fields the body reads or writes (cohesion input).
    """

    name: str
    param_types: tuple[str, ...] = ()
    referenced_types: frozenset[str] = frozenset()
    external_calls: frozenset[tuple[str, str]] = frozenset()
    used_fields: frozenset[str] = frozenset()


@dataclass(frozen=True)
class ClassFacts:
    """One declared class or interface, with its own code line count."""

    name: str
    kind: str  # "class" | "interface"
    extends: str | None = None
    implements: tuple[str, ...] = ()
    field_types: tuple[str, ...] = ()  # multiset, one entry per declared field
    methods: tuple[MethodFacts, ...] = ()
    loc: int = 0


@dataclass(frozen=True)
class CUFacts:
    """Facts for one compilation unit. ``path`` is its identity."""

    path: str
    package: str
    imports: tuple[str, ...] = ()
    classes: tuple[ClassFacts, ...] = ()
    loc: int = 0


# --------------------------------------------------------------------------
# Facts file IO
# --------------------------------------------------------------------------


def _method_to_dict(m: MethodFacts) -> dict:
    return {
        "name": m.name,
        "param_types": list(m.param_types),
        "referenced_types": sorted(m.referenced_types),
        "external_calls": sorted([t, n] for t, n in m.external_calls),
        "used_fields": sorted(m.used_fields),
    }


def _class_to_dict(c: ClassFacts) -> dict:
    return {
        "name": c.name,
        "kind": c.kind,
        "extends": c.extends,
        "implements": list(c.implements),
        "field_types": sorted(c.field_types),
        "methods": [_method_to_dict(m) for m in c.methods],
        "loc": c.loc,
    }


def cu_to_dict(cu: CUFacts) -> dict:
    return {
        "path": cu.path,
        "package": cu.package,
        "imports": list(cu.imports),
        "classes": [_class_to_dict(c) for c in cu.classes],
        "loc": cu.loc,
    }


def _require(cond: bool, msg: str, record: int):
    if not cond:
        raise FormatError(msg, record=record)


def _method_from_dict(d: dict, record: int) -> MethodFacts:
    _require(isinstance(d.get("name"), str), "method record needs a name", record)
    calls = d.get("external_calls", [])
    _require(
        all(isinstance(p, list) and len(p) == 2 for p in calls),
        "external_calls entries must be [type, method] pairs",
        record,
    )
    return MethodFacts(
        name=d["name"],
        param_types=tuple(d.get("param_types", [])),
        referenced_types=frozenset(d.get("referenced_types", [])),
        external_calls=frozenset((t, n) for t, n in calls),
        used_fields=frozenset(d.get("used_fields", [])),
    )


def _class_from_dict(d: dict, record: int) -> ClassFacts:
    _require(isinstance(d.get("name"), str), "class record needs a name", record)
    _require(d.get("kind") in CLASS_KINDS, f"unknown class kind {d.get('kind')!r}", record)
    loc = d.get("loc", 0)
    _require(isinstance(loc, int) and loc >= 0, "class loc must be a non-negative integer", record)
    return ClassFacts(
        name=d["name"],
        kind=d["kind"],
        extends=d.get("extends"),
        implements=tuple(d.get("implements", [])),
        field_types=tuple(sorted(d.get("field_types", []))),
        methods=tuple(_method_from_dict(m, record) for m in d.get("methods", [])),
        loc=loc,
    )


def cu_from_dict(d: dict, record: int = 0) -> CUFacts:
    _require(isinstance(d, dict), "record must be a JSON object", record)
    for key in ("path", "package", "imports", "classes", "loc"):
        _require(key in d, f"missing field {key!r}", record)
    _require(isinstance(d["path"], str) and d["path"] != "", "path must be a non-empty string", record)
    _require(isinstance(d["loc"], int) and d["loc"] >= 0, "loc must be a non-negative integer", record)
    classes = tuple(_class_from_dict(c, record) for c in d["classes"])
    _require(len(classes) > 0, "classes must be non-empty", record)
    names = [c.name for c in classes]
    _require(len(names) == len(set(names)), "duplicate class name within CU", record)
    _require(d["loc"] >= len(classes), "loc smaller than the number of declared classes", record)
    return CUFacts(
        path=d["path"],
        package=d["package"],
        imports=tuple(d["imports"]),
        classes=classes,
        loc=d["loc"],
    )


def dump_facts(cus: list[CUFacts]) -> str:
    """Serialize CUs to facts-file text (one JSON object per line)."""
    lines = [json.dumps(cu_to_dict(cu), ensure_ascii=True, separators=(",", ":")) for cu in cus]
    return "".join(line + "\n" for line in lines)


def dump_facts_file(cus: list[CUFacts], path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(dump_facts(cus))


def load_facts(text: str) -> list[CUFacts]:
    """Parse facts-file text; raises FormatError with the 1-based record index."""
    cus: list[CUFacts] = []
    seen: set[str] = set()
    for idx, line in enumerate(text.splitlines(), start=1):
        if not line.strip():
            continue
        try:
            raw = json.loads(line)
        except json.JSONDecodeError as exc:
            raise FormatError(f"invalid JSON: {exc.msg}", record=idx) from exc
        cu = cu_from_dict(raw, record=idx)
        if cu.path in seen:
            raise FormatError(f"duplicate CU path {cu.path!r}", record=idx)
        seen.add(cu.path)
        cus.append(cu)
    return cus


def load_facts_file(path) -> list[CUFacts]:
    with open(path, encoding="utf-8") as fh:
        return load_facts(fh.read())
