"""Lexical extraction of procedure call networks from C source trees.

Nothing here parses C.  Sources are tokenized, preprocessor directives are
isolated as single opaque tokens, and definitions are recognized by the shape
``name ( ... ) { ... }`` at file scope.  Inside each body every
``identifier (`` occurrence counts as a call.
"""

from __future__ import annotations

import enum
import logging
import os
import re
from collections import Counter
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

from .graph import CallGraph

log = logging.getLogger(__name__)

# The classic exclusion list plus the rest of C99 and the GNU spellings that
# are commonly followed by a parenthesis.
KEYWORDS = frozenset(
    """
    if for while switch return sizeof do else goto case default typedef struct
    union enum auto break char const continue double extern float inline int
    long register restrict short signed static unsigned void volatile _Bool
    _Complex _Imaginary _Alignof _Alignas _Generic _Noreturn _Static_assert
    _Thread_local typeof __typeof __typeof__ asm __asm __asm__ __attribute
    __attribute__ __extension__ __inline __inline__ __volatile __volatile__
    __const __const__ __restrict __restrict__ __signed __signed__ __alignof
    __alignof__ __builtin_offsetof __builtin_va_arg __builtin_types_compatible_p
    __label__ __thread
    """.split()
)

MEMBER_ACCESS = frozenset({".", "->"})

# How many tokens may separate ``)`` from ``{`` in a K&R definition or an
# attribute-decorated one.
LOOKAHEAD = 128


class TokenKind(str, enum.Enum):
    IDENTIFIER = "identifier"
    PUNCTUATION = "punctuation"
    NUMBER = "number-literal"
    STRING = "string-literal"
    CHAR = "char-literal"
    PREPROCESSOR = "preprocessor-line"


@dataclass(frozen=True, slots=True)
class Token:
    kind: TokenKind
    text: str
    file: str
    line: int


@dataclass(frozen=True)
class ProcedureDef:
    name: str
    file: str
    start_line: int
    end_line: int
    node_id: int | None = None


@dataclass(frozen=True)
class CallRecord:
    caller: int | None
    callee_name: str
    count: int


@dataclass(frozen=True)
class ExtractorConfig:
    extensions: tuple[str, ...] = ("c", "h")
    scope: str = "global"

    def __post_init__(self):
        if self.scope not in ("global", "file"):
            raise ValueError(f"scope must be 'global' or 'file', got {self.scope!r}")
        exts = tuple(e.lstrip(".").lower() for e in self.extensions if e.strip("."))
        if not exts:
            raise ValueError("at least one file extension is required")
        object.__setattr__(self, "extensions", exts)


@dataclass
class ExtractionReport:
    files_scanned: int = 0
    procedures_found: int = 0
    calls_total: int = 0
    unresolved_calls: dict[str, int] = field(default_factory=dict)
    duplicate_definitions: int = 0
    procedures: tuple[ProcedureDef, ...] = ()
    diagnostics: list[str] = field(default_factory=list)

    @property
    def resolved_calls(self) -> int:
        return self.calls_total - sum(self.unresolved_calls.values())

    def to_dict(self) -> dict:
        return {
            "files_scanned": self.files_scanned,
            "procedures_found": self.procedures_found,
            "calls_total": self.calls_total,
            "resolved_calls": self.resolved_calls,
            "unresolved_calls": dict(sorted(self.unresolved_calls.items())),
            "duplicate_definitions": self.duplicate_definitions,
            "diagnostics": list(self.diagnostics),
        }


class ExtractionError(Exception):
    pass


class CorpusNotFoundError(ExtractionError, FileNotFoundError):
    pass


class EmptyCorpusError(ExtractionError, ValueError):
    pass


# --------------------------------------------------------------------------
# tokenizer

_TOKEN_RE = re.compile(
    r"""
     (?P<ws>[ \t\f\v\r]+|\\\r?\n)
    |(?P<nl>\n)
    |(?P<lc>//(?:\\\n|[^\n])*)
    |(?P<bc>/\*[\s\S]*?\*/)
    |(?P<bcopen>/\*)
    |(?P<str>"(?:[^"\\\n]|\\[\s\S])*")
    |(?P<chr>'(?:[^'\\\n]|\\[\s\S])*')
    |(?P<quote>["'])
    |(?P<num>\.?[0-9](?:[eEpP][+-]|[0-9A-Za-z_.])*)
    |(?P<id>[A-Za-z_][A-Za-z0-9_]*)
    |(?P<punct>\.\.\.|<<=|>>=|->|\+\+|--|<<|>>|<=|>=|==|!=|&&|\|\||[-+*/%&^|]=|\#\#|[\s\S])
    """,
    re.VERBOSE,
)

_DIRECTIVE_RE = re.compile(
    r"""
     (?P<cont>\\\r?\n)
    |(?P<bc>/\*[\s\S]*?\*/)
    |(?P<lc>//(?:\\\n|[^\n])*)
    |(?P<lit>"(?:[^"\\\n]|\\[\s\S])*"|'(?:[^'\\\n]|\\[\s\S])*')
    |(?P<nl>\n)
    |(?P<text>[^\\/"'\n]+|[\s\S])
    """,
    re.VERBOSE,
)

_KIND = {
    "num": TokenKind.NUMBER,
    "id": TokenKind.IDENTIFIER,
    "punct": TokenKind.PUNCTUATION,
    "str": TokenKind.STRING,
    "chr": TokenKind.CHAR,
}


def _scan_directive(text: str, pos: int) -> tuple[str, int, int]:
    """Consume a directive starting at ``#``; return (text, end, newlines)."""
    parts = []
    newlines = 0
    n = len(text)
    while pos < n:
        m = _DIRECTIVE_RE.match(text, pos)
        kind = m.lastgroup
        chunk = m.group()
        if kind == "nl":
            break
        pos = m.end()
        if kind == "cont":
            newlines += 1
        elif kind == "bc":
            newlines += chunk.count("\n")
            parts.append(" ")
        elif kind == "lc":
            newlines += chunk.count("\n")
        else:
            parts.append(chunk)
    return "".join(parts).strip(), pos, newlines


def _next_line(text: str, pos: int) -> int:
    nl = text.find("\n", pos)
    return len(text) if nl < 0 else nl


def tokenize(
    source_text: str | bytes, file: str | os.PathLike = "<string>", diagnostics: list[str] | None = None
) -> list[Token]:
    """Split C source into tokens, dropping comments and whitespace.

    Bytes are decoded as Latin-1 so every input is scannable.  Problems such as
    an unterminated comment or literal are reported through ``diagnostics``
    (and the module logger) and scanning resumes on the next line.
    """
    if isinstance(source_text, bytes):
        source_text = source_text.decode("latin-1")
    fname = str(file)
    text = source_text
    tokens: list[Token] = []
    line = 1
    at_line_start = True
    pos = 0
    n = len(text)
    match = _TOKEN_RE.match
    append = tokens.append

    def warn(msg):
        msg = f"{fname}:{line}: {msg}"
        log.debug(msg)
        if diagnostics is not None:
            diagnostics.append(msg)

    while pos < n:
        m = match(text, pos)
        kind = m.lastgroup
        chunk = m.group()
        if kind == "ws":
            if chunk[0] == "\\":
                line += 1
            pos = m.end()
        elif kind == "nl":
            line += 1
            at_line_start = True
            pos = m.end()
        elif kind == "lc" or kind == "bc":
            k = chunk.count("\n")
            if k:
                line += k
                at_line_start = at_line_start or kind == "bc"
            pos = m.end()
        elif kind == "bcopen":
            warn("unterminated block comment")
            pos = _next_line(text, pos)
        elif kind == "quote":
            warn("unterminated string literal" if chunk == '"' else "unterminated char literal")
            pos = _next_line(text, pos)
        elif chunk == "#" and at_line_start:
            body, pos, k = _scan_directive(text, pos)
            append(Token(TokenKind.PREPROCESSOR, body, fname, line))
            line += k
        else:
            append(Token(_KIND[kind], chunk, fname, line))
            if kind == "str" or kind == "chr":
                line += chunk.count("\n")
            at_line_start = False
            pos = m.end()
    return tokens


# --------------------------------------------------------------------------
# definitions and calls


_COND_RE = re.compile(r"#\s*(if|ifdef|ifndef|elif|else|endif)\b\s*(.*)", re.S)


def _is_zero(expr: str) -> bool:
    return expr.strip() in ("0", "(0)")


def _code_tokens(tokens: Iterable[Token]) -> list[Token]:
    """Drop directives and the code of conditional branches not taken.

    Each ``#if``/``#ifdef``/``#ifndef`` chain contributes its first branch,
    except that literal ``0`` conditions pass to the next branch.  Keeping a
    single branch keeps braces balanced when both sides of an ``#else`` open
    a block.
    """
    out = []
    stack: list[list[bool]] = []  # [parent_active, taken, active]
    active = True
    for t in tokens:
        if t.kind is not TokenKind.PREPROCESSOR:
            if active:
                out.append(t)
            continue
        m = _COND_RE.match(t.text)
        if not m:
            continue
        word, expr = m.groups()
        if word in ("if", "ifdef", "ifndef"):
            take = not (word == "if" and _is_zero(expr))
            stack.append([active, take, active and take])
        elif not stack:
            continue
        elif word == "endif":
            stack.pop()
        else:
            frame = stack[-1]
            take = not frame[1] and not (word == "elif" and _is_zero(expr))
            frame[1] = frame[1] or take
            frame[2] = frame[0] and take
        active = stack[-1][2] if stack else True
    return out


def _is_punct(tok: Token, text: str) -> bool:
    return tok.kind is TokenKind.PUNCTUATION and tok.text == text


def _match_paren(toks: Sequence[Token], i: int) -> int | None:
    """Index of the ``)`` closing the ``(`` at ``i``; None if a statement
    boundary or brace comes first."""
    depth = 0
    for j in range(i, len(toks)):
        t = toks[j]
        if t.kind is not TokenKind.PUNCTUATION:
            continue
        s = t.text
        if s == "(":
            depth += 1
        elif s == ")":
            depth -= 1
            if depth == 0:
                return j
        elif s in ";{}":
            return None
    return None


def _match_brace(toks: Sequence[Token], i: int) -> int | None:
    depth = 0
    for j in range(i, len(toks)):
        t = toks[j]
        if t.kind is TokenKind.PUNCTUATION:
            if t.text == "{":
                depth += 1
            elif t.text == "}":
                depth -= 1
                if depth == 0:
                    return j
    return None


def _attribute_run(toks: Sequence[Token], i: int, end: int) -> bool:
    """True when toks[i:end] is only ``__word`` or ``__word(...)`` groups."""
    while i < end:
        t = toks[i]
        if t.kind is not TokenKind.IDENTIFIER or not t.text.startswith("__"):
            return False
        i += 1
        if i < end and _is_punct(toks[i], "("):
            j = _match_paren(toks, i)
            if j is None or j >= end:
                return False
            i = j + 1
    return True


def _body_open(toks: Sequence[Token], i: int) -> int | None:
    """Find the ``{`` opening a body after a parameter list ending at i-1.

    Accepts ``{`` directly, K&R parameter declarations (each closed by ``;``)
    and GNU attribute groups.
    """
    if i >= len(toks):
        return None
    first = toks[i]
    if _is_punct(first, "{"):
        return i
    if first.kind is not TokenKind.IDENTIFIER:
        return None
    stop = min(len(toks), i + LOOKAHEAD)
    j = i
    while j < stop:
        t = toks[j]
        if t.kind is TokenKind.PUNCTUATION:
            s = t.text
            if s == "{":
                prev = toks[j - 1]
                if _is_punct(prev, ";") or _attribute_run(toks, i, j):
                    return j
                return None
            if s not in ("*", ",", ";", "[", "]", "(", ")"):
                return None
        elif t.kind is not TokenKind.IDENTIFIER and t.kind is not TokenKind.NUMBER:
            return None
        j += 1
    return None


def _scan_definitions(
    toks: Sequence[Token], diagnostics: list[str] | None = None
) -> list[tuple[ProcedureDef, int, int]]:
    """Definitions in a preprocessor-free token list with body index ranges
    ``(open_brace, close_brace)``."""
    found = []
    depth = 0
    n = len(toks)
    i = 0
    fname = toks[0].file if toks else "<string>"

    def warn(msg):
        log.debug(msg)
        if diagnostics is not None:
            diagnostics.append(msg)

    while i < n:
        t = toks[i]
        if t.kind is TokenKind.PUNCTUATION:
            if t.text == "{":
                depth += 1
            elif t.text == "}":
                depth -= 1
                if depth < 0:
                    warn(f"{fname}:{t.line}: unbalanced '}}', later definitions skipped")
                    return found
        elif (
            depth == 0
            and t.kind is TokenKind.IDENTIFIER
            and t.text not in KEYWORDS
            and i + 1 < n
            and _is_punct(toks[i + 1], "(")
            and not (i > 0 and toks[i - 1].kind is TokenKind.PUNCTUATION and toks[i - 1].text in MEMBER_ACCESS)
        ):
            close = _match_paren(toks, i + 1)
            if close is not None:
                open_ = _body_open(toks, close + 1)
                if open_ is not None:
                    end = _match_brace(toks, open_)
                    if end is None:
                        warn(f"{fname}:{toks[open_].line}: unbalanced '{{' in body of {t.text}")
                        return found
                    found.append((ProcedureDef(t.text, t.file, t.line, toks[end].line), open_, end))
                    i = end + 1
                    continue
        i += 1
    if depth > 0:
        warn(f"{fname}: unbalanced '{{' at end of file")
    return found


def extract_definitions(tokens: Sequence[Token], diagnostics: list[str] | None = None) -> list[ProcedureDef]:
    """Procedure definitions at brace depth zero, in source order."""
    return [d for d, _, _ in _scan_definitions(_code_tokens(tokens), diagnostics)]


def count_calls(body_tokens: Sequence[Token]) -> Counter:
    """Occurrences of ``identifier (`` in a body, keywords and member
    accesses excluded."""
    calls: Counter = Counter()
    prev = None
    toks = body_tokens
    for k in range(len(toks) - 1):
        t = toks[k]
        if (
            t.kind is TokenKind.IDENTIFIER
            and t.text not in KEYWORDS
            and toks[k + 1].kind is TokenKind.PUNCTUATION
            and toks[k + 1].text == "("
            and not (prev is not None and prev.kind is TokenKind.PUNCTUATION and prev.text in MEMBER_ACCESS)
        ):
            calls[t.text] += 1
        if t.kind is not TokenKind.PREPROCESSOR:
            prev = t
    return calls


def extract_calls(definition: ProcedureDef, body_tokens: Sequence[Token]) -> list[CallRecord]:
    """Aggregated call records for one definition, sorted by callee name."""
    calls = count_calls(_code_tokens(body_tokens))
    return [CallRecord(definition.node_id, name, c) for name, c in sorted(calls.items())]


# --------------------------------------------------------------------------
# corpus


def _list_sources(root: Path, extensions: tuple[str, ...]) -> list[tuple[str, Path]]:
    suffixes = {"." + e for e in extensions}
    out = []
    for dirpath, dirnames, filenames in os.walk(root):
        dirnames.sort()
        for name in filenames:
            p = Path(dirpath, name)
            if p.suffix.lower() in suffixes and p.is_file():
                out.append((p.relative_to(root).as_posix(), p))
    out.sort(key=lambda item: item[0])
    return out


def _scan_file(job: tuple[str, str]) -> tuple[list[tuple[str, int, int, dict[str, int]]], list[str]]:
    relpath, path = job
    diagnostics: list[str] = []
    data = Path(path).read_bytes()
    toks = _code_tokens(tokenize(data, relpath, diagnostics))
    defs = []
    for d, open_, end in _scan_definitions(toks, diagnostics):
        defs.append((d.name, d.start_line, d.end_line, dict(count_calls(toks[open_ + 1 : end]))))
    return defs, diagnostics


def _worker_count() -> int:
    env = os.environ.get("PCN_THREADS")
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            log.warning("ignoring non-integer PCN_THREADS=%r", env)
    return os.cpu_count() or 1


def build_pcn(root: str | os.PathLike, config: ExtractorConfig | None = None) -> tuple[CallGraph, ExtractionReport]:
    """Scan every matching file below ``root`` into a procedure call network.

    Files are folded in sorted relative-path order, so node ids are the order
    of first definition.  Under the default global scope, procedures sharing a
    name are one node.  Calls to names without a definition are tallied in
    the report and never become nodes.
    """
    config = config or ExtractorConfig()
    root = Path(root)
    if not root.is_dir():
        raise CorpusNotFoundError(f"corpus not found: {root}")
    files = _list_sources(root, config.extensions)
    jobs = [(rel, str(p)) for rel, p in files]

    workers = min(_worker_count(), len(jobs))
    if workers > 1 and len(jobs) >= 32:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_scan_file, jobs, chunksize=16))
    else:
        results = [_scan_file(job) for job in jobs]

    report = ExtractionReport(files_scanned=len(jobs))
    node_of: dict[object, int] = {}
    names: list[str] = []
    procedures: list[ProcedureDef] = []
    pending: list[tuple[int, str, dict[str, int]]] = []
    by_name: dict[str, int] = {}  # file scope: first definition of a name anywhere
    for (relpath, _), (defs, diags) in zip(jobs, results):
        report.diagnostics.extend(diags)
        for name, start, end, calls in defs:
            key = name if config.scope == "global" else (relpath, name)
            node = node_of.get(key)
            if node is None:
                node = len(names)
                node_of[key] = node
                names.append(name if config.scope == "global" else f"{relpath}:{name}")
                procedures.append(ProcedureDef(name, relpath, start, end, node))
                by_name.setdefault(name, node)
            else:
                report.duplicate_definitions += 1
            pending.append((node, relpath, calls))

    if not names:
        raise EmptyCorpusError(f"empty corpus: no procedure definitions under {root}")

    edges: dict[tuple[int, int], int] = {}
    unresolved: Counter = Counter()
    total = 0
    for caller, relpath, calls in pending:
        for callee, c in calls.items():
            total += c
            if config.scope == "global":
                target = node_of.get(callee)
            else:
                target = node_of.get((relpath, callee), by_name.get(callee))
            if target is None:
                unresolved[callee] += c
            else:
                edges[(caller, target)] = edges.get((caller, target), 0) + c

    report.procedures_found = len(names)
    report.calls_total = total
    report.unresolved_calls = dict(sorted(unresolved.items()))
    report.procedures = tuple(procedures)
    for msg in report.diagnostics:
        log.info(msg)
    return CallGraph(len(names), tuple(names), dict(sorted(edges.items()))), report
