"""Reader for ``.ghom`` problem files.

A file is a sequence of ``[section]`` blocks made of ``key = value`` lines;
``#`` starts a comment.  The full grammar is documented in ``docs/format.md``.
"""

from __future__ import annotations

import os
import re
import warnings
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

from ghom.abelian import IntMatrix
from ghom.coeff import (
    CoefficientSystem,
    GradedCoefficientSystem,
    SystemSpec,
    constant_system,
    free_orbit_system,
    load_user_system,
)
from ghom.errors import GhomError, ParseError, ValidationError
from ghom.gcomplex import GSimplicialComplex, Simplex, SubcomplexPair, close
from ghom.groups import (
    FiniteGroup,
    FiniteGSet,
    Subgroup,
    group_from_permutations,
    group_from_table,
    parse_cycles,
)

BUILTIN_SYSTEMS = ("constant", "free-orbit")
_SECTION = re.compile(r"^\[\s*([A-Za-z][\w.]*)(?:\s+([\w.-]+))?\s*\]$")


class GhomWarning(UserWarning):
    """Recoverable problem reported in lenient mode."""


@dataclass
class Line:
    number: int
    text: str
    column: int = 1


@dataclass
class InputDocument:
    name: str
    description: str
    group: FiniteGroup
    complex: GSimplicialComplex
    sub: frozenset
    systems: dict[str, CoefficientSystem]
    graded: dict[str, GradedCoefficientSystem]
    aliases: dict[str, int] = field(default_factory=dict)
    warnings: list[str] = field(default_factory=list)
    path: str | None = None

    def system(self, name: str) -> CoefficientSystem:
        if name == "constant":
            return constant_system(self.group)
        if name == "free-orbit":
            return free_orbit_system(self.group)
        if name not in self.systems:
            known = ", ".join(list(BUILTIN_SYSTEMS) + sorted(self.systems))
            raise ValidationError(f"unknown system {name!r} (known: {known})")
        return self.systems[name]

    def pair(self, relative: bool = True) -> SubcomplexPair:
        return SubcomplexPair(self.complex, self.sub if relative else ())


def lenient_from_env() -> bool:
    return os.environ.get("GHOM_LENIENT", "") == "1"


def bundled_path(name: str) -> Path | None:
    """Path of a bundled example with the given file name, if any.

    The ``.ghom`` suffix may be omitted.
    """
    base = os.path.basename(name)
    root = resources.files("ghom") / "data"
    for candidate in (root / base, root / f"{base}.ghom"):
        if candidate.is_file():
            return Path(str(candidate))
    return None


def resolve_path(path: str | os.PathLike) -> Path:
    p = Path(path)
    if p.is_file():
        return p
    alt = bundled_path(str(path))
    if alt is not None:
        return alt
    raise ParseError(f"cannot read {path}: no such file", path=str(path))


def load(path: str | os.PathLike, lenient: bool | None = None) -> InputDocument:
    p = resolve_path(path)
    try:
        text = p.read_text(encoding="utf-8")
    except (OSError, UnicodeDecodeError) as exc:
        raise ParseError(f"cannot read {path}: {exc}", path=str(path)) from None
    return parse(text, lenient=lenient, path=str(p))


# -- tokens -------------------------------------------------------------------------

_OPEN = {"(": ")", "<": ">", "{": "}"}


def split_tokens(text: str, line: Line | None = None) -> list[str]:
    """Whitespace split that keeps bracketed groups ``(..)``, ``<..>``, ``{..}`` together."""
    out, cur, stack = [], [], []
    for ch in text:
        if ch in _OPEN:
            stack.append(_OPEN[ch])
        elif stack and ch == stack[-1]:
            stack.pop()
        elif ch in ")>}":
            raise _perr(f"unbalanced {ch!r}", line)
        if ch.isspace() and not stack:
            if cur:
                out.append("".join(cur))
                cur = []
        else:
            cur.append(ch)
    if stack:
        raise _perr("unbalanced bracket", line)
    if cur:
        out.append("".join(cur))
    # glue adjacent cycles such as "(0 1) (2 3)" into one permutation token
    glued: list[str] = []
    for tok in out:
        if glued and tok.startswith("(") and glued[-1].endswith(")") and glued[-1].startswith("("):
            glued[-1] += tok
        else:
            glued.append(tok)
    return glued


def _perr(msg: str, line: Line | None, path: str | None = None) -> ParseError:
    if line is None:
        return ParseError(msg, path=path)
    return ParseError(msg, line=line.number, column=line.column, path=path)


def parse_matrix(text: str, rows: int | None = None, cols: int | None = None,
                 line: Line | None = None) -> IntMatrix:
    """``1 0; 0 -1`` style matrix; a single number is a 1x1 matrix."""
    body = [r.split() for r in text.split(";")]
    try:
        entries = [[int(x) for x in r] for r in body if r]
    except ValueError:
        raise _perr(f"matrix entries must be integers: {text!r}", line) from None
    if not entries:
        if rows == 0 or cols == 0:
            return IntMatrix.zeros(rows or 0, cols or 0)
        raise _perr("empty matrix", line)
    width = len(entries[0])
    if any(len(r) != width for r in entries):
        raise _perr("matrix rows have different lengths", line)
    return IntMatrix(entries, len(entries), width)


# -- parser ---------------------------------------------------------------------------

class _Parser:
    def __init__(self, text: str, lenient: bool, path: str | None):
        self.lenient = lenient
        self.path = path
        self.warnings: list[str] = []
        self.sections: list[tuple[str, str | None, Line, list[tuple[str, str, Line]]]] = []
        self._split(text)

    def warn_or_fail(self, msg: str, line: Line) -> None:
        if self.lenient:
            full = f"{self.path or '<input>'}:{line.number}: {msg}"
            self.warnings.append(full)
            warnings.warn(full, GhomWarning, stacklevel=3)
        else:
            raise _perr(msg, line, self.path)

    def _split(self, text: str) -> None:
        current = None
        for i, raw in enumerate(text.splitlines(), start=1):
            stripped = raw.split("#", 1)[0].rstrip()
            if not stripped.strip():
                continue
            indent = len(stripped) - len(stripped.lstrip())
            s = stripped.strip()
            line = Line(i, s, indent + 1)
            if s.startswith("["):
                m = _SECTION.match(s)
                if not m:
                    raise _perr(f"malformed section header {s!r}", line, self.path)
                current = (m.group(1), m.group(2), line, [])
                self.sections.append(current)
                continue
            if current is None:
                raise _perr("content before the first section", line, self.path)
            if "=" in s:
                key, _, value = s.partition("=")
                key, value = key.strip(), value.strip()
                line.column = indent + 1
                if not key:
                    raise _perr("missing key before '='", line, self.path)
            else:
                key, value = s, ""
            current[3].append((key, value, line))

    def find(self, kind: str) -> list:
        return [sec for sec in self.sections if sec[0] == kind]


def parse(text: str, lenient: bool | None = None, path: str | None = None) -> InputDocument:
    """Parse and validate a document; raises :class:`ParseError` or :class:`ValidationError`."""
    if lenient is None:
        lenient = lenient_from_env()
    P = _Parser(text, lenient, path)
    known = {"meta", "group.table", "group.permutations", "complex", "subcomplex", "system",
             "graded"}
    for kind, _, line, _ in P.sections:
        if kind not in known:
            P.warn_or_fail(f"unknown section [{kind}]", line)
    name, description = _meta(P)
    group, aliases = _group(P)
    Vs, labels, seeds = _complex(P, group, aliases)
    try:
        X = close([s for s, _ in seeds], Vs, name=name)
    except GhomError as exc:
        raise ValidationError(f"{path or '<input>'}: {exc}") from None
    sub = _subcomplex(P, X, labels)
    systems = _systems(P, group, aliases)
    graded = _graded(P, systems, group)
    return InputDocument(name, description, group, X, sub, systems, graded, aliases,
                         P.warnings, path)


def _meta(P: _Parser) -> tuple[str, str]:
    name, description = "", ""
    for _, _, _, body in P.find("meta"):
        for key, value, line in body:
            if key == "name":
                name = value
            elif key == "description":
                description = value
            else:
                P.warn_or_fail(f"unknown key {key!r} in [meta]", line)
    if not name and P.path:
        name = Path(P.path).stem
    return name, description


def _group(P: _Parser) -> tuple[FiniteGroup, dict[str, int]]:
    tables, perms = P.find("group.table"), P.find("group.permutations")
    if len(tables) + len(perms) != 1:
        line = (tables + perms)[1][2] if len(tables) + len(perms) > 1 else Line(1, "")
        raise _perr("exactly one [group.table] or [group.permutations] section is required",
                    line, P.path)
    aliases: dict[str, int] = {}
    if perms:
        _, _, head, body = perms[0]
        degree, gens, names = None, [], []
        for key, value, line in body:
            if key == "degree":
                try:
                    degree = int(value)
                except ValueError:
                    raise _perr(f"degree must be an integer, got {value!r}", line, P.path) from None
            elif key.startswith("gen"):
                parts = key.split()
                if degree is None:
                    raise _perr("degree must precede the generators", line, P.path)
                try:
                    gens.append(parse_cycles(value, degree))
                except GhomError as exc:
                    raise _perr(str(exc), line, P.path) from None
                names.append(parts[1] if len(parts) > 1 else None)
            else:
                P.warn_or_fail(f"unknown key {key!r} in [group.permutations]", line)
        if degree is None:
            raise _perr("[group.permutations] needs 'degree = n'", head, P.path)
        try:
            G = group_from_permutations(degree, gens)
        except GhomError as exc:
            raise ValidationError(str(exc)) from None
        for nm, perm in zip(names, gens):
            if nm:
                aliases[nm] = G._perm_index[perm]
        return G, aliases
    _, _, head, body = tables[0]
    labels, rows = None, {}
    for key, value, line in body:
        if key == "elements":
            labels = value.split()
        elif key.startswith("row"):
            parts = key.split()
            if len(parts) != 2:
                raise _perr("expected 'row <element> = <products>'", line, P.path)
            rows[parts[1]] = (value.split(), line)
        else:
            P.warn_or_fail(f"unknown key {key!r} in [group.table]", line)
    if not labels:
        raise _perr("[group.table] needs 'elements = ...'", head, P.path)
    pos = {x: i for i, x in enumerate(labels)}
    table = []
    for x in labels:
        if x not in rows:
            raise _perr(f"missing row for element {x!r}", head, P.path)
        entries, line = rows[x]
        try:
            table.append([pos[y] for y in entries])
        except KeyError as exc:
            raise _perr(f"unknown element {exc.args[0]!r} in table row", line, P.path) from None
    try:
        G = group_from_table(table, labels)
    except GhomError as exc:
        raise ValidationError(str(exc)) from None
    return G, {x: i for i, x in enumerate(labels)}


def resolve_element(G: FiniteGroup, aliases: dict[str, int], token: str) -> int:
    if token in aliases:
        return aliases[token]
    return G.element(token)


def resolve_subgroup(G: FiniteGroup, aliases: dict[str, int], token: str) -> Subgroup:
    """``e``, ``G``, ``<g, h>`` (generated) or ``{a, b, ...}`` (explicit, must be closed)."""
    token = token.strip()
    if token == "e":
        return G.trivial
    if token == "G":
        return G.whole
    if token.startswith("<") and token.endswith(">"):
        elems = [resolve_element(G, aliases, t) for t in _items(token[1:-1])]
        return G.generated(elems)
    if token.startswith("{") and token.endswith("}"):
        elems = [resolve_element(G, aliases, t) for t in _items(token[1:-1])]
        return G.subgroup(elems)
    raise ValidationError(f"cannot read subgroup {token!r}; use e, G, <gens> or {{elements}}")


def _items(body: str) -> list[str]:
    items, depth, cur = [], 0, []
    for ch in body:
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
        if ch == "," and depth == 0:
            items.append("".join(cur).strip())
            cur = []
        else:
            cur.append(ch)
    if "".join(cur).strip():
        items.append("".join(cur).strip())
    return [i for i in items if i]


def _complex(P: _Parser, G: FiniteGroup, aliases: dict[str, int]):
    secs = P.find("complex")
    if len(secs) != 1:
        raise _perr("exactly one [complex] section is required",
                    secs[1][2] if secs else Line(1, ""), P.path)
    _, _, head, body = secs[0]
    labels = None
    actions: dict[int, tuple[int, ...]] = {}
    seeds: list[tuple[tuple[int, ...], Line]] = []
    seen: set[frozenset] = set()
    for key, value, line in body:
        if key == "vertices":
            labels = value.split()
            if len(set(labels)) != len(labels):
                raise ValidationError(f"line {line.number}: repeated vertex name")
        elif key.startswith("action"):
            if labels is None:
                raise _perr("'vertices' must precede actions", line, P.path)
            parts = key.split(None, 1)
            if len(parts) != 2:
                raise _perr("expected 'action <element> = <permutation>'", line, P.path)
            try:
                g = resolve_element(G, aliases, parts[1])
            except GhomError as exc:
                raise ValidationError(f"line {line.number}: {exc}") from None
            actions[g] = _vertex_perm(value, labels, line, P.path)
        elif key == "simplex":
            if labels is None:
                raise _perr("'vertices' must precede simplices", line, P.path)
            seq = _vertices(value, labels, line, P.path)
            if frozenset(seq) in seen:
                P.warn_or_fail(f"duplicate simplex {value!r}", line)
                continue
            seen.add(frozenset(seq))
            seeds.append((seq, line))
        else:
            P.warn_or_fail(f"unknown key {key!r} in [complex]", line)
    if labels is None:
        raise _perr("[complex] needs 'vertices = ...'", head, P.path)
    try:
        Vs = FiniteGSet.from_generators(G, len(labels), actions, labels)
    except GhomError as exc:
        raise ValidationError(f"vertex action: {exc}") from None
    return Vs, labels, seeds


def _vertices(value: str, labels: list[str], line: Line, path) -> tuple[int, ...]:
    names = value.split()
    if not names:
        raise _perr("empty simplex", line, path)
    out = []
    for nm in names:
        if nm not in labels:
            raise _perr(f"unknown vertex {nm!r}", line, path)
        out.append(labels.index(nm))
    if len(set(out)) != len(out):
        raise _perr("simplex repeats a vertex", line, path)
    return tuple(out)


def _vertex_perm(value: str, labels: list[str], line: Line, path) -> tuple[int, ...]:
    pos = {x: i for i, x in enumerate(labels)}
    n = len(labels)
    if "(" in value:
        perm = list(range(n))
        for cyc in re.findall(r"\(([^)]*)\)", value):
            pts = cyc.replace(",", " ").split()
            try:
                idx = [pos[x] for x in pts]
            except KeyError as exc:
                raise _perr(f"unknown vertex {exc.args[0]!r} in action", line, path) from None
            for a, b in zip(idx, idx[1:] + idx[:1]):
                perm[a] = b
        return tuple(perm)
    imgs = value.split()
    if len(imgs) != n:
        raise _perr(f"action lists {len(imgs)} images for {n} vertices", line, path)
    try:
        return tuple(pos[x] for x in imgs)
    except KeyError as exc:
        raise _perr(f"unknown vertex {exc.args[0]!r} in action", line, path) from None


def _subcomplex(P: _Parser, X: GSimplicialComplex, labels: list[str]) -> frozenset:
    secs = P.find("subcomplex")
    out: set[frozenset] = set()
    for _, _, _, body in secs:
        for key, value, line in body:
            if key != "simplex":
                P.warn_or_fail(f"unknown key {key!r} in [subcomplex]", line)
                continue
            seq = _vertices(value, labels, line, P.path)
            if Simplex(seq) not in X.order:
                raise ValidationError(f"line {line.number}: subcomplex simplex {value!r} "
                                      f"is not a simplex of the complex")
            for g in X.group.elements:
                t = X.translate(g, seq)
                out.update(_faces(t))
    return frozenset(out)


def _faces(s: frozenset) -> list[frozenset]:
    items = sorted(s)
    out = []
    for mask in range(1, 1 << len(items)):
        out.append(frozenset(x for i, x in enumerate(items) if mask >> i & 1))
    return out


def _systems(P: _Parser, G: FiniteGroup, aliases: dict[str, int]) -> dict[str, CoefficientSystem]:
    out = {}
    for _, name, head, body in P.find("system"):
        if not name:
            raise _perr("system sections need a name: [system NAME]", head, P.path)
        if name in BUILTIN_SYSTEMS or name in out:
            raise ValidationError(f"line {head.number}: system name {name!r} is already in use")
        spec = SystemSpec(name)
        ranks: dict[Subgroup, int] = {}
        for key, value, line in body:
            toks = split_tokens(key, line)
            try:
                if toks and toks[0] == "value":
                    rest = split_tokens(line.text, line)[1:]
                    if len(rest) != 2 or not rest[1].startswith("rank="):
                        raise _perr("expected 'value <subgroup> rank=<k>'", line, P.path)
                    H = resolve_subgroup(G, aliases, rest[0])
                    k = int(rest[1][5:])
                    if k < 0:
                        raise _perr("rank must be non-negative", line, P.path)
                    spec.values.append((H, k))
                    ranks[H] = k
                elif toks and toks[0] == "kappa":
                    if len(toks) != 3:
                        raise _perr("expected 'kappa <H> <K> = <matrix>'", line, P.path)
                    H = resolve_subgroup(G, aliases, toks[1])
                    K = resolve_subgroup(G, aliases, toks[2])
                    spec.kappas.append((H, K, parse_matrix(value, line=line)))
                elif toks and toks[0] == "mu":
                    if len(toks) != 3:
                        raise _perr("expected 'mu <element> <H> = <matrix>'", line, P.path)
                    g = resolve_element(G, aliases, toks[1])
                    H = resolve_subgroup(G, aliases, toks[2])
                    spec.mus.append((g, H, parse_matrix(value, line=line)))
                else:
                    P.warn_or_fail(f"unknown key {key!r} in [system {name}]", line)
            except ValueError:
                raise _perr(f"cannot read {key!r}", line, P.path) from None
            except ParseError:
                raise
            except GhomError as exc:
                raise ValidationError(f"line {line.number}: {exc}") from None
        try:
            out[name] = load_user_system(spec, G)
        except GhomError as exc:
            raise ValidationError(f"system {name!r} (line {head.number}): {exc}") from None
    return out


def _graded(P: _Parser, systems: dict[str, CoefficientSystem], G: FiniteGroup
            ) -> dict[str, GradedCoefficientSystem]:
    out = {}
    for _, name, head, body in P.find("graded"):
        if not name:
            raise _perr("graded sections need a name: [graded NAME]", head, P.path)
        rows = {}
        for key, value, line in body:
            parts = key.split()
            if len(parts) != 2 or parts[0] != "row":
                P.warn_or_fail(f"unknown key {key!r} in [graded {name}]", line)
                continue
            try:
                q = int(parts[1])
            except ValueError:
                raise _perr(f"row index must be an integer, got {parts[1]!r}", line,
                            P.path) from None
            if q < 0:
                raise ValidationError(f"line {line.number}: row index must be non-negative")
            if value == "constant":
                rows[q] = constant_system(G)
            elif value == "free-orbit":
                rows[q] = free_orbit_system(G)
            elif value in systems:
                rows[q] = systems[value]
            else:
                raise ValidationError(f"line {line.number}: unknown system {value!r}")
        out[name] = GradedCoefficientSystem(rows, name)
    return out
