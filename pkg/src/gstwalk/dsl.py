"""Text formats: the graph DSL, edge-list files, time expressions, vertex lists.

Graph DSL examples::

    hypercube:3   doublestar:4   path:5   cycle:6   complete:4
    cbip:3,3      cmulti:3x2     paley:13 petersen  mckay
    product(A,B)  join(A,B)      complement(A)

Time expressions: ``1.25``, ``pi/2``, ``2pi/3``, ``-0.5pi``, ``pi/sqrt(2)``,
and the exact form ``2pi:p/q`` meaning 2*pi*p/q.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from pathlib import Path

from .graphs import GeneratorSpec, Graph, GraphParameterError, build, from_edges

__all__ = [
    "DSLSyntaxError",
    "ExactTime",
    "format_edge_list",
    "load_graph",
    "parse_edge_list",
    "parse_graph_dsl",
    "parse_permutations",
    "parse_time",
    "parse_vertex_list",
    "to_dsl",
]

# DSL name -> (family, arity of integer parameters)
_LEAVES = {
    "path": ("path", 1),
    "cycle": ("cycle", 1),
    "complete": ("complete", 1),
    "hypercube": ("hypercube", 1),
    "doublestar": ("double_star", 1),
    "paley": ("paley", 1),
    "cbip": ("complete_bipartite", 2),
    "cmulti": ("complete_multipartite", 2),
    "petersen": ("petersen", 0),
    "mckay": ("mckay", 0),
}
_OPS = {"product": 2, "join": 2, "complement": 1}
_NAMES = {fam: name for name, (fam, _) in _LEAVES.items()}

_TOKEN = re.compile(r"\s*(?:(?P<name>[A-Za-z_]+)|(?P<int>\d+)|(?P<sym>[:,()x]))")


class DSLSyntaxError(ValueError):
    def __init__(self, msg: str, text: str, pos: int):
        super().__init__(f"{msg} at position {pos}: {text!r}")
        self.pos = pos


def _tokenize(text: str) -> list[tuple[str, str, int]]:
    out = []
    pos = 0
    while pos < len(text):
        if text[pos:].strip() == "":
            break
        m = _TOKEN.match(text, pos)
        if not m:
            raise DSLSyntaxError("unexpected character", text, pos)
        kind = m.lastgroup
        val = m.group(kind)
        start = m.start(kind)
        # 'x' inside cmulti parameters arrives as a name token
        if kind == "name" and val == "x":
            kind = "sym"
        out.append((kind, val, start))
        pos = m.end()
    out.append(("end", "", len(text)))
    return out


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.toks = _tokenize(text)
        self.i = 0

    def peek(self, k: int = 0):
        return self.toks[min(self.i + k, len(self.toks) - 1)]

    def take(self, kind: str, val: str | None = None):
        tok = self.peek()
        if tok[0] != kind or (val is not None and tok[1] != val):
            want = val or kind
            raise DSLSyntaxError(f"expected {want!r}, found {tok[1] or 'end of input'!r}", self.text, tok[2])
        self.i += 1
        return tok

    def expr(self) -> GeneratorSpec:
        kind, name, pos = self.take("name")
        name = name.lower()
        if name in _OPS:
            self.take("sym", "(")
            kids = [self.expr()]
            while self.peek()[:2] == ("sym", ","):
                self.take("sym", ",")
                kids.append(self.expr())
            self.take("sym", ")")
            if len(kids) != _OPS[name]:
                raise DSLSyntaxError(
                    f"{name} takes {_OPS[name]} argument(s), got {len(kids)}", self.text, pos
                )
            return GeneratorSpec(name, (), tuple(kids))
        if name not in _LEAVES:
            raise DSLSyntaxError(f"unknown graph family {name!r}", self.text, pos)
        family, arity = _LEAVES[name]
        params: list[int] = []
        if self.peek()[:2] == ("sym", ":"):
            self.take("sym", ":")
            params.append(int(self.take("int")[1]))
            sep = "x" if name == "cmulti" else ","
            while self.peek()[:2] == ("sym", sep) and self.peek(1)[0] == "int":
                self.take("sym", sep)
                params.append(int(self.take("int")[1]))
        if len(params) != arity:
            raise DSLSyntaxError(
                f"{name} takes {arity} parameter(s), got {len(params)}", self.text, pos
            )
        return GeneratorSpec(family, tuple(params))


def parse_graph_dsl(text: str) -> GeneratorSpec:
    p = _Parser(text)
    spec = p.expr()
    tok = p.peek()
    if tok[0] != "end":
        raise DSLSyntaxError(f"trailing input {tok[1]!r}", text, tok[2])
    return spec


def to_dsl(spec: GeneratorSpec) -> str:
    if spec.family in _OPS:
        return f"{spec.family}(" + ",".join(to_dsl(c) for c in spec.children) + ")"
    if spec.family not in _NAMES:
        raise ValueError(f"{spec.family} has no DSL form")
    name = _NAMES[spec.family]
    if not spec.params:
        return name
    sep = "x" if name == "cmulti" else ","
    return f"{name}:" + sep.join(str(p) for p in spec.params)


# --------------------------------------------------------------- edge lists


def parse_edge_list(text: str) -> Graph:
    n = None
    edges = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        fields = line.split()
        if n is None:
            if len(fields) != 2 or fields[0] != "n":
                raise GraphParameterError(f"line {lineno}: expected 'n <count>' header")
            n = int(fields[1])
            continue
        if len(fields) != 2:
            raise GraphParameterError(f"line {lineno}: expected 'u v'")
        edges.append((int(fields[0]), int(fields[1])))
    if n is None:
        raise GraphParameterError("edge list is missing the 'n <count>' header")
    return from_edges(n, edges)


def format_edge_list(x: Graph) -> str:
    return f"n {x.n}\n" + "".join(f"{u} {v}\n" for u, v in x.edges())


def load_graph(source: str) -> Graph:
    """A DSL string, or ``@path`` to an edge-list file."""
    if source.startswith("@"):
        return parse_edge_list(Path(source[1:]).read_text())
    return build(parse_graph_dsl(source))


# ------------------------------------------------------------------- times


@dataclass(frozen=True)
class ExactTime:
    """The time ``2*pi*p/q``."""

    p: int
    q: int

    def __post_init__(self):
        if self.q < 1:
            raise ValueError("q must be positive")
        g = math.gcd(self.p, self.q)
        object.__setattr__(self, "p", self.p // g)
        object.__setattr__(self, "q", self.q // g)

    @property
    def value(self) -> float:
        return 2 * math.pi * self.p / self.q


_UNUM = r"(?:\d+(?:\.\d*)?|\.\d+)(?:[eE][+-]?\d+)?"
_NUM = r"[+-]?" + _UNUM
_EXACT = re.compile(r"^2pi:([+-]?\d+)/(\d+)$")
_PI = re.compile(
    rf"^(?P<sign>[+-])?(?P<coef>{_UNUM})?\*?pi"
    rf"(?:/(?:(?P<den>{_UNUM})|sqrt\((?P<root>{_UNUM})\)))?$"
)


def parse_time(text: str) -> float | ExactTime:
    s = text.strip().replace(" ", "").lower()
    m = _EXACT.match(s)
    if m:
        return ExactTime(int(m.group(1)), int(m.group(2)))
    if re.fullmatch(_NUM, s):
        return float(s)
    m = _PI.match(s)
    if not m:
        raise ValueError(f"malformed time expression {text!r}")
    val = math.pi * float(m.group("coef") or 1)
    if m.group("sign") == "-":
        val = -val
    if m.group("den"):
        val /= float(m.group("den"))
    elif m.group("root"):
        val /= math.sqrt(float(m.group("root")))
    return val


def parse_vertex_list(text: str) -> list[int]:
    text = text.strip()
    if text in ("", "-", "{}"):
        return []
    return [int(v) for v in re.split(r"[,\s]+", text.strip("{}[]")) if v]


def parse_permutations(text: str) -> list[tuple[int, ...]]:
    """One permutation per line as a 1-indexed image array; '#' starts a comment."""
    out = []
    for raw in text.splitlines():
        line = raw.split("#", 1)[0].strip().strip("[]")
        if line:
            out.append(tuple(int(v) for v in re.split(r"[,\s]+", line) if v))
    return out
