"""
Text formats for terms, functions, sets and graphs.

    pt  fin(3)  omega  pairs+  lim(T)  sum(T, T, ...)
    fn over lim(pt) -> omega+1 { inf: w, exc: {0: 5}, tail: approach(base=1) }
    set over lim(pt) { inf: true, exc: {0: false}, tail: parity(even) }

Graphs use the JSON layout of graph_to_json. Every printer is the inverse of
the matching parser on normalized values.
"""

import json
import logging
import re
from fractions import Fraction

from . import settings
from .errors import EmbEngineError, ParseError
from .fn_rep import (
    Approach,
    ApproachDesc,
    Const,
    FinCod,
    FnFin,
    FnLim,
    FnOmega,
    FnPt,
    FnRep,
    FnSum,
    NatCod,
    OmegaPlusOneCod,
    Periodic,
    RationalsCod,
    W,
)
from .graph import graph_from_json, graph_to_json
from .set_rep import Alt, SetFin, SetLim, SetPt, SetSum, check_set, constant_set
from .space_term import (  # noqa: F401
    EmptyTerm,
    Fin,
    Lim,
    Omega,
    PairsPlus,
    Pt,
    Sum,
    format_address,
    parse_address,
)

logger = logging.getLogger(__name__)

TOKEN_RE = re.compile(
    r"(?P<ws>\s+)"
    r"|(?P<arrow>->)"
    r"|(?P<num>-?\d+(?:/\d+)?)"
    r"|(?P<word>omega\+1|pairs\+|[A-Za-z_][A-Za-z0-9_]*)"
    r"|(?P<punct>[(){}\[\],:=])"
)


# ============================================================
# Tokens
# ============================================================
def tokenize(text):
    """List of (kind, text, line, column); raises ParseError on a stray character."""
    tokens = []
    pos, line, col = 0, 1, 1
    while pos < len(text):
        m = TOKEN_RE.match(text, pos)
        if m is None:
            raise ParseError(f"unexpected character {text[pos]!r}", line, col)
        chunk = m.group()
        if m.lastgroup != "ws":
            tokens.append((m.lastgroup, chunk, line, col))
        newlines = chunk.count("\n")
        if newlines:
            line += newlines
            col = len(chunk) - chunk.rfind("\n")
        else:
            col += len(chunk)
        pos = m.end()
    tokens.append(("end", "", line, col))
    return tokens


class Cursor:
    def __init__(self, text):
        self.tokens = tokenize(text)
        self.pos = 0

    @property
    def tok(self):
        return self.tokens[self.pos]

    def peek(self, text):
        return self.tok[1] == text

    def fail(self, message):
        _, found, line, col = self.tok
        raise ParseError(f"{message}, found {found or 'end of input'!r}", line, col)

    def take(self, text=None, kind=None):
        tok = self.tok
        if (text is not None and tok[1] != text) or (kind is not None and tok[0] != kind):
            self.fail(f"expected {text or kind}")
        self.pos += 1
        return tok[1]

    def accept(self, text):
        if self.peek(text):
            self.pos += 1
            return True
        return False

    def integer(self):
        text = self.take(kind="num")
        if "/" in text:
            self.pos -= 1
            self.fail("expected an integer")
        return int(text)

    def done(self):
        if self.tok[0] != "end":
            self.fail("expected end of input")


def _guard(parse):
    """Turn domain errors raised while building values into ParseErrors at the cursor."""

    def run(cur, *args):
        start = cur.tok
        try:
            return parse(cur, *args)
        except ParseError:
            raise
        except EmbEngineError as e:
            raise ParseError(str(e), start[2], start[3])

    return run


def _listed(cur, open_, close, item):
    cur.take(open_)
    out = []
    if not cur.peek(close):
        out.append(item())
        while cur.accept(","):
            out.append(item())
    cur.take(close)
    return out


# ============================================================
# Terms
# ============================================================
@_guard
def _term(cur):
    word = cur.take(kind="word")
    if word == "pt":
        return Pt()
    if word == "omega":
        return Omega()
    if word == "pairs+":
        return PairsPlus()
    if word == "empty":
        return EmptyTerm()
    if word == "fin":
        cur.take("(")
        n = cur.integer()
        cur.take(")")
        return Fin(n)
    if word == "lim":
        cur.take("(")
        t = _term(cur)
        cur.take(")")
        return Lim(t)
    if word == "sum":
        return Sum(tuple(_listed(cur, "(", ")", lambda: _term(cur))))
    cur.pos -= 1
    cur.fail("expected a term")


def parse_term(text):
    cur = Cursor(text)
    t = _term(cur)
    cur.done()
    return t


def format_term(t):
    if isinstance(t, Pt):
        return "pt"
    if isinstance(t, Omega):
        return "omega"
    if isinstance(t, PairsPlus):
        return "pairs+"
    if isinstance(t, EmptyTerm):
        return "empty"
    if isinstance(t, Fin):
        return f"fin({t.n})"
    if isinstance(t, Lim):
        return f"lim({format_term(t.t)})"
    return "sum(" + ", ".join(format_term(s) for s in t.ts) + ")"


# ============================================================
# Values and codomains
# ============================================================
def _value(cur):
    if cur.accept("w"):
        return W
    text = cur.take(kind="num")
    if "/" in text:
        p, q = text.split("/")
        if int(q) == 0:
            cur.pos -= 1
            cur.fail("zero denominator")
        v = Fraction(int(p), int(q))
        return int(v) if v.denominator == 1 else v
    return int(text)


def parse_value(text):
    cur = Cursor(text)
    v = _value(cur)
    cur.done()
    return v


def format_value(v):
    if v is W:
        return "w"
    if isinstance(v, Fraction) and v.denominator != 1:
        return f"{v.numerator}/{v.denominator}"
    return str(int(v))


def _codomain(cur):
    word = cur.take(kind="word")
    for cls in (OmegaPlusOneCod, RationalsCod, NatCod):
        if word == format_codomain(cls()):
            return cls()
    if word == settings.codomain_symbol("Fin"):
        cur.take("(")
        k = cur.integer()
        cur.take(")")
        return FinCod(k)
    cur.pos -= 1
    cur.fail("expected a codomain")


def parse_codomain(text):
    cur = Cursor(text)
    cod = _codomain(cur)
    cur.done()
    return cod


def format_codomain(cod):
    if isinstance(cod, OmegaPlusOneCod):
        return settings.codomain_symbol("OmegaPlusOne")
    if isinstance(cod, RationalsCod):
        return settings.codomain_symbol("Rationals")
    if isinstance(cod, NatCod):
        return settings.codomain_symbol("Nat")
    return f"{settings.codomain_symbol('Fin')}({cod.k})"


# ============================================================
# Functions
# ============================================================
def _fields(cur, names, item):
    """``{name: item, ...}`` with each name at most once, in any order."""
    out = {}
    cur.take("{")
    while not cur.peek("}"):
        name = cur.take(kind="word")
        if name not in names or name in out:
            cur.pos -= 1
            cur.fail(f"expected one of {', '.join(n for n in names if n not in out)}")
        cur.take(":")
        out[name] = item(name)
        if not cur.accept(","):
            break
    cur.take("}")
    return out


def _exceptions(cur, item):
    table = {}
    cur.take("{")
    while not cur.peek("}"):
        n = cur.integer()
        cur.take(":")
        if n in table:
            cur.pos -= 2
            cur.fail(f"duplicate exception {n}")
        table[n] = item()
        if not cur.accept(","):
            break
    cur.take("}")
    return tuple(sorted(table.items(), key=lambda e: e[0]))


def _approach(cur):
    cur.take("(")
    opts = {}
    while not cur.peek(")"):
        key = cur.take(kind="word")
        if key not in ("base", "sign", "limit"):
            cur.pos -= 1
            cur.fail("expected base, sign or limit")
        cur.take("=")
        opts[key] = _value(cur) if key == "limit" else cur.integer()
        if not cur.accept(","):
            break
    cur.take(")")
    return Approach(ApproachDesc(opts.get("base", 0), opts.get("sign", -1), opts.get("limit")))


def _fn_tail(cur, child):
    if cur.accept("approach"):
        return _approach(cur)
    if cur.accept("uniform"):
        cur.take("(")
        node = _fn_body(cur, child)
        cur.take(")")
        return Periodic(node, node)
    if cur.accept("parity"):
        cur.take("(")
        even = _fn_body(cur, child)
        cur.take(",")
        odd = _fn_body(cur, child)
        cur.take(")")
        return Periodic(even, odd)
    return Const(_value(cur))


def _fn_body(cur, t):
    if isinstance(t, Pt):
        return FnPt(_value(cur))
    if isinstance(t, Fin):
        return FnFin(tuple(_listed(cur, "[", "]", lambda: _value(cur))))
    if isinstance(t, Sum):
        return FnSum(tuple(_branches(cur, len(t.ts), lambda i: _fn_body(cur, t.ts[i]))))
    if isinstance(t, Omega):
        got = _fields(cur, ("exc", "tail"), lambda name: (
            _exceptions(cur, lambda: _value(cur)) if name == "exc" else _fn_tail(cur, None)))
        if "tail" not in got:
            cur.fail("omega nodes need a tail")
        return FnOmega(got.get("exc", ()), got["tail"])
    if isinstance(t, Lim):
        got = _fields(cur, ("inf", "exc", "tail"), lambda name: (
            _value(cur) if name == "inf"
            else _exceptions(cur, lambda: _fn_body(cur, t.t)) if name == "exc"
            else _fn_tail(cur, t.t)))
        if "inf" not in got or "tail" not in got:
            cur.fail("lim nodes need inf and tail")
        return FnLim(got["inf"], got.get("exc", ()), got["tail"])
    cur.fail(f"no function bodies over {format_term(t)}")


def _branches(cur, count, item):
    parts = {}
    cur.take("{")
    while not cur.peek("}"):
        cur.take("[")
        i = cur.integer()
        cur.take("]")
        cur.take(":")
        if i in parts or not 0 <= i < count:
            cur.pos -= 4
            cur.fail(f"bad or repeated branch {i}")
        parts[i] = item(i)
        if not cur.accept(","):
            break
    cur.take("}")
    if len(parts) != count:
        cur.fail(f"sum needs {count} branches, got {len(parts)}")
    return [parts[i] for i in range(count)]


@_guard
def _fn(cur):
    cur.take("fn")
    cur.take("over")
    t = _term(cur)
    cur.take("->")
    cod = _codomain(cur)
    return FnRep(t, cod, _fn_body(cur, t))


def parse_fn(text):
    cur = Cursor(text)
    f = _fn(cur)
    cur.done()
    return f


def _format_tail(cod, tail):
    if isinstance(tail, Const):
        return format_value(tail.value)
    if isinstance(tail, Periodic):
        if tail.even == tail.odd:
            return f"uniform({_format_body(cod, tail.even)})"
        return f"parity({_format_body(cod, tail.even)}, {_format_body(cod, tail.odd)})"
    d = tail.desc
    parts = [f"base={d.base}"]
    if isinstance(cod, RationalsCod):
        parts += [f"sign={d.sign}", f"limit={format_value(d.limit)}"]
    return f"approach({', '.join(parts)})"


def _format_exc(exc, item):
    return "{" + ", ".join(f"{n}: {item(x)}" for n, x in exc) + "}"


def _format_body(cod, node):
    if isinstance(node, FnPt):
        return format_value(node.value)
    if isinstance(node, FnFin):
        return "[" + ", ".join(format_value(v) for v in node.values) + "]"
    if isinstance(node, FnSum):
        return "{" + ", ".join(f"[{i}]: {_format_body(cod, p)}"
                               for i, p in enumerate(node.parts)) + "}"
    fields = []
    if isinstance(node, FnLim):
        fields.append(f"inf: {format_value(node.inf)}")
        if node.exc:
            fields.append("exc: " + _format_exc(node.exc, lambda x: _format_body(cod, x)))
    elif node.exc:
        fields.append("exc: " + _format_exc(node.exc, format_value))
    fields.append(f"tail: {_format_tail(cod, node.tail)}")
    return "{ " + ", ".join(fields) + " }"


def format_fn(f):
    return (f"fn over {format_term(f.domain)} -> {format_codomain(f.codomain)} "
            f"{_format_body(f.codomain, f.body)}")


# ============================================================
# Sets
# ============================================================
def _flag(cur):
    if cur.accept("true"):
        return True
    if cur.accept("false"):
        return False
    cur.fail("expected true or false")


def _set_tail(cur, child):
    if cur.accept("parity"):
        cur.take("(")
        side = cur.take(kind="word")
        if side not in ("even", "odd"):
            cur.pos -= 1
            cur.fail("expected even or odd")
        cur.take(")")
        full, none = constant_set(child, True), constant_set(child, False)
        return Alt(full, none) if side == "even" else Alt(none, full)
    if cur.accept("alt"):
        cur.take("(")
        even = _set_body(cur, child)
        cur.take(",")
        odd = _set_body(cur, child)
        cur.take(")")
        return Alt(even, odd)
    return _set_body(cur, child)


def _set_body(cur, t):
    if isinstance(t, Pt):
        return SetPt(_flag(cur))
    if isinstance(t, Fin):
        return SetFin(tuple(_listed(cur, "[", "]", lambda: _flag(cur))))
    if isinstance(t, Sum):
        return SetSum(tuple(_branches(cur, len(t.ts), lambda i: _set_body(cur, t.ts[i]))))
    if isinstance(t, Lim):
        got = _fields(cur, ("inf", "exc", "tail"), lambda name: (
            _flag(cur) if name == "inf"
            else _exceptions(cur, lambda: _set_body(cur, t.t)) if name == "exc"
            else _set_tail(cur, t.t)))
        if "inf" not in got or "tail" not in got:
            cur.fail("lim nodes need inf and tail")
        return SetLim(got["inf"], got.get("exc", ()), got["tail"])
    cur.fail(f"no sets over {format_term(t)}")


@_guard
def _set(cur):
    cur.take("set")
    cur.take("over")
    t = _term(cur)
    return t, check_set(t, _set_body(cur, t))


def parse_set(text):
    """Returns (term, set)."""
    cur = Cursor(text)
    out = _set(cur)
    cur.done()
    return out


def _format_set_body(t, s):
    if isinstance(s, SetPt):
        return "true" if s.member else "false"
    if isinstance(s, SetFin):
        return "[" + ", ".join("true" if m else "false" for m in s.members) + "]"
    if isinstance(s, SetSum):
        return "{" + ", ".join(f"[{i}]: {_format_set_body(t.ts[i], p)}"
                               for i, p in enumerate(s.parts)) + "}"
    fields = [f"inf: {'true' if s.inf else 'false'}"]
    if s.exc:
        fields.append("exc: " + _format_exc(s.exc, lambda x: _format_set_body(t.t, x)))
    tail = s.tail
    if isinstance(tail, Alt):
        full, none = constant_set(t.t, True), constant_set(t.t, False)
        if (tail.even, tail.odd) == (full, none):
            text = "parity(even)"
        elif (tail.even, tail.odd) == (none, full):
            text = "parity(odd)"
        else:
            text = f"alt({_format_set_body(t.t, tail.even)}, {_format_set_body(t.t, tail.odd)})"
    else:
        text = _format_set_body(t.t, tail)
    fields.append(f"tail: {text}")
    return "{ " + ", ".join(fields) + " }"


def format_set(t, s):
    return f"set over {format_term(t)} {_format_set_body(t, s)}"


# ============================================================
# Graphs
# ============================================================
def parse_graph(text):
    try:
        data = json.loads(text)
    except json.JSONDecodeError as e:
        raise ParseError(f"graph is not valid JSON: {e.msg}", e.lineno, e.colno)
    return graph_from_json(data)


def format_graph(g):
    return json.dumps(graph_to_json(g), sort_keys=True)


# ============================================================
# Files
# ============================================================
def read_text(path):
    try:
        with open(path, "r", encoding="utf-8") as f:
            return f.read()
    except FileNotFoundError:
        raise FileNotFoundError(f"Input file not found: {path}")
    except UnicodeDecodeError as e:
        raise ParseError(f"{path} is not UTF-8 text: {e.reason} at byte {e.start}")


def load_term(path):
    return parse_term(read_text(path))


def load_fn(path):
    return parse_fn(read_text(path))


def load_set(path):
    return parse_set(read_text(path))
