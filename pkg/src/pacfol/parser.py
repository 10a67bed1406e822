"""Text syntax for KBs, queries and ground atoms.

KB files hold one clause per line::

    # comments run to end of line
    forall x: Grad(x) | Prof(x)
    forall x: x != charles => Grad(x)
    forall x,y: (x = a & y = b) => R(x,y)
    forall : P(1)

Predicates start with an uppercase letter. Names are lowercase/digit tokens;
inside a clause a token is a variable iff it is declared after ``forall``.
Tokens starting with ``_`` are reserved for generated names and predicates.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from .syntax import (
    FALSE, TRUE, And, Atom, Const, Eq, ForallClause, Formula, Implies, Literal,
    LogicError, Name, Not, Or, ProperPlusKB, ValidationError, Var, predicates_of,
)

KEYWORDS = frozenset({"forall", "true", "false"})

_TOKEN = re.compile(r"\s*(?:(=>|!=|[=!&|(),:])|([A-Za-z0-9_]+))")
_PRED = re.compile(r"[A-Z][A-Za-z0-9_]*\Z")
_NAME = re.compile(r"[a-z0-9][a-z0-9_]*\Z")


class ParseError(LogicError):
    def __init__(self, message: str, line: int = 1, column: int = 1):
        super().__init__(f"line {line}, column {column}: {message}")
        self.line = line
        self.column = column


@dataclass
class _Tok:
    text: str
    col: int


def _tokenize(text: str, line: int) -> list[_Tok]:
    toks = []
    pos = 0
    end = len(text.rstrip())
    while pos < end:
        m = _TOKEN.match(text, pos)
        if m is None:
            col = len(text) - len(text[pos:].lstrip()) + 1
            raise ParseError(f"unexpected character {text[col - 1]!r}", line, col)
        start = m.start(1) if m.group(1) else m.start(2)
        toks.append(_Tok(m.group(1) or m.group(2), start + 1))
        pos = m.end()
    return toks


def is_name_token(tok: str) -> bool:
    return bool(_NAME.match(tok)) and tok not in KEYWORDS


class _Parser:
    def __init__(self, text: str, line: int = 1, variables: frozenset[str] = frozenset()):
        self.toks = _tokenize(text, line)
        self.i = 0
        self.line = line
        self.variables = variables
        self.eol = len(text) + 1

    def peek(self, offset: int = 0) -> str | None:
        j = self.i + offset
        return self.toks[j].text if j < len(self.toks) else None

    def error(self, msg: str) -> ParseError:
        col = self.toks[self.i].col if self.i < len(self.toks) else self.eol
        return ParseError(msg, self.line, col)

    def take(self, expected: str | None = None, what: str | None = None) -> str:
        """Consume one token; ``expected`` must match literally, ``what`` only names it."""
        tok = self.peek()
        if tok is None:
            raise self.error(f"expected {expected or what or 'token'}, found end of input")
        if expected is not None and tok != expected:
            raise self.error(f"expected {expected!r}, found {tok!r}")
        self.i += 1
        return tok

    def at_end(self) -> bool:
        return self.i >= len(self.toks)

    # terms and atoms

    def term(self, ground: bool):
        tok = self.take(what="term")
        if tok in self.variables:
            return Var(tok)
        if is_name_token(tok):
            return Name(tok)
        self.i -= 1
        if ground:
            raise self.error(f"non-ground term {tok!r} in query")
        raise self.error(f"invalid term {tok!r}")

    def atom(self, ground: bool) -> Atom:
        pred = self.take(what="predicate")
        if not _PRED.match(pred):
            self.i -= 1
            raise self.error(f"invalid predicate symbol {pred!r}")
        args = []
        if self.peek() == "(":
            self.take("(")
            if self.peek() != ")":  # P() is the same as P
                args.append(self.term(ground))
                while self.peek() == ",":
                    self.take(",")
                    args.append(self.term(ground))
            self.take(")")
        return Atom(pred, tuple(args))

    def literal(self) -> Literal:
        positive = True
        if self.peek() == "!":
            self.take("!")
            positive = False
        return Literal(self.atom(ground=False), positive)

    # guards

    def guard_or(self) -> Formula:
        f = self.guard_and()
        while self.peek() == "|":
            self.take("|")
            f = Or(f, self.guard_and())
        return f

    def guard_and(self) -> Formula:
        f = self.guard_unary()
        while self.peek() == "&":
            self.take("&")
            f = And(f, self.guard_unary())
        return f

    def guard_unary(self) -> Formula:
        if self.peek() == "!":
            self.take("!")
            return Not(self.guard_unary())
        if self.peek() == "(":
            self.take("(")
            f = self.guard_or()
            self.take(")")
            return f
        start = self.i
        left = self.take(what="equality")
        op = self.peek()
        if op not in ("=", "!="):
            self.i = start
            raise self.error("expected an equality 'var = name' in guard")
        self.take()
        right = self.take(what="name")
        if left not in self.variables or right in self.variables or not is_name_token(right):
            self.i = start
            raise ValidationError(
                f"line {self.line}: unacceptable equality {left} {op} {right}; guards only allow var = name")
        eq = Eq(Var(left), Name(right))
        return Not(eq) if op == "!=" else eq

    # ground queries

    def query_implies(self) -> Formula:
        f = self.query_or()
        if self.peek() == "=>":
            self.take("=>")
            return Implies(f, self.query_implies())
        return f

    def query_or(self) -> Formula:
        f = self.query_and()
        while self.peek() == "|":
            self.take("|")
            f = Or(f, self.query_and())
        return f

    def query_and(self) -> Formula:
        f = self.query_unary()
        while self.peek() == "&":
            self.take("&")
            f = And(f, self.query_unary())
        return f

    def query_unary(self) -> Formula:
        tok = self.peek()
        if tok == "!":
            self.take("!")
            return Not(self.query_unary())
        if tok == "(":
            self.take("(")
            f = self.query_implies()
            self.take(")")
            return f
        if tok == "true":
            self.take()
            return TRUE
        if tok == "false":
            self.take()
            return FALSE
        if tok is not None and self.peek(1) in ("=", "!="):
            left = self.term(ground=True)
            op = self.take()
            right = self.term(ground=True)
            # names are rigid: equality is token identity
            same = left == right
            return Const(same if op == "=" else not same)
        return self.atom(ground=True)


def _strip_comment(line: str) -> str:
    return line.split("#", 1)[0]


def parse_clause(text: str, line: int = 1, positive_only: bool = False) -> ForallClause:
    p = _Parser(text, line)
    p.take("forall")
    declared: list[str] = []
    if p.peek() != ":":
        declared.append(p.take(what="variable"))
        while p.peek() == ",":
            p.take(",")
            declared.append(p.take(what="variable"))
    for v in declared:
        if not is_name_token(v) or v.isdigit():
            raise ParseError(f"invalid variable {v!r}", line)
    if len(set(declared)) != len(declared):
        raise ParseError("duplicate variable in quantifier prefix", line)
    p.take(":")
    p.variables = frozenset(declared)

    guard: Formula = TRUE
    if any(t.text == "=>" for t in p.toks[p.i:]):
        guard = p.guard_or()
        p.take("=>")
    body = [p.literal()]
    while p.peek() == "|":
        p.take("|")
        body.append(p.literal())
    if not p.at_end():
        raise p.error(f"unexpected {p.peek()!r} after clause body")
    if positive_only and any(not lit.positive for lit in body):
        raise ValidationError(f"line {line}: negative literal in positive-only mode")
    return ForallClause(guard, tuple(body))


def parse_kb(text: str, positive_only: bool = False) -> ProperPlusKB:
    """Parse and validate a proper+ KB, one clause per non-blank line."""
    clauses = []
    for n, raw in enumerate(text.splitlines(), start=1):
        line = _strip_comment(raw)
        if line.strip():
            clauses.append(parse_clause(line, n, positive_only))
    if not clauses:
        raise ValidationError("empty KB: a proper+ KB needs at least one clause")
    kb = ProperPlusKB(tuple(clauses))
    predicates_of(kb)
    return kb


def parse_query(text: str) -> Formula:
    """Parse a ground query; ``name = name`` leaves are folded to constants."""
    body = " ".join(_strip_comment(line) for line in text.splitlines())
    p = _Parser(body)
    if p.at_end():
        raise ParseError("empty query")
    f = p.query_implies()
    if not p.at_end():
        raise p.error(f"unexpected {p.peek()!r}")
    predicates_of(f)
    return f


def parse_atom(text: str) -> Atom:
    """Parse a single ground atom such as ``Grad(logan)``."""
    p = _Parser(text)
    a = p.atom(ground=True)
    if not p.at_end():
        raise p.error(f"unexpected {p.peek()!r}")
    return a
