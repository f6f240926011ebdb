"""Lexer and recursive-descent parser for cell constraint text.

Grammar (canonical spellings; keywords case-insensitive, whitespace free):

    formula     = [ constraint { ";" constraint } ]
    constraint  = domain | builtin | relation
    domain      = "[" item { "," item } "]"
    item        = value [ ".." value ]
    builtin     = ALLDIFFERENT "(" cells ")"
                | MEMBER "(" value "," cells ")"
                | (COUNT | FREQUENCY) "(" value "," cells "," relop "," int ")"
                | SUBLIST "(" "[" value { "," value } "]" "," cells ")"
                | IF "(" relation ")" THEN "(" relation ")"
                | SUM "(" cells ")" ("=" | "!=" | "<>") value
                | INTABLE "(" name "," cells ")"
    relation    = expr relop expr
    relop       = "=" | "!=" | "<>" | "<" | "<=" | ">" | ">="
    expr        = term { ("+" | "-") term }
    term        = factor { ("*" | "/" | MOD) factor }
    factor      = value | cellref | "(" expr ")"
    cells       = "[" cellitem { "," cellitem } "]"
    cellitem    = cellref [ ":" cellref ]
    value       = ["-"] number | symbol

A bare identifier is a cell reference when it has the shape of one
(one to three letters then digits, within grid bounds); otherwise it is
a symbol to be resolved through a map table.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction

from ..fd.model import Relop
from .ast import (
    MAX_COL,
    MAX_DENOMINATOR,
    MAX_ROW,
    Add,
    AllDifferent,
    CellRef,
    ConstraintAst,
    Count,
    DomainLit,
    Expr,
    FloorDiv,
    IfThen,
    InTable,
    IntLit,
    Member,
    Mod,
    Mul,
    Relation,
    Sub,
    Sublist,
    SumRel,
    SymbolLit,
    ValueLit,
    ValueRange,
    letters_to_col,
    number_lit,
)


class ParseError(ValueError):
    """Syntax error with the offset it occurred at and what was expected."""

    def __init__(self, message: str, position: int, expected: tuple[str, ...] = ()):
        super().__init__(f"{message} at offset {position}")
        self.position = position
        self.expected = expected


KEYWORDS = {
    "ALLDIFFERENT",
    "MEMBER",
    "COUNT",
    "FREQUENCY",
    "SUBLIST",
    "IF",
    "THEN",
    "SUM",
    "MOD",
    "INTABLE",
}

BUILTIN_NAMES = KEYWORDS - {"MOD", "THEN"}


@dataclass(frozen=True)
class Token:
    kind: str
    text: str
    pos: int


_TOKEN_RE = re.compile(
    r"""
    (?P<WS>\s+)
  | (?P<NUMBER>\d+\.\d+|\d+)
  | (?P<CELLREF>\$[A-Za-z]{1,3}\$?\d+|[A-Za-z]{1,3}\$\d+)
  | (?P<IDENT>[A-Za-z][A-Za-z0-9_]*)
  | (?P<DOTDOT>\.\.)
  | (?P<RELOP><=|>=|<>|!=|<|>|=)
  | (?P<PUNCT>[()\[\],;:+\-*/])
    """,
    re.VERBOSE,
)

_MOD_GLUED_RE = re.compile(r"(?i)^MOD(\d+)$")
_CELL_SHAPE_RE = re.compile(r"^([A-Za-z]{1,3})(\d+)$")


def lex(text: str) -> list[Token]:
    tokens: list[Token] = []
    pos = 0
    n = len(text)
    while pos < n:
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            raise ParseError(f"unexpected character {text[pos]!r}", pos)
        kind = m.lastgroup
        lexeme = m.group()
        if kind == "WS":
            pos = m.end()
            continue
        if kind == "IDENT":
            glued = _MOD_GLUED_RE.match(lexeme)
            if glued:
                # "MOD10" is the operator followed by a number (Fig-style
                # spelling with no space).
                tokens.append(Token("IDENT", lexeme[:3], pos))
                tokens.append(Token("NUMBER", glued.group(1), pos + 3))
                pos = m.end()
                continue
        if kind == "PUNCT":
            kind = lexeme
        tokens.append(Token(kind, lexeme, pos))
        pos = m.end()
    return tokens


def _cell_shape(text: str) -> "CellRef | None":
    m = _CELL_SHAPE_RE.match(text)
    if not m:
        return None
    col = letters_to_col(m.group(1))
    row = int(m.group(2))
    if not (1 <= col <= MAX_COL and 1 <= row <= MAX_ROW):
        return None
    return CellRef(col, row)


_RELOPS = {
    "=": Relop.EQ,
    "!=": Relop.NE,
    "<>": Relop.NE,
    "<": Relop.LT,
    "<=": Relop.LE,
    ">": Relop.GT,
    ">=": Relop.GE,
}


class _Parser:
    def __init__(self, text: str, tokens: list[Token]):
        self.text = text
        self.tokens = tokens
        self.i = 0

    # -- token plumbing ----------------------------------------------------

    def peek(self, ahead: int = 0) -> "Token | None":
        j = self.i + ahead
        return self.tokens[j] if j < len(self.tokens) else None

    def at(self, kind: str) -> bool:
        tok = self.peek()
        return tok is not None and tok.kind == kind

    def at_end(self) -> bool:
        return self.i >= len(self.tokens)

    def advance(self) -> Token:
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def error(self, message: str, expected: tuple[str, ...] = ()) -> ParseError:
        pos = self.peek().pos if self.peek() else len(self.text)
        return ParseError(message, pos, expected)

    def expect(self, kind: str, what: str) -> Token:
        if not self.at(kind):
            raise self.error(f"expected {what}", (what,))
        return self.advance()

    # -- entry points ------------------------------------------------------

    def formula(self) -> list[ConstraintAst]:
        out: list[ConstraintAst] = []
        while not self.at_end():
            if self.at(";"):
                self.advance()
                continue
            out.append(self.constraint())
            if not self.at_end() and not self.at(";"):
                raise self.error("expected ';' between constraints", (";",))
        return out

    def constraint(self) -> ConstraintAst:
        if self.at("["):
            return self.domain_literal()
        tok = self.peek()
        if tok is not None and tok.kind == "IDENT":
            nxt = self.peek(1)
            if nxt is not None and nxt.kind == "(":
                name = tok.text.upper()
                if name == "IF":
                    return self.if_then()
                if name == "SUM":
                    return self.sum_rel()
                if name in ("COUNT", "FREQUENCY"):
                    return self.count()
                if name == "ALLDIFFERENT":
                    return self.alldifferent()
                if name == "MEMBER":
                    return self.member()
                if name == "SUBLIST":
                    return self.sublist()
                if name == "INTABLE":
                    return self.intable()
                raise ParseError(
                    f"unknown function {tok.text!r}",
                    tok.pos,
                    tuple(sorted(BUILTIN_NAMES)),
                )
        return self.relation()

    # -- constraints -------------------------------------------------------

    def domain_literal(self) -> DomainLit:
        self.expect("[", "'['")
        items = [self.domain_item()]
        while self.at(","):
            self.advance()
            items.append(self.domain_item())
        self.expect("]", "']'")
        return DomainLit(tuple(items))

    def domain_item(self):
        lo = self.value()
        if self.at("DOTDOT"):
            self.advance()
            hi = self.value()
            return ValueRange(lo, hi)
        return lo

    def alldifferent(self) -> AllDifferent:
        self.advance()
        self.expect("(", "'('")
        cells = self.cell_set()
        self.expect(")", "')'")
        return AllDifferent(cells)

    def member(self) -> Member:
        self.advance()
        self.expect("(", "'('")
        value = self.value()
        self.expect(",", "','")
        cells = self.cell_set()
        self.expect(")", "')'")
        return Member(value, cells)

    def count(self) -> Count:
        self.advance()
        self.expect("(", "'('")
        value = self.value()
        self.expect(",", "','")
        cells = self.cell_set()
        self.expect(",", "','")
        relop = self.relop()
        self.expect(",", "','")
        bound = self.integer()
        self.expect(")", "')'")
        return Count(value, cells, relop, bound)

    def sublist(self) -> Sublist:
        self.advance()
        self.expect("(", "'('")
        self.expect("[", "'['")
        values = [self.value()]
        while self.at(","):
            self.advance()
            values.append(self.value())
        self.expect("]", "']'")
        self.expect(",", "','")
        cells = self.cell_set()
        self.expect(")", "')'")
        return Sublist(tuple(values), cells)

    def if_then(self) -> IfThen:
        self.advance()
        self.expect("(", "'('")
        cond = self.relation()
        self.expect(")", "')'")
        tok = self.peek()
        if tok is None or tok.kind != "IDENT" or tok.text.upper() != "THEN":
            raise self.error("expected THEN", ("THEN",))
        self.advance()
        self.expect("(", "'('")
        then = self.relation()
        self.expect(")", "')'")
        return IfThen(cond, then)

    def sum_rel(self) -> SumRel:
        self.advance()
        self.expect("(", "'('")
        cells = self.cell_set()
        self.expect(")", "')'")
        if not self.at("RELOP"):
            raise self.error("expected '=' or '!=' after SUM(...)", ("=", "!="))
        tok = self.advance()
        relop = _RELOPS[tok.text]
        if relop not in (Relop.EQ, Relop.NE):
            raise ParseError("SUM supports only '=' and '!='", tok.pos, ("=", "!="))
        value = self.value()
        return SumRel(cells, relop, value)

    def intable(self) -> InTable:
        self.advance()
        self.expect("(", "'('")
        tok = self.peek()
        if tok is None or tok.kind != "IDENT":
            raise self.error("expected table name", ("table name",))
        self.advance()
        self.expect(",", "','")
        cells = self.cell_set()
        self.expect(")", "')'")
        return InTable(tok.text, cells)

    def relation(self) -> Relation:
        lhs = self.expr()
        op = self.relop()
        rhs = self.expr()
        if self.at("RELOP"):
            raise self.error("relational operators are non-associative", ())
        return Relation(lhs, op, rhs)

    def relop(self) -> Relop:
        if not self.at("RELOP"):
            raise self.error(
                "expected relational operator", ("=", "!=", "<", "<=", ">", ">=")
            )
        return _RELOPS[self.advance().text]

    # -- expressions -------------------------------------------------------

    def expr(self) -> Expr:
        node = self.term()
        while self.at("+") or self.at("-"):
            op = self.advance().kind
            rhs = self.term()
            node = Add(node, rhs) if op == "+" else Sub(node, rhs)
        return node

    def term(self) -> Expr:
        node = self.factor()
        while True:
            if self.at("*") or self.at("/"):
                op = self.advance().kind
                rhs = self.factor()
                node = Mul(node, rhs) if op == "*" else FloorDiv(node, rhs)
            elif self._at_mod():
                self.advance()
                node = Mod(node, self.factor())
            else:
                return node

    def _at_mod(self) -> bool:
        tok = self.peek()
        return tok is not None and tok.kind == "IDENT" and tok.text.upper() == "MOD"

    def factor(self) -> Expr:
        tok = self.peek()
        if tok is None:
            raise self.error("expected expression", ("number", "cell reference", "'('"))
        if tok.kind == "(":
            self.advance()
            inner = self.expr()
            self.expect(")", "')'")
            return inner  # grouping only; no node is kept
        if tok.kind == "NUMBER" or (tok.kind == "-" and self._number_follows()):
            return self.number()
        if tok.kind == "CELLREF":
            self.advance()
            return _parse_dollar_ref(tok)
        if tok.kind == "IDENT":
            nxt = self.peek(1)
            if nxt is not None and nxt.kind == "(":
                raise ParseError(
                    f"unknown function {tok.text!r}",
                    tok.pos,
                    tuple(sorted(BUILTIN_NAMES)),
                )
            if tok.text.upper() in KEYWORDS:
                raise ParseError(f"reserved word {tok.text!r}", tok.pos)
            self.advance()
            ref = _cell_shape(tok.text)
            if ref is not None:
                return ref
            return SymbolLit(tok.text)
        raise self.error("expected expression", ("number", "cell reference", "'('"))

    def _number_follows(self) -> bool:
        nxt = self.peek(1)
        return nxt is not None and nxt.kind == "NUMBER"

    # -- leaves ------------------------------------------------------------

    def number(self) -> ValueLit:
        sign = 1
        if self.at("-"):
            self.advance()
            sign = -1
        tok = self.expect("NUMBER", "number")
        if "." in tok.text:
            frac = sign * Fraction(tok.text)
            if frac.denominator > MAX_DENOMINATOR:
                raise ParseError(
                    f"more than 6 decimal places in {tok.text!r}", tok.pos
                )
            return number_lit(frac)
        return IntLit(sign * int(tok.text))

    def integer(self) -> int:
        sign = 1
        if self.at("-"):
            self.advance()
            sign = -1
        tok = self.expect("NUMBER", "integer")
        if "." in tok.text:
            raise ParseError(f"expected integer, got {tok.text!r}", tok.pos)
        return sign * int(tok.text)

    def value(self) -> ValueLit:
        tok = self.peek()
        if tok is None:
            raise self.error("expected value", ("number", "symbol"))
        if tok.kind == "NUMBER" or tok.kind == "-":
            return self.number()
        if tok.kind == "IDENT":
            if tok.text.upper() in KEYWORDS:
                raise ParseError(f"reserved word {tok.text!r}", tok.pos)
            self.advance()
            return SymbolLit(tok.text)
        raise self.error("expected value", ("number", "symbol"))

    def cell_set(self) -> tuple[CellRef, ...]:
        self.expect("[", "'['")
        cells = list(self.cell_item())
        while self.at(","):
            self.advance()
            cells.extend(self.cell_item())
        self.expect("]", "']'")
        return tuple(cells)

    def cell_item(self) -> list[CellRef]:
        start = self.cell_ref()
        if not self.at(":"):
            return [start]
        self.advance()
        end = self.cell_ref()
        lo_col, hi_col = sorted((start.col, end.col))
        lo_row, hi_row = sorted((start.row, end.row))
        return [
            CellRef(col, row, start.col_abs, start.row_abs)
            for row in range(lo_row, hi_row + 1)
            for col in range(lo_col, hi_col + 1)
        ]

    def cell_ref(self) -> CellRef:
        tok = self.peek()
        if tok is not None and tok.kind == "CELLREF":
            self.advance()
            return _parse_dollar_ref(tok)
        if tok is not None and tok.kind == "IDENT":
            ref = _cell_shape(tok.text)
            if ref is not None:
                self.advance()
                return ref
        raise self.error("expected cell reference", ("cell reference",))


_DOLLAR_REF_RE = re.compile(r"^(\$?)([A-Za-z]{1,3})(\$?)(\d+)$")


def _parse_dollar_ref(tok: Token) -> CellRef:
    m = _DOLLAR_REF_RE.match(tok.text)
    assert m is not None, tok
    col = letters_to_col(m.group(2))
    row = int(m.group(4))
    if not (1 <= col <= MAX_COL and 1 <= row <= MAX_ROW):
        raise ParseError(f"cell reference {tok.text!r} outside the grid", tok.pos)
    return CellRef(col, row, m.group(1) == "$", m.group(3) == "$")


def parse_cell_formula(text: str) -> list[ConstraintAst]:
    """Parse one cell's text into its `;`-separated constraints."""
    return _Parser(text, lex(text)).formula()


def parse_cell_ref(text: str) -> CellRef:
    """Parse a single A1-style address like B3 or $B$3."""
    tokens = lex(text.strip())
    if len(tokens) == 1 and tokens[0].kind == "CELLREF":
        return _parse_dollar_ref(tokens[0])
    if len(tokens) == 1 and tokens[0].kind == "IDENT":
        ref = _cell_shape(tokens[0].text)
        if ref is not None:
            return ref
    raise ParseError(f"not a cell address: {text!r}", 0)


def parse_value_literal(text: str) -> ValueLit:
    """Parse a bare value: integer, decimal, or symbol."""
    p = _Parser(text, lex(text))
    value = p.value()
    if not p.at_end():
        raise p.error("unexpected trailing text")
    return value


def parse_cell_range(text: str) -> tuple[CellRef, ...]:
    """Parse "B3" or "B3:E4" into its expanded cell list."""
    p = _Parser(text, lex(text.strip()))
    cells = p.cell_item()
    if not p.at_end():
        raise p.error("unexpected trailing text")
    return tuple(cells)
