"""Spreadsheet formula grammar: literals, cell references, nested calls.

    formula := '=' expr
    expr    := STRING | NUMBER | cellref | NAME '(' [expr (',' expr)*] ')'

Strings use double quotes with a doubled quote as the escape; numbers are
plain decimals with an optional leading minus; cell references are A1-style
(letters then row). Whitespace between tokens is free. Printing a parsed
expression and re-parsing it yields an equal expression.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from decimal import Decimal, InvalidOperation

from wikigrid.core import ToolkitError, parse_failure

_NAME_RE = re.compile(r"[A-Z][A-Z0-9]*")
_CELL_RE = re.compile(r"^([A-Z]+)([1-9][0-9]*)$")
_NUMBER_RE = re.compile(r"-?[0-9]+(\.[0-9]+)?")


@dataclass(frozen=True)
class CellRef:
    """1-based column/row pair; column 1 prints as A, 27 as AA."""

    col: int
    row: int

    def name(self) -> str:
        return column_letters(self.col) + str(self.row)


@dataclass(frozen=True)
class StringLit:
    text: str


@dataclass(frozen=True)
class NumberLit:
    value: Decimal


@dataclass(frozen=True)
class Call:
    name: str
    args: tuple["Expr", ...]


Expr = StringLit | NumberLit | CellRef | Call


def column_letters(col: int) -> str:
    if col < 1:
        raise ValueError(f"column index must be >= 1, got {col}")
    letters = ""
    while col:
        col, remainder = divmod(col - 1, 26)
        letters = chr(ord("A") + remainder) + letters
    return letters


def letters_to_column(letters: str) -> int:
    col = 0
    for char in letters:
        col = col * 26 + (ord(char) - ord("A") + 1)
    return col


def parse_cell_name(name: str) -> CellRef:
    match = _CELL_RE.match(name)
    if not match:
        raise parse_failure(f"not a cell name: {name!r}")
    return CellRef(letters_to_column(match.group(1)), int(match.group(2)))


class _Parser:
    def __init__(self, source: str):
        self.source = source
        self.pos = 0

    def fail(self, offset: int, message: str) -> ToolkitError:
        return parse_failure(f"{message} at offset {offset}", offset=offset)

    def skip_ws(self) -> None:
        while self.pos < len(self.source) and self.source[self.pos].isspace():
            self.pos += 1

    def peek(self) -> str:
        return self.source[self.pos] if self.pos < len(self.source) else ""

    def parse(self) -> Expr:
        if not self.source.startswith("="):
            raise self.fail(0, "formula must start with '='")
        self.pos = 1
        expr = self.expression()
        self.skip_ws()
        if self.pos != len(self.source):
            raise self.fail(self.pos, "unexpected trailing text")
        return expr

    def expression(self) -> Expr:
        self.skip_ws()
        char = self.peek()
        if char == '"':
            return self.string()
        if char.isdigit() or char == "-":
            return self.number()
        if "A" <= char <= "Z":
            return self.name_or_ref()
        raise self.fail(self.pos, "expected a string, number, cell reference or call")

    def string(self) -> StringLit:
        start = self.pos
        self.pos += 1
        chunks: list[str] = []
        while self.pos < len(self.source):
            char = self.source[self.pos]
            if char == '"':
                if self.source[self.pos + 1 : self.pos + 2] == '"':
                    chunks.append('"')
                    self.pos += 2
                    continue
                self.pos += 1
                return StringLit("".join(chunks))
            chunks.append(char)
            self.pos += 1
        raise self.fail(start, "unterminated string literal")

    def number(self) -> NumberLit:
        match = _NUMBER_RE.match(self.source, self.pos)
        if not match:
            raise self.fail(self.pos, "malformed number")
        self.pos = match.end()
        try:
            return NumberLit(Decimal(match.group(0)))
        except InvalidOperation as exc:  # pragma: no cover - regex prevents this
            raise self.fail(match.start(), "malformed number") from exc

    def name_or_ref(self) -> Expr:
        start = self.pos
        match = _NAME_RE.match(self.source, self.pos)
        token = match.group(0)
        self.pos = match.end()
        self.skip_ws()
        if self.peek() == "(":
            return self.call(token, self.pos)
        cell = _CELL_RE.match(token)
        if cell:
            return CellRef(letters_to_column(cell.group(1)), int(cell.group(2)))
        raise self.fail(start, f"{token!r} is neither a cell reference nor a call")

    def call(self, name: str, open_pos: int) -> Call:
        self.pos += 1  # consume '('
        self.skip_ws()
        if not self.peek():
            raise self.fail(open_pos, f"unclosed call {name}(")
        if self.peek() == ")":
            self.pos += 1
            return Call(name, ())
        args = [self.expression()]
        while True:
            self.skip_ws()
            char = self.peek()
            if char == ")":
                self.pos += 1
                return Call(name, tuple(args))
            if char == ",":
                self.pos += 1
                args.append(self.expression())
                continue
            if not char:
                # Ran off the end: blame the call's opening parenthesis.
                raise self.fail(open_pos, f"unclosed call {name}(")
            raise self.fail(self.pos, "expected ',' or ')' in argument list")


def parse_formula(source: str) -> Expr:
    """Parse a formula ('=...') into an expression tree.

    Raises ParseFailure carrying the 0-based offset of the first bad token.
    """
    return _Parser(source).parse()


def print_formula(expr: Expr) -> str:
    """Canonical source for an expression; parse_formula inverts this."""
    return "=" + _print_expr(expr)


def _print_expr(expr: Expr) -> str:
    if isinstance(expr, StringLit):
        return '"' + expr.text.replace('"', '""') + '"'
    if isinstance(expr, NumberLit):
        return format(expr.value, "f")
    if isinstance(expr, CellRef):
        return expr.name()
    if isinstance(expr, Call):
        return f"{expr.name}({', '.join(_print_expr(arg) for arg in expr.args)})"
    raise TypeError(f"not an expression: {expr!r}")


def referenced_cells(expr: Expr) -> set[CellRef]:
    """Every cell reference mentioned anywhere in the expression."""
    refs: set[CellRef] = set()
    stack: list[Expr] = [expr]
    while stack:
        node = stack.pop()
        if isinstance(node, CellRef):
            refs.add(node)
        elif isinstance(node, Call):
            stack.extend(node.args)
    return refs
