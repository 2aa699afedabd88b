"""Tokenizer and recursive-descent parser for ``.sm`` program files.

Example::

    alphabet: true false a b
    op not/1: true->false false->true a->false b->false
    registers: r1
    stacks: S1 S2 S3
    function addition(S1, S2) { S3 := S2; loop S2 { push(top(S3), S1); pop(S3) } } returns S1
    main { S1 := addition(S1, S2) }

Header sections come first, then functions, then ``main``.  Newlines are
plain whitespace; ``#`` starts a comment.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from .ast import (
    BoolConst, CallAssign, FunctionDef, If, IsEmpty, Letter, Loop, OpApp,
    OperatorDef, Pop, Pred, Program, Push, Rand, Reg, RegAssign, Skip,
    StackCopy, StackLit, Top, seq,
)

SECTION_KEYWORDS = {"alphabet", "op", "registers", "stacks", "blank", "output", "function", "main"}
COMMAND_KEYWORDS = {"skip", "pop", "push", "top", "if", "else", "loop", "rand", "isEmpty", "returns"}
RESERVED = SECTION_KEYWORDS | COMMAND_KEYWORDS

_TOKEN_RE = re.compile(r"""
    (?P<ws>[ \t\r\n]+|\#[^\n]*)
  | (?P<sym>:=|->|[{}()<>,;:/])
  | (?P<name>[A-Za-z0-9_][A-Za-z0-9_']*)
""", re.VERBOSE)


class LangError(Exception):
    """Base class for errors raised while reading programs."""


class ParseError(LangError):
    def __init__(self, message: str, line: int = 0, col: int = 0):
        self.message, self.line, self.col = message, line, col
        super().__init__(f"{line}:{col}: {message}" if line else message)


class WellFormednessError(LangError):
    def __init__(self, diagnostics):
        self.diagnostics = list(diagnostics)
        super().__init__("; ".join(str(d) for d in self.diagnostics))


@dataclass(frozen=True)
class Token:
    kind: str  # "sym", "name" or "eof"
    text: str
    line: int
    col: int


def tokenize(source: str) -> list[Token]:
    tokens = []
    line, line_start = 1, 0
    pos = 0
    while pos < len(source):
        m = _TOKEN_RE.match(source, pos)
        if m is None:
            raise ParseError(f"unexpected character {source[pos]!r}", line, pos - line_start + 1)
        kind = m.lastgroup
        if kind != "ws":
            tokens.append(Token(kind, m.group(), line, pos - line_start + 1))
        text = m.group()
        if "\n" in text:
            line += text.count("\n")
            line_start = pos + text.rindex("\n") + 1
        pos = m.end()
    tokens.append(Token("eof", "", line, pos - line_start + 1))
    return tokens


class _Parser:
    def __init__(self, source: str):
        self.tokens = tokenize(source)
        self.i = 0
        self.alphabet: list[str] = []
        self.operators: dict[str, OperatorDef] = {}
        self.registers: list[str] = []
        self.stacks: list[str] = []
        self.functions: dict[str, FunctionDef] = {}
        self.blank = None
        self.output = None
        self.names: dict[str, str] = {}  # name -> category, for uniqueness
        self.calls: list[tuple] = []  # (func name, token) for late resolution

    # -- token helpers ------------------------------------------------------

    @property
    def tok(self) -> Token:
        return self.tokens[self.i]

    def error(self, message: str, tok: Token | None = None) -> ParseError:
        tok = tok or self.tok
        return ParseError(message, tok.line, tok.col)

    def advance(self) -> Token:
        tok = self.tok
        self.i += 1
        return tok

    def at(self, text: str) -> bool:
        return self.tok.kind != "eof" and self.tok.text == text

    def expect(self, text: str) -> Token:
        if not self.at(text):
            found = self.tok.text or "end of file"
            raise self.error(f"expected {text!r}, found {found!r}")
        return self.advance()

    def name(self, what: str = "identifier") -> Token:
        if self.tok.kind != "name" or self.tok.text in RESERVED:
            found = self.tok.text or "end of file"
            raise self.error(f"expected {what}, found {found!r}")
        return self.advance()

    def at_section(self) -> bool:
        return self.tok.kind == "eof" or (self.tok.kind == "name" and self.tok.text in SECTION_KEYWORDS)

    def declare(self, tok: Token, category: str) -> None:
        if tok.text in self.names:
            raise self.error(f"duplicate declaration of {tok.text!r} "
                             f"(already a {self.names[tok.text]})", tok)
        self.names[tok.text] = category

    # -- top level ----------------------------------------------------------

    def program(self) -> Program:
        while self.tok.kind != "eof" and not self.at("function") and not self.at("main"):
            self.header()
        while self.at("function"):
            self.function()
        self.expect("main")
        main = self.block()
        if self.tok.kind != "eof":
            raise self.error(f"unexpected {self.tok.text!r} after main")
        for fname, tok in self.calls:
            if fname not in self.functions:
                raise self.error(f"unknown function {fname!r}", tok)
        return Program(
            alphabet=tuple(self.alphabet),
            operators=dict(self.operators),
            registers=tuple(self.registers),
            stacks=tuple(self.stacks),
            functions=dict(self.functions),
            main=main,
            blank=self.blank,
            output=self.output,
        )

    def header(self) -> None:
        tok = self.tok
        if tok.text == "alphabet":
            self.advance()
            self.expect(":")
            while not self.at_section():
                t = self.name("letter")
                self.declare(t, "letter")
                self.alphabet.append(t.text)
        elif tok.text == "registers":
            self.advance()
            self.expect(":")
            while not self.at_section():
                t = self.name("register name")
                self.declare(t, "register")
                self.registers.append(t.text)
        elif tok.text == "stacks":
            self.advance()
            self.expect(":")
            while not self.at_section():
                t = self.name("stack name")
                self.declare(t, "stack")
                self.stacks.append(t.text)
        elif tok.text in ("blank", "output"):
            self.advance()
            self.expect(":")
            t = self.name()
            setattr(self, tok.text, t.text)
            if tok.text == "blank" and t.text not in self.alphabet:
                raise self.error(f"blank {t.text!r} is not a declared letter", t)
            if tok.text == "output" and t.text not in self.stacks:
                raise self.error(f"output {t.text!r} is not a declared stack", t)
        elif tok.text == "op":
            self.operator()
        else:
            raise self.error(f"expected a section keyword, found {tok.text or 'end of file'!r}")

    def operator(self) -> None:
        self.expect("op")
        name_tok = self.name("operator name")
        self.declare(name_tok, "operator")
        self.expect("/")
        arity_tok = self.advance()
        if not arity_tok.text.isdigit():
            raise self.error("operator arity must be a number", arity_tok)
        arity = int(arity_tok.text)
        self.expect(":")
        table: dict = {}
        while not self.at_section():
            args = []
            if not self.at("->"):
                args.append(self.letter())
                while self.at(","):
                    self.advance()
                    args.append(self.letter())
            arrow = self.expect("->")
            out = self.letter()
            if len(args) != arity:
                raise self.error(f"operator {name_tok.text!r} has arity {arity}, "
                                 f"table row has {len(args)} arguments", arrow)
            if tuple(args) in table:
                raise self.error(f"duplicate table row for {name_tok.text}{tuple(args)}", arrow)
            table[tuple(args)] = out
        self.operators[name_tok.text] = OperatorDef(name_tok.text, arity, table)

    def letter(self) -> str:
        t = self.name("letter")
        if t.text not in self.alphabet:
            raise self.error(f"unknown letter {t.text!r}", t)
        return t.text

    def stack(self) -> str:
        t = self.name("stack name")
        if t.text not in self.stacks:
            raise self.error(f"unknown stack {t.text!r}", t)
        return t.text

    def function(self) -> None:
        self.expect("function")
        name_tok = self.name("function name")
        self.declare(name_tok, "function")
        self.expect("(")
        params = []
        if not self.at(")"):
            params.append(self.stack())
            while self.at(","):
                self.advance()
                params.append(self.stack())
        self.expect(")")
        body = self.block()
        self.expect("returns")
        ret = self.stack()
        self.functions[name_tok.text] = FunctionDef(name_tok.text, tuple(params), body, ret)

    # -- commands -----------------------------------------------------------

    def block(self):
        self.expect("{")
        cmds = []
        while not self.at("}"):
            cmds.append(self.command())
            if self.at(";"):
                self.advance()
            elif not self.at("}"):
                raise self.error(f"expected ';' or '}}', found {self.tok.text or 'end of file'!r}")
        self.expect("}")
        return seq(*cmds)

    def command(self):
        tok = self.tok
        if tok.kind != "name":
            raise self.error(f"expected a command, found {tok.text or 'end of file'!r}")
        if tok.text == "skip":
            self.advance()
            return Skip()
        if tok.text == "pop":
            self.advance()
            self.expect("(")
            s = self.stack()
            self.expect(")")
            return Pop(s)
        if tok.text == "push":
            self.advance()
            self.expect("(")
            e = self.expr()
            self.expect(",")
            s = self.stack()
            self.expect(")")
            return Push(e, s)
        if tok.text == "if":
            self.advance()
            cond = self.bexpr()
            then = self.block()
            orelse = Skip()
            if self.at("else"):
                self.advance()
                orelse = self.block()
            return If(cond, then, orelse)
        if tok.text == "loop":
            self.advance()
            s = self.stack()
            body = self.block()
            return Loop(s, body, pos=(tok.line, tok.col))
        target = self.name("assignment target")
        self.expect(":=")
        if target.text in self.registers:
            return RegAssign(target.text, self.expr())
        if target.text not in self.stacks:
            raise self.error(f"unknown register or stack {target.text!r}", target)
        if self.at("<"):
            self.advance()
            letters = []
            if not self.at(">"):
                letters.append(self.letter())
                while self.at(","):
                    self.advance()
                    letters.append(self.letter())
            self.expect(">")
            return StackLit(target.text, tuple(letters))
        src = self.name("stack or function name")
        if self.at("("):
            self.advance()
            args = []
            if not self.at(")"):
                args.append(self.stack())
                while self.at(","):
                    self.advance()
                    args.append(self.stack())
            self.expect(")")
            self.calls.append((src.text, src))
            return CallAssign(target.text, src.text, tuple(args), pos=(tok.line, tok.col))
        if src.text not in self.stacks:
            raise self.error(f"unknown stack {src.text!r}", src)
        return StackCopy(target.text, src.text)

    # -- expressions --------------------------------------------------------

    def args(self) -> tuple:
        self.expect("(")
        args = []
        if not self.at(")"):
            args.append(self.expr())
            while self.at(","):
                self.advance()
                args.append(self.expr())
        self.expect(")")
        return tuple(args)

    def expr(self):
        tok = self.tok
        if tok.text == "top" and tok.kind == "name":
            self.advance()
            self.expect("(")
            s = self.stack()
            self.expect(")")
            return Top(s)
        t = self.name("expression")
        if self.at("("):
            if t.text not in self.operators:
                raise self.error(f"unknown operator {t.text!r}", t)
            return OpApp(t.text, self.args())
        if t.text in self.registers:
            return Reg(t.text)
        if t.text in self.alphabet:
            return Letter(t.text)
        raise self.error(f"unknown register or letter {t.text!r}", t)

    def bexpr(self):
        tok = self.tok
        if tok.kind == "name" and tok.text == "rand":
            self.advance()
            if self.at("("):
                self.advance()
                self.expect(")")
            return Rand()
        if tok.kind == "name" and tok.text == "isEmpty":
            self.advance()
            self.expect("(")
            s = self.stack()
            self.expect(")")
            return IsEmpty(s)
        if tok.kind == "name" and tok.text in ("true", "false") and not self.tokens[self.i + 1].text == "(":
            self.advance()
            return BoolConst(tok.text == "true")
        t = self.name("boolean expression")
        if t.text in self.registers:
            raise self.error("registers may not appear directly in boolean expressions; "
                             "wrap them in a predicate", t)
        if t.text not in self.operators:
            raise self.error(f"unknown predicate {t.text!r}", t)
        if not self.at("("):
            raise self.error(f"expected '(' after predicate {t.text!r}")
        return Pred(t.text, self.args())


def parse(source: str, check: bool = True) -> Program:
    """Parse program text.

    With ``check=True`` (the default) the static well-formedness checks run
    too, and any diagnostic raises :class:`WellFormednessError`.
    """
    program = _Parser(source).program()
    if check:
        from .check import check_wellformed
        diagnostics = check_wellformed(program)
        if diagnostics:
            raise WellFormednessError(diagnostics)
    return program


def parse_file(path) -> Program:
    with open(path, encoding="utf-8") as fh:
        return parse(fh.read())
