"""Stack-machine language: syntax tree, parser, printer and static checks."""

from .ast import (
    BoolConst, CallAssign, Command, FunctionDef, If, IsEmpty, Letter, Loop,
    OpApp, OperatorDef, Pop, Pred, Program, Push, Rand, Reg, RegAssign, Seq,
    Skip, StackCopy, StackLit, Top, calls_of, seq, stacks_of, subcommands,
)
from .check import Diagnostic, call_order, check_wellformed
from .parser import LangError, ParseError, WellFormednessError, parse, parse_file, tokenize
from .printer import format_command, format_expr, format_program
