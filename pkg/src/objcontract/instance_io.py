"""Line-oriented text format for instances.

    problem mobo
    nvars <n>
    nobjs <p>
    obj <n integers>                          # exactly p lines
    con <n integers> <le|ge|eq> <integer>     # zero or more

``#`` starts a comment. Tokens are whitespace separated decimal integers.
"""

from __future__ import annotations

import re
from pathlib import Path

from .core import SENSES, Instance, LinearConstraint

_TOKEN = re.compile(r"\S+")
_INT = re.compile(r"[+-]?\d+")


class InstanceParseError(ValueError):
    def __init__(self, message: str, line: int, column: int = 1):
        super().__init__(f"line {line}, column {column}: {message}")
        self.line = line
        self.column = column


def _tokens(raw: str):
    body = raw.split("#", 1)[0]
    return [(m.group(), m.start() + 1) for m in _TOKEN.finditer(body)]


def _int(tok, lineno) -> int:
    text, col = tok
    if not _INT.fullmatch(text):
        raise InstanceParseError(f"expected an integer, got {text!r}", lineno, col)
    return int(text)


def parse_instance(text: str, name: str = "instance") -> Instance:
    seen_problem = False
    nvars = nobjs = None
    objs: list[list[int]] = []
    cons: list[LinearConstraint] = []
    last = 0
    for lineno, raw in enumerate(text.splitlines(), start=1):
        toks = _tokens(raw)
        if not toks:
            continue
        last = lineno
        key, col = toks[0]
        args = toks[1:]
        if not seen_problem:
            if key != "problem" or [a[0] for a in args] != ["mobo"]:
                raise InstanceParseError("document must start with 'problem mobo'", lineno, col)
            seen_problem = True
            continue
        if key in ("nvars", "nobjs"):
            if len(args) != 1:
                raise InstanceParseError(f"'{key}' takes exactly one integer", lineno, col)
            if (key == "nvars" and nvars is not None) or (key == "nobjs" and nobjs is not None):
                raise InstanceParseError(f"'{key}' given twice", lineno, col)
            if objs or cons:
                raise InstanceParseError(f"'{key}' must come before obj/con lines", lineno, col)
            value = _int(args[0], lineno)
            if value < 1:
                raise InstanceParseError(f"'{key}' must be positive", lineno, args[0][1])
            if key == "nvars":
                nvars = value
            else:
                nobjs = value
        elif key in ("obj", "con"):
            if nvars is None or nobjs is None:
                raise InstanceParseError("'nvars' and 'nobjs' must precede obj/con lines", lineno, col)
            if key == "obj":
                if len(args) != nvars:
                    raise InstanceParseError(
                        f"obj line has {len(args)} coefficients, expected nvars={nvars}", lineno, col)
                if len(objs) == nobjs:
                    raise InstanceParseError(f"more than nobjs={nobjs} obj lines", lineno, col)
                objs.append([_int(t, lineno) for t in args])
            else:
                if len(args) != nvars + 2:
                    raise InstanceParseError(
                        f"con line needs {nvars} coefficients, a sense and a right-hand side", lineno, col)
                sense, scol = args[nvars]
                if sense not in SENSES:
                    raise InstanceParseError(f"unknown sense {sense!r}, expected le, ge or eq", lineno, scol)
                cons.append(LinearConstraint(tuple(_int(t, lineno) for t in args[:nvars]), sense,
                                             _int(args[nvars + 1], lineno)))
        else:
            raise InstanceParseError(f"unknown keyword {key!r}", lineno, col)
    if not seen_problem:
        raise InstanceParseError("empty document", max(last, 1))
    if nvars is None or nobjs is None:
        raise InstanceParseError("missing 'nvars' or 'nobjs'", max(last, 1))
    if len(objs) != nobjs:
        raise InstanceParseError(f"found {len(objs)} obj lines, expected nobjs={nobjs}", max(last, 1))
    return Instance.from_lists(objs, cons, name)


def serialize_instance(instance: Instance) -> str:
    lines = ["problem mobo", f"nvars {instance.nvars}", f"nobjs {instance.nobjs}"]
    for row in instance.objectives.rows:
        lines.append("obj " + " ".join(map(str, row.coeffs)))
    for con in instance.constraints:
        lines.append("con " + " ".join(map(str, con.coeffs)) + f" {con.sense} {con.rhs}")
    return "\n".join(lines) + "\n"


def read_instance(path: str | Path) -> Instance:
    path = Path(path)
    return parse_instance(path.read_text(), name=path.stem)


def write_instance(instance: Instance, path: str | Path) -> None:
    Path(path).write_text(serialize_instance(instance))
