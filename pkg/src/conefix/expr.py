"""Recursive-descent parser and evaluator for scalar expressions.

Grammar, loosest binding first:

    expr   := term (('+' | '-') term)*
    term   := factor (('*' | '/') factor)*
    factor := '-' factor | power
    power  := atom ('^' factor)?          right associative
    atom   := NUMBER | VAR | FUNC '(' expr (',' expr)* ')' | '(' expr ')'

Unary minus binds looser than '^', so "-2^2" is -(2^2). There is no
implicit multiplication. Variables come from a declared name set; function
names and arities are fixed. Evaluation is plain float arithmetic where
division by zero and domain errors raise instead of propagating NaN.
"""
from __future__ import annotations

import math
import re
from dataclasses import dataclass
from typing import Iterable, Mapping, Union


class ExprError(ValueError):
    """Base class for parse and evaluation errors."""


class ExprSyntaxError(ExprError):
    def __init__(self, message: str, offset: int):
        super().__init__(f"{message} (offset {offset})")
        self.offset = offset


class ExprNameError(ExprError):
    """Unknown identifier."""


class ExprArityError(ExprError):
    """Function called with the wrong number of arguments."""


class ExprEvalError(ExprError):
    """Missing variable or arithmetic domain error during evaluation."""


FUNCTIONS = {"abs": 1, "min": 2, "max": 2, "sin": 1, "cos": 1, "exp": 1,
             "sqrt": 1}


@dataclass(frozen=True)
class Num:
    value: float

    def __post_init__(self):
        v = float(self.value)
        if not math.isfinite(v) or v < 0.0:
            raise ValueError("literals are finite and nonnegative; negate with Neg")
        object.__setattr__(self, "value", v)


@dataclass(frozen=True)
class Var:
    name: str


@dataclass(frozen=True)
class Neg:
    operand: "Node"


@dataclass(frozen=True)
class BinOp:
    op: str
    left: "Node"
    right: "Node"


@dataclass(frozen=True)
class Call:
    func: str
    args: tuple["Node", ...]

    def __post_init__(self):
        arity = FUNCTIONS.get(self.func)
        if arity is None:
            raise ExprNameError(f"unknown function {self.func!r}")
        if len(self.args) != arity:
            raise ExprArityError(
                f"{self.func} takes {arity} argument(s), got {len(self.args)}")


Node = Union[Num, Var, Neg, BinOp, Call]

_TOKEN = re.compile(r"""
    (?P<num>\d+(?:\.\d*)?(?:[eE][+-]?\d+)?|\.\d+(?:[eE][+-]?\d+)?)
  | (?P<ident>[A-Za-z_][A-Za-z_0-9]*)
  | (?P<op>[-+*/^(),])
  | (?P<ws>\s+)
""", re.VERBOSE)


def _tokenize(source: str) -> list[tuple[str, str, int]]:
    tokens = []
    pos = 0
    while pos < len(source):
        m = _TOKEN.match(source, pos)
        if m is None:
            raise ExprSyntaxError(
                f"unexpected character {source[pos]!r}", pos)
        if m.lastgroup != "ws":
            tokens.append((m.lastgroup, m.group(), pos))
        pos = m.end()
    tokens.append(("end", "", len(source)))
    return tokens


class _Parser:
    def __init__(self, source: str, variables: frozenset[str]):
        self.tokens = _tokenize(source)
        self.pos = 0
        self.variables = variables

    def peek(self):
        return self.tokens[self.pos]

    def advance(self):
        tok = self.tokens[self.pos]
        self.pos += 1
        return tok

    def fail(self, expected: str):
        kind, text, offset = self.peek()
        found = "end of input" if kind == "end" else repr(text)
        raise ExprSyntaxError(f"expected {expected}, found {found}", offset)

    def expect(self, text: str):
        kind, tok_text, _ = self.peek()
        if kind == "op" and tok_text == text:
            return self.advance()
        self.fail(f"{text!r}")

    def parse(self) -> Node:
        node = self.expr()
        if self.peek()[0] != "end":
            self.fail("end of input")
        return node

    def expr(self) -> Node:
        node = self.term()
        while self.peek()[0] == "op" and self.peek()[1] in "+-":
            op = self.advance()[1]
            node = BinOp(op, node, self.term())
        return node

    def term(self) -> Node:
        node = self.factor()
        while self.peek()[0] == "op" and self.peek()[1] in "*/":
            op = self.advance()[1]
            node = BinOp(op, node, self.factor())
        return node

    def factor(self) -> Node:
        if self.peek()[0] == "op" and self.peek()[1] == "-":
            self.advance()
            return Neg(self.factor())
        return self.power()

    def power(self) -> Node:
        node = self.atom()
        if self.peek()[0] == "op" and self.peek()[1] == "^":
            self.advance()
            node = BinOp("^", node, self.factor())
        return node

    def atom(self) -> Node:
        kind, text, offset = self.peek()
        if kind == "num":
            self.advance()
            return Num(float(text))
        if kind == "ident":
            self.advance()
            if self.peek()[0] == "op" and self.peek()[1] == "(":
                if text not in FUNCTIONS:
                    raise ExprNameError(
                        f"unknown function {text!r} (offset {offset})")
                self.advance()
                args = [self.expr()]
                while self.peek()[0] == "op" and self.peek()[1] == ",":
                    self.advance()
                    args.append(self.expr())
                self.expect(")")
                arity = FUNCTIONS[text]
                if len(args) != arity:
                    raise ExprArityError(
                        f"{text} takes {arity} argument(s), got {len(args)} "
                        f"(offset {offset})")
                return Call(text, tuple(args))
            if text in FUNCTIONS:
                self.fail("'(' after function name")
            if text not in self.variables:
                raise ExprNameError(
                    f"unknown identifier {text!r} (offset {offset})")
            return Var(text)
        if kind == "op" and text == "(":
            self.advance()
            node = self.expr()
            self.expect(")")
            return node
        self.fail("a number, variable or '('")


def parse(source: str, variables: Iterable[str]) -> Node:
    """Parse source into an AST over the declared variable names."""
    if not source.strip():
        raise ExprSyntaxError("expected a number, variable or '('", 0)
    return _Parser(source, frozenset(variables)).parse()


def _finite(value: float, what: str) -> float:
    if not math.isfinite(value):
        raise ExprEvalError(f"{what} overflowed")
    return value


def evaluate(node: Node, env: Mapping[str, float]) -> float:
    """Evaluate an AST under the variable assignment env."""
    if isinstance(node, Num):
        return node.value
    if isinstance(node, Var):
        try:
            return float(env[node.name])
        except KeyError:
            raise ExprEvalError(f"missing variable {node.name!r}") from None
    if isinstance(node, Neg):
        return -evaluate(node.operand, env)
    if isinstance(node, BinOp):
        left = evaluate(node.left, env)
        right = evaluate(node.right, env)
        if node.op == "+":
            return _finite(left + right, "addition")
        if node.op == "-":
            return _finite(left - right, "subtraction")
        if node.op == "*":
            return _finite(left * right, "multiplication")
        if node.op == "/":
            if right == 0.0:
                raise ExprEvalError("division by zero")
            return _finite(left / right, "division")
        # "^"
        if left < 0.0 and right != math.floor(right):
            raise ExprEvalError(
                "negative base with non-integer exponent")
        if left == 0.0 and right < 0.0:
            raise ExprEvalError("zero base with negative exponent")
        try:
            return _finite(math.pow(left, right), "exponentiation")
        except (OverflowError, ValueError):
            raise ExprEvalError("exponentiation overflowed") from None
    if isinstance(node, Call):
        args = [evaluate(a, env) for a in node.args]
        if node.func == "abs":
            return abs(args[0])
        if node.func == "min":
            return min(args)
        if node.func == "max":
            return max(args)
        if node.func == "sin":
            return math.sin(args[0])
        if node.func == "cos":
            return math.cos(args[0])
        if node.func == "exp":
            try:
                return _finite(math.exp(args[0]), "exp")
            except OverflowError:
                raise ExprEvalError("exp overflowed") from None
        # sqrt
        if args[0] < 0.0:
            raise ExprEvalError("square root of a negative number")
        return math.sqrt(args[0])
    raise TypeError(f"not an expression node: {node!r}")


_PREC = {"+": 1, "-": 1, "*": 2, "/": 2, "^": 4}
_UNARY_PREC = 3


def _node_prec(node: Node) -> int:
    if isinstance(node, BinOp):
        return _PREC[node.op]
    if isinstance(node, Neg):
        return _UNARY_PREC
    return 9


def to_source(node: Node) -> str:
    """Print an AST so that reparsing yields a structurally identical tree.

    Parentheses are inserted exactly where precedence or associativity
    would otherwise regroup the tree.
    """
    if isinstance(node, Num):
        return repr(node.value)
    if isinstance(node, Var):
        return node.name
    if isinstance(node, Call):
        return f"{node.func}({', '.join(to_source(a) for a in node.args)})"
    if isinstance(node, Neg):
        inner = to_source(node.operand)
        if isinstance(node.operand, BinOp) and _PREC[node.operand.op] < _PREC["^"]:
            inner = f"({inner})"
        return f"-{inner}"
    if isinstance(node, BinOp):
        prec = _PREC[node.op]
        left = to_source(node.left)
        lp = _node_prec(node.left)
        if lp < prec or (lp == prec and node.op == "^"):
            left = f"({left})"
        right = to_source(node.right)
        rp = _node_prec(node.right)
        if rp < prec or (rp == prec and node.op != "^"):
            right = f"({right})"
        return f"{left} {node.op} {right}" if node.op in "+-" \
            else f"{left}{node.op}{right}"
    raise TypeError(f"not an expression node: {node!r}")


def variables_of(node: Node) -> set[str]:
    if isinstance(node, Var):
        return {node.name}
    if isinstance(node, Neg):
        return variables_of(node.operand)
    if isinstance(node, BinOp):
        return variables_of(node.left) | variables_of(node.right)
    if isinstance(node, Call):
        out: set[str] = set()
        for a in node.args:
            out |= variables_of(a)
        return out
    return set()
