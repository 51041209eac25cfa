from fractions import Fraction
import pytest

from conftest import FIXTURES
from src.error import ErrorHandler
from src.parser import read_algebra, read_decomposition, read_expression
from src.scanner import Scanner
from src.token_type import TokenType
from src.writer import format_combination, format_scalar, parse_scalar, write_algebra

TORUS = """\
dimension: 2
basis:
  one 0
  a 1
  b 1
  ab 2
unit: one
orientation: ab
products:
"""


def parse(source):
  handler = ErrorHandler()
  return read_algebra(source, handler), handler


def test_scanner_tokens():
  handler = ErrorHandler()
  tokens = Scanner("a*b = -3/2*ab # comment\n", handler).scan_tokens()
  assert [t.token_type for t in tokens] == [
    TokenType.IDENTIFIER, TokenType.STAR, TokenType.IDENTIFIER, TokenType.EQUAL, TokenType.MINUS,
    TokenType.INT_LIT, TokenType.SLASH, TokenType.INT_LIT, TokenType.STAR, TokenType.IDENTIFIER,
    TokenType.NEWLINE, TokenType.EOF,
  ]
  assert tokens[5].literal == 3
  assert not handler.has_error()


@pytest.mark.parametrize(("source", "message"), [
  ("x @ y", "unknown character"),
  ("2x", "names must start with a letter"),
])
def test_scanner_errors(source, message):
  handler = ErrorHandler()
  Scanner(source, handler).scan_tokens()
  assert any(message in m for m in handler.messages())


def test_parse_torus_with_products():
  a, handler = parse(TORUS + "  a*b = ab\n")
  assert not handler.has_error()
  assert a.dimension == 2
  assert [b.name for b in a.basis] == ["one", "a", "b", "ab"]
  assert a.orientation == a.index("ab")
  assert a.product(a.index("b"), a.index("a")) == {a.index("ab"): -1}


def test_zero_denominator_is_a_parse_error():
  a, handler = parse(TORUS + "  a*b = 1/0*ab\n")
  assert a is None
  messages = handler.messages()
  assert len(messages) == 1
  assert "Zero denominator" in messages[0]
  assert "line 10" in messages[0]


def test_errors_are_accumulated_with_line_numbers():
  a, handler = parse(TORUS + "  a*b = ab\n  a*b = ab\n  a*c = ab\n")
  assert a is None
  messages = handler.messages()
  assert len(messages) == 2
  assert "Duplicate product line" in messages[0] and "line 11" in messages[0]
  assert "Unknown basis name 'c'" in messages[1] and "line 12" in messages[1]


def test_parser_recovers_after_a_bad_line():
  a, handler = parse(TORUS + "  a*b ab\n  a*b = 2*\n")
  assert a is None
  assert len(handler.messages()) == 2


def test_missing_sections():
  a, handler = parse("basis:\n  one 0\n")
  assert a is None
  messages = " ".join(handler.messages())
  assert "Missing 'dimension:' section." in messages
  assert "Missing 'unit:' section." in messages


def test_coefficient_without_name():
  a, handler = parse(TORUS + "  a*b = 3\n")
  assert a is None
  assert "must multiply a basis name" in handler.messages()[0]


def test_flush_clears_the_handler(capsys):
  _, handler = parse(TORUS + "  a*b = q\n")
  handler.flush()
  assert "Unknown basis name 'q'" in capsys.readouterr().err
  assert not handler.has_error()


@pytest.mark.parametrize(("source", "terms"), [
  ("ab", [(Fraction(1), "ab")]),
  ("-a", [(Fraction(-1), "a")]),
  ("2*x2 - 1/2*x", [(Fraction(2), "x2"), (Fraction(-1, 2), "x")]),
  ("0", []),
])
def test_read_expression(source, terms):
  handler = ErrorHandler()
  assert read_expression(source, handler) == terms
  assert not handler.has_error()


def test_read_expression_rejects_trailing_text():
  handler = ErrorHandler()
  read_expression("a b", handler)
  assert handler.has_error()


def test_read_decomposition():
  handler = ErrorHandler()
  assert read_decomposition("a1:b1, a2:b2", handler) == [("a1", "b1"), ("a2", "b2")]
  read_decomposition("a1:b1 a2", handler)
  assert handler.has_error()


@pytest.mark.parametrize("path", sorted(FIXTURES.glob("*.alg")), ids=lambda p: p.stem)
def test_fixture_round_trip(path):
  original, handler = parse(path.read_text(encoding="utf-8"))
  assert original is not None, handler.messages()
  text = write_algebra(original)
  again, handler = parse(text)
  assert again is not None, handler.messages()
  assert write_algebra(again) == text
  assert [b.name for b in again.basis] == [b.name for b in original.basis]
  for i in range(original.size):
    for j in range(original.size):
      assert again.product(i, j) == original.product(i, j)


def test_scalar_format():
  assert format_scalar(Fraction(-3, 6)) == "-1/2"
  assert format_scalar(Fraction(4)) == "4"
  assert parse_scalar("-1/2") == Fraction(-1, 2)


def test_combination_format():
  names = ["one", "a", "b"]
  assert format_combination(names, [0, Fraction(-1), Fraction(3, 2)]) == "-a + 3/2*b"
  assert format_combination(names, [0, 0, 0]) == "0"
