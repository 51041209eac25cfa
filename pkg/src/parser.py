from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Optional, Tuple
from .error import ErrorHandler, AlgebraFileError
from .galg import BasisElement, GradedAlgebra
from .scanner import Scanner
from .token import Token
from .token_type import TokenType

Terms = List[Tuple[Fraction, str]]


class ParseError(Exception):
  """An exception thrown when the parser encounters an error."""
  pass


@dataclass
class ProductLine:
  left: Token
  right: Token
  terms: List[Tuple[Fraction, Token]]


@dataclass
class AlgebraSections:
  """The sections of an algebra file, before names are resolved."""
  dimension: Optional[int] = None
  basis: List[Tuple[Token, int]] = field(default_factory=list)
  unit: Optional[Token] = None
  orientation: Optional[Token] = None
  products: List[ProductLine] = field(default_factory=list)


class Parser:
  """A recursive-descent parser for algebra files, expressions and decompositions."""
  def __init__(self, tokens: List[Token], error_handler: ErrorHandler):
    self.tokens = tokens
    self.error_handler = error_handler
    self.current = 0
    self.section = None

    self.section_keywords = {
      TokenType.DIMENSION: self._parse_dimension,
      TokenType.BASIS: self._parse_basis_header,
      TokenType.UNIT: self._parse_unit,
      TokenType.ORIENTATION: self._parse_orientation,
      TokenType.PRODUCTS: self._parse_products_header,
    }
    self.section_entries = {
      TokenType.BASIS: self._parse_basis_entry,
      TokenType.PRODUCTS: self._parse_product_entry,
    }


  def parse_algebra(self) -> Optional[GradedAlgebra]:
    """Parse a whole algebra file; returns None if any error was reported."""
    sections = AlgebraSections()
    while not self._is_at_end():
      if self._match(TokenType.NEWLINE):
        continue
      self._parse_line(sections)

    algebra = self._build(sections)
    if self.error_handler.has_error():
      return None
    return algebra


  def parse_expression(self) -> Terms:
    """Parse a standalone linear combination such as `2*x + 1/2*y`."""
    terms = []
    try:
      terms = self._parse_terms()
      if not self._is_at_end():
        raise self._error(self._peek(), "Expected end of expression.")
    except ParseError:
      pass
    return [(c, token.lexeme) for c, token in terms]


  def parse_decomposition(self) -> List[Tuple[str, str]]:
    """Parse a list of factor pairs such as `a1:b1, a2:b2`."""
    pairs = []
    try:
      while True:
        left = self._consume(TokenType.IDENTIFIER, "Expected a basis name.")
        self._consume(TokenType.COLON, "Expected ':' between the two factors.")
        right = self._consume(TokenType.IDENTIFIER, "Expected a basis name.")
        pairs.append((left.lexeme, right.lexeme))
        if not self._match(TokenType.COMMA):
          break
      if not self._is_at_end():
        raise self._error(self._peek(), "Expected ',' or end of decomposition.")
    except ParseError:
      pass
    return pairs


  def _parse_line(self, sections: AlgebraSections) -> None:
    try:
      token = self._peek()
      header = self.section_keywords.get(token.token_type)
      if header is not None:
        self._advance()
        self._consume(TokenType.COLON, f"Expected ':' after \'{token.lexeme}\'.")
        header(sections)
      else:
        entry = self.section_entries.get(self.section)
        if entry is None:
          raise self._error(token, "Expected a section header.")
        entry(sections)
      self._end_line()
    except ParseError:
      self._synchronize()


  def _parse_dimension(self, sections: AlgebraSections) -> None:
    token = self._consume(TokenType.INT_LIT, "Expected the formal dimension.")
    if sections.dimension is not None:
      self._error(token, "Duplicate dimension.")
    sections.dimension = token.literal
    self.section = None


  def _parse_basis_header(self, sections: AlgebraSections) -> None:
    self.section = TokenType.BASIS


  def _parse_basis_entry(self, sections: AlgebraSections) -> None:
    name = self._consume(TokenType.IDENTIFIER, "Expected a basis name.")
    negative = self._match(TokenType.MINUS)
    degree = self._consume(TokenType.INT_LIT, "Expected the degree of the basis element.")
    if negative:
      self._error(degree, "Degrees must be non-negative.")
    sections.basis.append((name, degree.literal))


  def _parse_unit(self, sections: AlgebraSections) -> None:
    token = self._consume(TokenType.IDENTIFIER, "Expected the name of the unit.")
    if sections.unit is not None:
      self._error(token, "Duplicate unit.")
    sections.unit = token
    self.section = None


  def _parse_orientation(self, sections: AlgebraSections) -> None:
    token = self._consume(TokenType.IDENTIFIER, "Expected the name of the orientation class.")
    if sections.orientation is not None:
      self._error(token, "Duplicate orientation.")
    sections.orientation = token
    self.section = None


  def _parse_products_header(self, sections: AlgebraSections) -> None:
    self.section = TokenType.PRODUCTS


  def _parse_product_entry(self, sections: AlgebraSections) -> None:
    left = self._consume(TokenType.IDENTIFIER, "Expected a basis name.")
    self._consume(TokenType.STAR, "Expected '*' between the two factors.")
    right = self._consume(TokenType.IDENTIFIER, "Expected a basis name.")
    self._consume(TokenType.EQUAL, "Expected '=' after the product.")
    terms = self._parse_terms()
    sections.products.append(ProductLine(left, right, terms))


  def _parse_terms(self) -> List[Tuple[Fraction, Token]]:
    terms = []
    sign = -1 if self._match(TokenType.MINUS) else 1
    while True:
      term = self._parse_term(sign)
      if term is not None:
        terms.append(term)
      if self._match(TokenType.PLUS):
        sign = 1
      elif self._match(TokenType.MINUS):
        sign = -1
      else:
        return terms


  def _parse_term(self, sign: int) -> Optional[Tuple[Fraction, Token]]:
    if self._match(TokenType.IDENTIFIER):
      return (Fraction(sign), self._previous())

    start = self._peek()
    coeff = self._parse_scalar()
    if self._match(TokenType.STAR):
      name = self._consume(TokenType.IDENTIFIER, "Expected a basis name after '*'.")
      return (sign * coeff, name)
    if coeff != 0:
      raise self._error(start, "A nonzero coefficient must multiply a basis name.")
    return None


  def _parse_scalar(self) -> Fraction:
    numerator = self._consume(TokenType.INT_LIT, "Expected a coefficient or a basis name.")
    if not self._match(TokenType.SLASH):
      return Fraction(numerator.literal)
    denominator = self._consume(TokenType.INT_LIT, "Expected a denominator after '/'.")
    if denominator.literal == 0:
      raise self._error(denominator, f"Zero denominator in \'{numerator.lexeme}/0\'.")
    return Fraction(numerator.literal, denominator.literal)


  def _build(self, sections: AlgebraSections) -> Optional[GradedAlgebra]:
    """Resolve names and assemble the algebra, reporting every problem found."""
    last = self._peek()
    if sections.dimension is None:
      self._error(last, "Missing 'dimension:' section.")
    if not sections.basis:
      self._error(last, "Missing or empty 'basis:' section.")
    if sections.unit is None:
      self._error(last, "Missing 'unit:' section.")

    index: Dict[str, int] = {}
    basis = []
    for token, degree in sections.basis:
      if token.lexeme in index:
        self._error(token, f"Duplicate basis name \'{token.lexeme}\'.")
        continue
      index[token.lexeme] = len(basis)
      basis.append(BasisElement(token.lexeme, degree))

    def resolve(token: Token) -> Optional[int]:
      if token.lexeme not in index:
        self._error(token, f"Unknown basis name \'{token.lexeme}\'.")
        return None
      return index[token.lexeme]

    unit = resolve(sections.unit) if sections.unit is not None else None
    orientation = resolve(sections.orientation) if sections.orientation is not None else None

    products: Dict[Tuple[int, int], Dict[int, Fraction]] = {}
    for line in sections.products:
      i, j = resolve(line.left), resolve(line.right)
      row: Dict[int, Fraction] = {}
      for c, token in line.terms:
        k = resolve(token)
        if k is not None:
          row[k] = row.get(k, Fraction(0)) + c
      if i is None or j is None:
        continue
      if (i, j) in products:
        self._error(line.left, f"Duplicate product line for {line.left.lexeme}*{line.right.lexeme}.")
        continue
      products[(i, j)] = row

    if self.error_handler.has_error() or unit is None or sections.dimension is None:
      return None
    return GradedAlgebra(sections.dimension, basis, unit, products, orientation)


  def _end_line(self) -> None:
    if not self._is_at_end():
      self._consume(TokenType.NEWLINE, "Expected end of line.")


  def _synchronize(self) -> None:
    while not self._is_at_end():
      if self._advance().token_type == TokenType.NEWLINE:
        return


  def _match(self, *token_types: TokenType) -> bool:
    for token_type in token_types:
      if self._check(token_type):
        self._advance()
        return True
    return False


  def _consume(self, token_type: TokenType, message: str) -> Token:
    if self._check(token_type):
      return self._advance()

    raise self._error(self._peek(), message)


  def _check(self, token_type: TokenType) -> bool:
    return not self._is_at_end() and self._peek().token_type == token_type


  def _advance(self) -> Token:
    if not self._is_at_end():
      self.current += 1
    return self._previous()


  def _is_at_end(self) -> bool:
    return self._peek().token_type == TokenType.EOF


  def _peek(self) -> Token:
    return self.tokens[self.current]


  def _previous(self) -> Token:
    return self.tokens[self.current - 1]


  def _error(self, token: Token, message: str) -> ParseError:
    text = repr(token.lexeme) if token.lexeme and token.token_type != TokenType.NEWLINE else None
    self.error_handler.error(
      AlgebraFileError(message, token.line, token.col, text)
    )
    return ParseError()


def read_algebra(source: str, error_handler: ErrorHandler) -> Optional[GradedAlgebra]:
  """Scan and parse algebra file text; errors go to the handler."""
  tokens = Scanner(source, error_handler).scan_tokens()
  if error_handler.has_error():
    return None
  return Parser(tokens, error_handler).parse_algebra()


def read_expression(source: str, error_handler: ErrorHandler) -> Terms:
  tokens = Scanner(source, error_handler).scan_tokens()
  if error_handler.has_error():
    return []
  return Parser(tokens, error_handler).parse_expression()


def read_decomposition(source: str, error_handler: ErrorHandler) -> List[Tuple[str, str]]:
  tokens = Scanner(source, error_handler).scan_tokens()
  if error_handler.has_error():
    return []
  return Parser(tokens, error_handler).parse_decomposition()
