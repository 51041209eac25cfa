from dataclasses import dataclass
from typing import Optional
from .token_type import TokenType

@dataclass
class Token:
  token_type: TokenType
  line: int
  col: int
  lexeme: str
  literal: Optional[int] = None
