from enum import Enum

_token_type_list = [
  # punctuation
  "COLON", "COMMA", "NEWLINE",

  # operators
  "PLUS", "MINUS", "STAR", "SLASH", "EQUAL",

  # section keywords
  "DIMENSION", "BASIS", "UNIT", "ORIENTATION", "PRODUCTS",

  # literals
  "INT_LIT", "IDENTIFIER",

  # end of file
  "EOF"
]
TokenType = Enum("TokenType", " ".join(_token_type_list))
