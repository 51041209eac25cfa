from fractions import Fraction
from typing import List, Sequence
from .galg import GradedAlgebra


def format_scalar(c: Fraction) -> str:
  """A scalar as `p/q`, or `p` when the denominator is 1."""
  c = Fraction(c)
  if c.denominator == 1:
    return str(c.numerator)
  return f"{c.numerator}/{c.denominator}"


def parse_scalar(text: str) -> Fraction:
  return Fraction(text)


def format_combination(names: Sequence[str], v: Sequence[Fraction]) -> str:
  """A vector as a linear combination such as `2*x - 1/2*y`; `0` for zero."""
  parts: List[str] = []
  for name, c in zip(names, v):
    if not c:
      continue
    sign = "-" if c < 0 else "+"
    magnitude = abs(Fraction(c))
    term = name if magnitude == 1 else f"{format_scalar(magnitude)}*{name}"
    if parts:
      parts.append(f"{sign} {term}")
    else:
      parts.append(term if sign == "+" else f"-{term}")
  return " ".join(parts) if parts else "0"


def format_vector(a: GradedAlgebra, v: Sequence[Fraction]) -> str:
  return format_combination([b.name for b in a.basis], v)


def write_algebra(a: GradedAlgebra) -> str:
  """
  The algebra file text of an algebra.

  Only nonzero products of non-unit basis pairs with i <= j are written, which is
  enough to reproduce every structure constant on reading back.
  """
  lines = [f"dimension: {a.dimension}", "basis:"]
  width = max((len(b.name) for b in a.basis), default=0)
  lines.extend(f"  {b.name.ljust(width)} {b.degree}" for b in a.basis)
  lines.append(f"unit: {a.name(a.unit)}")
  if a.orientation is not None:
    lines.append(f"orientation: {a.name(a.orientation)}")
  lines.append("products:")
  for i in range(a.size):
    for j in range(i, a.size):
      if a.unit in (i, j):
        continue
      row = a.product(i, j)
      if not row:
        continue
      v = [row.get(k, Fraction(0)) for k in range(a.size)]
      lines.append(f"  {a.name(i)}*{a.name(j)} = {format_vector(a, v)}")
  return "\n".join(lines) + "\n"
