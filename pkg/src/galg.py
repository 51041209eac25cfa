"""
Finite-dimensional graded-commutative unital algebras over the rationals.

An algebra is a list of named basis elements with degrees and a table of
structure constants. Elements are flat coordinate tuples over the whole basis
(`GradedVector`); `components` splits one by degree.
"""
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from typing import Dict, Iterable, List, Optional, Sequence, Tuple, Union
import logging

from .exactla import Matrix, SparseRow, Vector, ZERO, ONE, rank, solve_particular, to_dense, to_sparse
from .exception import InputException, PoincareException

GradedVector = Vector


def koszul_sign(p: int, q: int) -> int:
  """The sign (-1)^(p*q) picked up when commuting elements of degrees p and q."""
  return -1 if (p * q) % 2 else 1


@dataclass(frozen=True)
class BasisElement:
  name: str
  degree: int


def _accumulate(acc: SparseRow, row: SparseRow, factor: Fraction) -> None:
  for k, c in row.items():
    x = acc.get(k, ZERO) + factor * c
    if x:
      acc[k] = x
    else:
      acc.pop(k, None)


class GradedAlgebra:
  """
  A graded-commutative unital algebra given by a basis and structure constants.

  `products` maps an index pair (i, j) to the coordinates of b_i * b_j. Pairs
  that are absent are derived: (j, i) from (i, j) by the Koszul sign, products
  with the unit as the identity, and everything else as zero. A pair may be
  given in both orders, in which case `validate` checks that they agree.
  """
  def __init__(
    self,
    dimension: int,
    basis: Sequence[BasisElement],
    unit: int,
    products: Dict[Tuple[int, int], Union[Sequence[Fraction], SparseRow]],
    orientation: Optional[int] = None,
  ):
    self.dimension = dimension
    self.basis = tuple(basis)
    self.unit = unit
    self.orientation = orientation
    self.table: Dict[Tuple[int, int], SparseRow] = {}
    for (i, j), coeffs in products.items():
      row = dict(coeffs) if isinstance(coeffs, dict) else to_sparse(coeffs)
      self.table[(i, j)] = {k: Fraction(c) for k, c in row.items() if c}

    self._index = {b.name: i for i, b in enumerate(self.basis)}
    self._by_degree: Dict[int, List[int]] = {}
    for i, b in enumerate(self.basis):
      self._by_degree.setdefault(b.degree, []).append(i)
    self._mult: Dict[Tuple[int, int], SparseRow] = {}
    for i in range(len(self.basis)):
      for j in range(len(self.basis)):
        row = self._derive(i, j)
        if row:
          self._mult[(i, j)] = row

  def _derive(self, i: int, j: int) -> SparseRow:
    stored = self.table.get((i, j))
    if stored is not None:
      return stored
    stored = self.table.get((j, i))
    if stored is not None:
      if koszul_sign(self.degree(i), self.degree(j)) < 0:
        return {k: -c for k, c in stored.items()}
      return stored
    if i == self.unit:
      return {j: ONE}
    if j == self.unit:
      return {i: ONE}
    return {}

  def __len__(self) -> int:
    return len(self.basis)

  @property
  def size(self) -> int:
    return len(self.basis)

  @property
  def top_degree(self) -> int:
    return max((b.degree for b in self.basis), default=0)

  @property
  def degrees(self) -> List[int]:
    """The degrees carrying a nonzero component, in increasing order."""
    return sorted(self._by_degree)

  def degree(self, i: int) -> int:
    return self.basis[i].degree

  def name(self, i: int) -> str:
    return self.basis[i].name

  def index(self, name: str) -> int:
    if name not in self._index:
      raise InputException(f"unknown basis element \'{name}\'")
    return self._index[name]

  def indices_in_degree(self, d: int) -> List[int]:
    return self._by_degree.get(d, [])

  def dim_in_degree(self, d: int) -> int:
    return len(self._by_degree.get(d, []))

  def product(self, i: int, j: int) -> SparseRow:
    """The coordinates of b_i * b_j. The returned dict must not be modified."""
    return self._mult.get((i, j), {})

  def element(self, name: str) -> GradedVector:
    return to_dense({self.index(name): ONE}, self.size)

  def vector(self, terms: Iterable[Tuple[Fraction, str]]) -> GradedVector:
    """The vector sum c * b_name over the given terms."""
    acc: SparseRow = {}
    for c, name in terms:
      _accumulate(acc, {self.index(name): ONE}, Fraction(c))
    return to_dense(acc, self.size)

  def multiply_sparse(self, u: SparseRow, v: SparseRow) -> SparseRow:
    acc: SparseRow = {}
    for i, x in u.items():
      for j, y in v.items():
        row = self._mult.get((i, j))
        if row:
          _accumulate(acc, row, x * y)
    return acc

  def components(self, v: Sequence[Fraction]) -> Dict[int, Vector]:
    """The nonzero homogeneous components of v, as block coordinates per degree."""
    result = {}
    for d, indices in self._by_degree.items():
      block = tuple(Fraction(v[i]) for i in indices)
      if any(block):
        result[d] = block
    return result

  def degree_of(self, v: Sequence[Fraction]) -> Optional[int]:
    """The degree of a homogeneous vector; None for zero."""
    degrees = {self.degree(i) for i, x in enumerate(v) if x}
    if len(degrees) > 1:
      raise InputException(f"vector is not homogeneous: it has components in degrees {sorted(degrees)}")
    return degrees.pop() if degrees else None

  def block(self, v: Sequence[Fraction], d: int) -> Vector:
    return tuple(Fraction(v[i]) for i in self.indices_in_degree(d))

  def embed(self, d: int, coords: Sequence[Fraction]) -> GradedVector:
    """The vector whose degree-d block has the given coordinates."""
    acc = {i: Fraction(x) for i, x in zip(self.indices_in_degree(d), coords) if x}
    return to_dense(acc, self.size)

  def left_multiplication(self, v: Sequence[Fraction], d: int) -> Matrix:
    """Matrix of x -> v * x from degree d to degree d + |v|, in block coordinates."""
    p = self.degree_of(v)
    p = 0 if p is None else p
    source = self.indices_in_degree(d)
    target = self.indices_in_degree(d + p)
    position = {k: r for r, k in enumerate(target)}
    rows = [[ZERO] * len(source) for _ in target]
    sv = to_sparse(v)
    for c, j in enumerate(source):
      for k, x in self.multiply_sparse(sv, {j: ONE}).items():
        rows[position[k]][c] = x
    return Matrix.from_rows(rows, len(source))

  def with_products(self, updates: Dict[Tuple[int, int], Sequence[Fraction]]) -> "GradedAlgebra":
    """A copy of this algebra with some stored structure constants replaced."""
    products = {key: dict(row) for key, row in self.table.items()}
    for key, coeffs in updates.items():
      products[key] = to_sparse(coeffs)
    return GradedAlgebra(self.dimension, self.basis, self.unit, products, self.orientation)


def multiply(a: GradedAlgebra, u: Sequence[Fraction], v: Sequence[Fraction]) -> GradedVector:
  return to_dense(a.multiply_sparse(to_sparse(u), to_sparse(v)), a.size)


ViolationKind = Enum("ViolationKind", "NAME UNIT CONNECTED DEGREE COMMUTATIVITY ASSOCIATIVITY ORIENTATION DIFFERENTIAL LEIBNIZ")


@dataclass(frozen=True)
class Violation:
  """A failed algebra axiom, with the offending basis indices."""
  kind: ViolationKind
  indices: Tuple[int, ...]
  message: str

  def __str__(self) -> str:
    return f"{self.kind.name.lower()} violation at {self.indices}: {self.message}"


def validate(a: GradedAlgebra) -> List[Violation]:
  """Check every algebra axiom exhaustively; an empty list means the algebra is valid."""
  violations: List[Violation] = []
  n = a.size

  seen = {}
  for i, b in enumerate(a.basis):
    if b.name in seen:
      violations.append(Violation(ViolationKind.NAME, (seen[b.name], i), f"duplicate name \'{b.name}\'"))
    seen.setdefault(b.name, i)
    if b.degree < 0:
      violations.append(Violation(ViolationKind.DEGREE, (i,), f"negative degree {b.degree}"))

  if not 0 <= a.unit < n or a.degree(a.unit) != 0:
    violations.append(Violation(ViolationKind.UNIT, (a.unit,), "unit must be a basis element of degree 0"))
    return violations
  if a.dim_in_degree(0) != 1:
    violations.append(Violation(
      ViolationKind.CONNECTED, tuple(a.indices_in_degree(0)),
      f"degree 0 has dimension {a.dim_in_degree(0)}, expected 1",
    ))

  if a.orientation is not None:
    if not 0 <= a.orientation < n:
      violations.append(Violation(ViolationKind.ORIENTATION, (a.orientation,), "orientation is not a basis element"))
    elif a.degree(a.orientation) != a.dimension:
      violations.append(Violation(
        ViolationKind.ORIENTATION, (a.orientation,),
        f"orientation has degree {a.degree(a.orientation)}, formal dimension is {a.dimension}",
      ))

  for (i, j), row in sorted(a.table.items()):
    if not (0 <= i < n and 0 <= j < n) or any(not 0 <= k < n for k in row):
      violations.append(Violation(ViolationKind.DEGREE, (i, j), "product refers to an unknown basis index"))
      continue
    target = a.degree(i) + a.degree(j)
    wrong = [k for k in row if a.degree(k) != target]
    if wrong:
      violations.append(Violation(
        ViolationKind.DEGREE, (i, j),
        f"product of degree {target} has components in degrees {sorted({a.degree(k) for k in wrong})}",
      ))
  if violations:
    return violations

  for i in range(n):
    for j in range(i, n):
      sign = koszul_sign(a.degree(i), a.degree(j))
      forward = a.table.get((i, j))
      backward = a.table.get((j, i))
      if forward is not None and backward is not None and i != j:
        if forward != {k: sign * c for k, c in backward.items()}:
          violations.append(Violation(
            ViolationKind.COMMUTATIVITY, (i, j),
            f"{a.name(j)}*{a.name(i)} must be {'-' if sign < 0 else '+'}{a.name(i)}*{a.name(j)}",
          ))
      if i == j and sign < 0 and a.product(i, i):
        violations.append(Violation(
          ViolationKind.COMMUTATIVITY, (i, i), f"{a.name(i)} has odd degree, so its square must vanish",
        ))

  for j in range(n):
    e = {j: ONE}
    if a.product(a.unit, j) != e or a.product(j, a.unit) != e:
      violations.append(Violation(ViolationKind.UNIT, (a.unit, j), f"unit does not act as identity on {a.name(j)}"))

  top = a.top_degree
  for i in range(n):
    for j in range(n):
      if a.degree(i) + a.degree(j) > top:
        continue
      ij = a.product(i, j)
      for k in range(n):
        if a.degree(i) + a.degree(j) + a.degree(k) > top:
          continue
        left = a.multiply_sparse(ij, {k: ONE})
        right = a.multiply_sparse({i: ONE}, a.product(j, k))
        if left != right:
          violations.append(Violation(
            ViolationKind.ASSOCIATIVITY, (i, j, k),
            f"({a.name(i)}*{a.name(j)})*{a.name(k)} != {a.name(i)}*({a.name(j)}*{a.name(k)})",
          ))
  return violations


@dataclass(frozen=True)
class PoincareStructure:
  """The pairing alpha_H(x * y) = coefficient of the orientation class in x * y."""
  algebra: GradedAlgebra
  orientation: int

  @property
  def dimension(self) -> int:
    return self.algebra.dimension

  def alpha(self, v: Sequence[Fraction]) -> Fraction:
    return Fraction(v[self.orientation])

  def pairing_matrix(self, i: int) -> Matrix:
    """P_i(x, y) = alpha_H(x y) for x in the basis of H^i and y in that of H^(n-i)."""
    a = self.algebra
    rows = [
      [a.product(x, y).get(self.orientation, ZERO) for y in a.indices_in_degree(self.dimension - i)]
      for x in a.indices_in_degree(i)
    ]
    return Matrix.from_rows(rows, a.dim_in_degree(self.dimension - i))

  def solve_dual(self, i: int, values: Sequence[Fraction]) -> GradedVector:
    """
    The x in H^i with alpha_H(x * y_c) = values[c] for the basis y_c of H^(n-i).
    """
    m = self.pairing_matrix(i).transpose()
    coords = solve_particular(m, values)
    if coords is None:
      raise PoincareException(f"pairing in degree {i} is degenerate", degree=i)
    return self.algebra.embed(i, coords)


def poincare_check(a: GradedAlgebra) -> PoincareStructure:
  """
  Verify that every pairing H^i x H^(n-i) -> K is perfect.

  Raises PoincareException naming the first degenerate degree.
  """
  if a.orientation is None:
    raise InputException("algebra has no orientation class")
  structure = PoincareStructure(a, a.orientation)
  for i in range(a.dimension + 1):
    m = structure.pairing_matrix(i)
    if m.rows != m.cols or rank(m) != m.rows:
      raise PoincareException(
        f"pairing H^{i} x H^{a.dimension - i} is degenerate ({m.rows}x{m.cols}, rank {rank(m)})",
        degree=i,
      )
  for d in a.degrees:
    if d > a.dimension:
      raise PoincareException(f"nonzero component in degree {d} above the formal dimension", degree=d)
  logging.debug("  Verified Poincare duality in formal dimension %d", a.dimension)
  return structure


def euler_characteristic(a: GradedAlgebra) -> int:
  return sum((-1) ** d * a.dim_in_degree(d) for d in a.degrees)


class CDGA:
  """A graded algebra with a differential of degree +1, given on the basis."""
  def __init__(self, algebra: GradedAlgebra, differential: Dict[int, SparseRow]):
    self.algebra = algebra
    self.differential = {i: dict(row) for i, row in differential.items() if row}

  def d(self, v: SparseRow) -> SparseRow:
    acc: SparseRow = {}
    for i, x in v.items():
      row = self.differential.get(i)
      if row:
        _accumulate(acc, row, x)
    return acc

  def violations(self) -> List[Violation]:
    """Algebra axioms plus degree, d^2 = 0 and the Leibniz rule on basis pairs."""
    a = self.algebra
    found = validate(a)
    for i in range(a.size):
      di = self.d({i: ONE})
      if any(a.degree(k) != a.degree(i) + 1 for k in di):
        found.append(Violation(ViolationKind.DIFFERENTIAL, (i,), f"d({a.name(i)}) does not have degree {a.degree(i) + 1}"))
      if self.d(di):
        found.append(Violation(ViolationKind.DIFFERENTIAL, (i,), f"d(d({a.name(i)})) is not zero"))
    for i in range(a.size):
      for j in range(a.size):
        left = self.d(a.product(i, j))
        right = a.multiply_sparse(self.d({i: ONE}), {j: ONE})
        _accumulate(right, a.multiply_sparse({i: ONE}, self.d({j: ONE})), Fraction((-1) ** a.degree(i)))
        if left != right:
          found.append(Violation(
            ViolationKind.LEIBNIZ, (i, j), f"Leibniz rule fails on {a.name(i)}*{a.name(j)}",
          ))
    return found
