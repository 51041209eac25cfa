"""
Exact rational linear algebra.

Everything here works over `fractions.Fraction`, so nothing is ever rounded.
Matrices are stored dense and row-major, but elimination runs on sparse rows
(one dict per row, column -> nonzero entry), which is what keeps the
symmetric-power maps of this package cheap: they have very few nonzeros.

Pivoting is deterministic: the leftmost column with a nonzero entry in the
remaining rows, and among those rows the first one. Every "choice" made
downstream (kernel bases, particular solutions, complements) follows from
this convention.
"""
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, Iterable, List, Optional, Sequence, Tuple
import logging

from .exception import InputException

Scalar = Fraction
Vector = Tuple[Fraction, ...]
SparseRow = Dict[int, Fraction]

ZERO = Fraction(0)
ONE = Fraction(1)


def zero_vector(n: int) -> Vector:
  return (ZERO,) * n


def unit_vector(n: int, i: int) -> Vector:
  """The i-th standard coordinate vector of length n."""
  v = [ZERO] * n
  v[i] = ONE
  return tuple(v)


def add(u: Vector, v: Vector) -> Vector:
  return tuple(a + b for a, b in zip(u, v))


def sub(u: Vector, v: Vector) -> Vector:
  return tuple(a - b for a, b in zip(u, v))


def scale(c: Fraction, v: Vector) -> Vector:
  if c == 0:
    return zero_vector(len(v))
  return tuple(c * a for a in v)


def is_zero(v: Sequence[Fraction]) -> bool:
  return not any(v)


def combine(terms: Iterable[Tuple[Fraction, Vector]], n: int) -> Vector:
  """Sum of c * v over the given terms, as a vector of length n."""
  acc = [ZERO] * n
  for c, v in terms:
    if c == 0:
      continue
    for i, x in enumerate(v):
      if x:
        acc[i] += c * x
  return tuple(acc)


def to_sparse(v: Sequence[Fraction]) -> SparseRow:
  return {i: Fraction(x) for i, x in enumerate(v) if x}


def to_dense(row: SparseRow, n: int) -> Vector:
  v = [ZERO] * n
  for i, x in row.items():
    v[i] = x
  return tuple(v)


def _normalize_leading(v: List[Fraction]) -> Vector:
  """Scale v so that its first nonzero entry is 1."""
  for x in v:
    if x:
      return tuple(a / x for a in v)
  return tuple(v)


@dataclass(frozen=True)
class Matrix:
  """A dense rational matrix, stored row-major."""
  rows: int
  cols: int
  entries: Tuple[Fraction, ...]

  def __post_init__(self):
    if len(self.entries) != self.rows * self.cols:
      raise InputException(
        f"matrix of shape {self.rows}x{self.cols} given {len(self.entries)} entries"
      )

  @classmethod
  def from_rows(cls, rows: Sequence[Sequence[Fraction]], cols: Optional[int] = None) -> "Matrix":
    ncols = cols if cols is not None else (len(rows[0]) if rows else 0)
    entries = []
    for row in rows:
      if len(row) != ncols:
        raise InputException(f"ragged matrix row of length {len(row)}, expected {ncols}")
      entries.extend(Fraction(x) for x in row)
    return cls(len(rows), ncols, tuple(entries))

  @classmethod
  def from_columns(cls, columns: Sequence[Sequence[Fraction]], rows: int) -> "Matrix":
    for column in columns:
      if len(column) != rows:
        raise InputException(f"matrix column of length {len(column)}, expected {rows}")
    entries = [Fraction(columns[j][i]) for i in range(rows) for j in range(len(columns))]
    return cls(rows, len(columns), tuple(entries))

  @classmethod
  def zero(cls, rows: int, cols: int) -> "Matrix":
    return cls(rows, cols, (ZERO,) * (rows * cols))

  @classmethod
  def identity(cls, n: int) -> "Matrix":
    return cls.from_rows([unit_vector(n, i) for i in range(n)], n)

  def entry(self, i: int, j: int) -> Fraction:
    return self.entries[i * self.cols + j]

  def row(self, i: int) -> Vector:
    return self.entries[i * self.cols:(i + 1) * self.cols]

  def column(self, j: int) -> Vector:
    return tuple(self.entries[i * self.cols + j] for i in range(self.rows))

  def apply(self, v: Sequence[Fraction]) -> Vector:
    if len(v) != self.cols:
      raise InputException(f"cannot apply {self.rows}x{self.cols} matrix to vector of length {len(v)}")
    support = [(j, x) for j, x in enumerate(v) if x]
    return tuple(
      sum((self.entries[i * self.cols + j] * x for j, x in support), ZERO)
      for i in range(self.rows)
    )

  def transpose(self) -> "Matrix":
    return Matrix.from_rows([self.column(j) for j in range(self.cols)], self.rows)

  def sparse_rows(self) -> List[SparseRow]:
    return [to_sparse(self.row(i)) for i in range(self.rows)]


@dataclass(frozen=True)
class Subspace:
  """A subspace of K^ambient_dim given by a linearly independent basis."""
  ambient_dim: int
  basis: Tuple[Vector, ...]

  @property
  def dim(self) -> int:
    return len(self.basis)

  @classmethod
  def zero(cls, n: int) -> "Subspace":
    return cls(n, ())

  @classmethod
  def whole(cls, n: int) -> "Subspace":
    return cls(n, tuple(unit_vector(n, i) for i in range(n)))

  def matrix(self) -> Matrix:
    """The ambient_dim x dim matrix whose columns are the basis."""
    return Matrix.from_columns(self.basis, self.ambient_dim)

  def contains(self, v: Sequence[Fraction]) -> bool:
    return SpanSolver(self.basis, self.ambient_dim).coordinates(v) is not None


def row_reduce(rows: List[SparseRow], cols: int) -> Tuple[List[SparseRow], List[int]]:
  """
  Reduced row echelon form of the given sparse rows.

  Returns the nonzero reduced rows (each with a leading 1 at its pivot) and the
  pivot columns, in order. The input rows are not modified.
  """
  work = [dict(row) for row in rows if row]
  pivots: List[int] = []
  placed = 0
  for c in range(cols):
    if placed == len(work):
      break
    pick = None
    for r in range(placed, len(work)):
      if c in work[r]:
        pick = r
        break
    if pick is None:
      continue
    work[placed], work[pick] = work[pick], work[placed]
    prow = work[placed]
    lead = prow[c]
    if lead != 1:
      prow = {k: x / lead for k, x in prow.items()}
      work[placed] = prow
    for r in range(len(work)):
      if r == placed:
        continue
      target = work[r]
      f = target.get(c)
      if not f:
        continue
      for k, x in prow.items():
        nx = target.get(k, ZERO) - f * x
        if nx:
          target[k] = nx
        else:
          target.pop(k, None)
    pivots.append(c)
    placed += 1
  return work[:placed], pivots


def rank(m: Matrix) -> int:
  return len(row_reduce(m.sparse_rows(), m.cols)[1])


def kernel_basis(m: Matrix) -> Subspace:
  """A basis of {v : m v = 0}, one vector per free column, each with leading entry 1."""
  reduced, pivots = row_reduce(m.sparse_rows(), m.cols)
  pivot_set = set(pivots)
  basis = []
  for f in range(m.cols):
    if f in pivot_set:
      continue
    v = [ZERO] * m.cols
    v[f] = ONE
    for row, p in zip(reduced, pivots):
      x = row.get(f)
      if x:
        v[p] = -x
    basis.append(_normalize_leading(v))
  logging.debug("  Kernel of %dx%d matrix has dimension %d", m.rows, m.cols, len(basis))
  return Subspace(m.cols, tuple(basis))


def solve_particular(m: Matrix, b: Sequence[Fraction]) -> Optional[Vector]:
  """
  Some v with m v = b, or None if b is not in the image of m.

  Free variables are set to zero, so the solution is supported on the pivot columns.
  """
  if len(b) != m.rows:
    raise InputException(f"right-hand side of length {len(b)} for a matrix with {m.rows} rows")
  rows = m.sparse_rows()
  for i, x in enumerate(b):
    if x:
      rows[i][m.cols] = Fraction(x)
  reduced, pivots = row_reduce(rows, m.cols + 1)
  if pivots and pivots[-1] == m.cols:
    return None
  v = [ZERO] * m.cols
  for row, p in zip(reduced, pivots):
    v[p] = row.get(m.cols, ZERO)
  return tuple(v)


def column_space(m: Matrix) -> Subspace:
  """A basis of the image of m, taken from the columns of m at the pivot positions."""
  _, pivots = row_reduce(m.sparse_rows(), m.cols)
  return Subspace(m.rows, tuple(m.column(j) for j in pivots))


def span(vectors: Sequence[Sequence[Fraction]], ambient_dim: int) -> Subspace:
  """The span of some vectors, with a basis drawn greedily from them."""
  if not vectors:
    return Subspace.zero(ambient_dim)
  return column_space(Matrix.from_columns(vectors, ambient_dim))


def intersect(u: Subspace, v: Subspace) -> Subspace:
  if u.ambient_dim != v.ambient_dim:
    raise InputException(
      f"cannot intersect subspaces of K^{u.ambient_dim} and K^{v.ambient_dim}"
    )
  n = u.ambient_dim
  if not u.dim or not v.dim:
    return Subspace.zero(n)
  columns = list(u.basis) + [tuple(-x for x in w) for w in v.basis]
  relations = kernel_basis(Matrix.from_columns(columns, n))
  result = [combine(zip(rel[:u.dim], u.basis), n) for rel in relations.basis]
  return Subspace(n, tuple(result))


class SpanSolver:
  """Coordinates of vectors with respect to a fixed linearly independent family."""
  def __init__(self, basis: Sequence[Sequence[Fraction]], ambient_dim: int):
    self.ambient_dim = ambient_dim
    self.size = len(basis)
    # echelon rows: (pivot, row with 1 at pivot, combination of the basis giving the row)
    self.rows: List[Tuple[int, SparseRow, SparseRow]] = []
    for k, b in enumerate(basis):
      residual, comb = self._reduce(to_sparse(b))
      if not residual:
        raise InputException(f"basis vector {k} is linearly dependent on the previous ones")
      comb[k] = comb.get(k, ZERO) + ONE
      pivot = min(residual)
      lead = residual[pivot]
      self.rows.append((
        pivot,
        {i: x / lead for i, x in residual.items()},
        {i: x / lead for i, x in comb.items() if x},
      ))

  def _reduce(self, v: SparseRow) -> Tuple[SparseRow, SparseRow]:
    """Reduce v against the echelon rows; returns (residual, -combination used)."""
    v = dict(v)
    comb: SparseRow = {}
    for pivot, row, row_comb in self.rows:
      f = v.get(pivot)
      if not f:
        continue
      for i, x in row.items():
        nx = v.get(i, ZERO) - f * x
        if nx:
          v[i] = nx
        else:
          v.pop(i, None)
      for i, x in row_comb.items():
        nx = comb.get(i, ZERO) - f * x
        if nx:
          comb[i] = nx
        else:
          comb.pop(i, None)
    return v, comb

  def coordinates(self, v: Sequence[Fraction]) -> Optional[Vector]:
    """The coefficients c with sum c_k b_k = v, or None if v is not in the span."""
    if len(v) != self.ambient_dim:
      raise InputException(f"vector of length {len(v)} in a space of dimension {self.ambient_dim}")
    residual, comb = self._reduce(to_sparse(v))
    if residual:
      return None
    return tuple(-comb.get(k, ZERO) for k in range(self.size))

  def is_independent(self, v: Sequence[Fraction]) -> bool:
    return bool(self._reduce(to_sparse(v))[0])


def complement_in(u: Subspace, w: Optional[Subspace] = None) -> Subspace:
  """
  A complement c of u inside w (or inside the ambient space when w is None).

  Candidates are taken greedily in order: the standard coordinate vectors when
  w is the ambient space, the basis of w otherwise.
  """
  n = u.ambient_dim
  if w is not None:
    if w.ambient_dim != n:
      raise InputException(f"complement of a subspace of K^{n} inside K^{w.ambient_dim}")
    inside = SpanSolver(w.basis, n)
    for k, vec in enumerate(u.basis):
      if inside.coordinates(vec) is None:
        raise InputException(f"basis vector {k} of the subspace does not lie in the larger space")
    candidates = list(w.basis)
  else:
    candidates = [unit_vector(n, i) for i in range(n)]

  chosen: List[Vector] = []
  solver = SpanSolver(u.basis, n)
  target = w.dim if w is not None else n
  for vec in candidates:
    if u.dim + len(chosen) == target:
      break
    if solver.is_independent(vec):
      chosen.append(tuple(vec))
      solver = SpanSolver(list(u.basis) + chosen, n)
  return Subspace(n, tuple(chosen))


class QuotientReader:
  """Coordinates in a complement c of a subspace u, for vectors of u + c."""
  def __init__(self, u: Subspace, complement: Subspace):
    self.u = u
    self.complement = complement
    self.solver = SpanSolver(list(u.basis) + list(complement.basis), u.ambient_dim)

  def split(self, v: Sequence[Fraction]) -> Optional[Tuple[Vector, Vector]]:
    """(coordinates in u, coordinates in the complement), or None outside u + c."""
    coords = self.solver.coordinates(v)
    if coords is None:
      return None
    return coords[:self.u.dim], coords[self.u.dim:]
