"""
Graded symmetric powers and the spaces the Bianchi-Massey tensor lives on.

For a graded space V with basis v_0, ..., v_{N-1}:

  - G^2 V has basis (v_i . v_j) for i <= j, with (v_i . v_i) dropped when v_i is odd;
  - G^2 G^2 V is G^2 applied to G^2 V, with degrees of G^2 V as the grading;
  - G^k V (k = 3, 4) has basis the ascending index tuples with no repeated odd index.

Bases are ordered by (degree, indices). The product kernel E = ker(c: G^2 H -> H)
and the space B = G^2 E  intersected with  K[G^2 G^2 H] are computed per degree.
"""
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations_with_replacement
from typing import Dict, List, Optional, Sequence, Tuple
import logging

from .exactla import (
  Matrix, SparseRow, Subspace, SpanSolver, Vector, ZERO, ONE,
  complement_in, intersect, kernel_basis, to_dense, to_sparse,
)
from .exception import InvariantViolation
from .galg import GradedAlgebra, koszul_sign


def koszul_sort(indices: Sequence[int], degrees: Sequence[int]) -> Optional[Tuple[Tuple[int, ...], int]]:
  """
  Sort a graded monomial by adjacent transpositions.

  Returns the sorted indices and the accumulated Koszul sign, or None when an odd
  index repeats (the monomial is then zero).
  """
  word = list(indices)
  sign = 1
  for end in range(len(word) - 1, 0, -1):
    for k in range(end):
      if word[k] > word[k + 1]:
        sign *= koszul_sign(degrees[word[k]], degrees[word[k + 1]])
        word[k], word[k + 1] = word[k + 1], word[k]
  for k in range(len(word) - 1):
    if word[k] == word[k + 1] and degrees[word[k]] % 2:
      return None
  return tuple(word), sign


class SymPowerBasis:
  """The basis of G^k V: ascending index tuples, no repeated odd index."""
  def __init__(self, degrees: Sequence[int], k: int):
    self.degrees = tuple(degrees)
    self.k = k
    words = [
      w for w in combinations_with_replacement(range(len(self.degrees)), k)
      if all(not (w[t] == w[t + 1] and self.degrees[w[t]] % 2) for t in range(k - 1))
    ]
    words.sort(key=lambda w: (sum(self.degrees[i] for i in w), w))
    self.elements: List[Tuple[int, ...]] = words
    self.element_degrees = [sum(self.degrees[i] for i in w) for w in words]
    self.index = {w: p for p, w in enumerate(words)}
    self._by_degree: Dict[int, List[int]] = {}
    for p, d in enumerate(self.element_degrees):
      self._by_degree.setdefault(d, []).append(p)

  def __len__(self) -> int:
    return len(self.elements)

  def indices_in_degree(self, d: int) -> List[int]:
    return self._by_degree.get(d, [])

  def monomial(self, indices: Sequence[int]) -> SparseRow:
    """Coordinates of the product v_{i_1} ... v_{i_k} in this basis."""
    result = koszul_sort(indices, self.degrees)
    if result is None:
      return {}
    word, sign = result
    return {self.index[word]: Fraction(sign)}


class Sym2Basis(SymPowerBasis):
  """The basis of G^2 V, pairs (i, j) with i <= j."""
  def __init__(self, degrees: Sequence[int]):
    super(Sym2Basis, self).__init__(degrees, 2)

  def canonical(self, i: int, j: int) -> Optional[Tuple[int, int]]:
    """(position, sign) of (v_i . v_j), or None when it vanishes."""
    row = self.monomial((i, j))
    if not row:
      return None
    (p, c), = row.items()
    return p, int(c)

  def pair(self, u: SparseRow, v: SparseRow) -> SparseRow:
    """The symmetric product (u . v) of two vectors of V."""
    acc: SparseRow = {}
    for i, x in u.items():
      for j, y in v.items():
        hit = self.canonical(i, j)
        if hit is None:
          continue
        p, sign = hit
        value = acc.get(p, ZERO) + sign * x * y
        if value:
          acc[p] = value
        else:
          acc.pop(p, None)
    return acc


def sym2(degrees: Sequence[int]) -> Sym2Basis:
  return Sym2Basis(degrees)


class Sym2Sym2Basis(Sym2Basis):
  """G^2 (G^2 V): pairs (p, q) of G^2 V positions, graded by the degrees of G^2 V."""
  def __init__(self, inner: Sym2Basis):
    super(Sym2Sym2Basis, self).__init__(inner.element_degrees)
    self.inner = inner


def symmetrize_column(b: Sym2Sym2Basis, g4: SymPowerBasis, position: int) -> SparseRow:
  """Image of the basis element ((v_i.v_j).(v_k.v_l)) of G^2 G^2 V in G^4 V."""
  p, q = b.elements[position]
  return g4.monomial(b.inner.elements[p] + b.inner.elements[q])


def symmetrize_to_g4(b: Sym2Sym2Basis, g4: Optional[SymPowerBasis] = None) -> Matrix:
  """The matrix of the full symmetrisation G^2 G^2 V -> G^4 V."""
  g4 = g4 if g4 is not None else SymPowerBasis(b.inner.degrees, 4)
  columns = [to_dense(symmetrize_column(b, g4, p), len(g4)) for p in range(len(b))]
  return Matrix.from_columns(columns, len(g4))


def _restrict(row: SparseRow, positions: Sequence[int]) -> Vector:
  return tuple(row.get(p, ZERO) for p in positions)


@dataclass(frozen=True)
class EBasisElement:
  """A basis vector of E, in G^2 H coordinates."""
  degree: int
  coords: Dict[int, Fraction]


@dataclass
class BSpace:
  """
  A basis of B in one degree.

  `combinations[k]` writes basis vector k over the G^2 E basis pairs (e . e');
  `vectors[k]` is the same vector in G^2 G^2 H coordinates.
  """
  degree: int
  combinations: List[SparseRow]
  vectors: List[SparseRow]

  @property
  def dim(self) -> int:
    return len(self.combinations)


class ProductKernelData:
  """E, a complement D of E, and B, for the cohomology ring h."""
  def __init__(self, h: GradedAlgebra, via_intersection: bool = False):
    self.h = h
    self.via_intersection = via_intersection
    self.sym2 = sym2([b.degree for b in h.basis])
    self.E: Dict[int, Subspace] = {}
    self.D: Dict[int, Subspace] = {}
    self.e_basis: List[EBasisElement] = []

    for d in sorted(set(self.sym2.element_degrees)):
      positions = self.sym2.indices_in_degree(d)
      c = self.product_matrix(d)
      kernel = kernel_basis(c)
      self.E[d] = kernel
      self.D[d] = complement_in(kernel)
      for vec in kernel.basis:
        self.e_basis.append(EBasisElement(d, {positions[t]: x for t, x in enumerate(vec) if x}))
    logging.debug("  Product kernel E has dimension %d", len(self.e_basis))

    self.sym2_e = sym2([e.degree for e in self.e_basis])
    self.sym2_sym2 = Sym2Sym2Basis(self.sym2)
    self.g4 = SymPowerBasis(self.sym2.degrees, 4)
    self._b_cache: Dict[int, BSpace] = {}

  def product_matrix(self, d: int) -> Matrix:
    """The matrix of c: G^2 H -> H from degree d, in block coordinates."""
    h = self.h
    target = h.indices_in_degree(d)
    columns = []
    for p in self.sym2.indices_in_degree(d):
      i, j = self.sym2.elements[p]
      columns.append(_restrict(h.product(i, j), target))
    return Matrix.from_columns(columns, len(target))

  def e_degrees(self) -> List[int]:
    return sorted({e.degree for e in self.e_basis})

  def inclusion(self, position: int) -> SparseRow:
    """Image of the G^2 E basis pair at `position` in G^2 G^2 H coordinates."""
    k, l = self.sym2_e.elements[position]
    return self.sym2_sym2.pair(self.e_basis[k].coords, self.e_basis[l].coords)

  def symmetrize(self, vector: SparseRow) -> SparseRow:
    """Image of a G^2 G^2 H vector in G^4 H."""
    acc: SparseRow = {}
    for p, x in vector.items():
      for r, c in symmetrize_column(self.sym2_sym2, self.g4, p).items():
        value = acc.get(r, ZERO) + x * c
        if value:
          acc[r] = value
        else:
          acc.pop(r, None)
    return acc

  def B(self, m: int) -> BSpace:
    if m not in self._b_cache:
      self._b_cache[m] = self._intersect(m) if self.via_intersection else self._pullback(m)
    return self._b_cache[m]

  def b_degrees(self) -> List[int]:
    """Degrees in which G^2 E is nonzero (so B may be)."""
    return sorted(set(self.sym2_e.element_degrees))

  def _pullback(self, m: int) -> BSpace:
    """B as the kernel of G^2 E -> G^2 G^2 H -> G^4 H."""
    positions = self.sym2_e.indices_in_degree(m)
    images = [self.inclusion(p) for p in positions]
    targets = sorted({r for img in images for r in self.symmetrize(img)})
    columns = [_restrict(self.symmetrize(img), targets) for img in images]
    kernel = kernel_basis(Matrix.from_columns(columns, len(targets)))
    return self._space(m, positions, images, kernel.basis)

  def _intersect(self, m: int) -> BSpace:
    """B literally as the intersection of span G^2 E with K[G^2 G^2 H]."""
    positions = self.sym2_e.indices_in_degree(m)
    images = [self.inclusion(p) for p in positions]
    ambient = self.sym2_sym2.indices_in_degree(m)
    g4_targets = self.g4.indices_in_degree(m)
    columns = [_restrict(symmetrize_column(self.sym2_sym2, self.g4, p), g4_targets) for p in ambient]
    k_space = kernel_basis(Matrix.from_columns(columns, len(g4_targets)))
    e_space = Subspace(len(ambient), tuple(_restrict(img, ambient) for img in images))
    both = intersect(e_space, k_space)

    solver = SpanSolver(e_space.basis, len(ambient))
    combos = []
    for vec in both.basis:
      coords = solver.coordinates(vec)
      if coords is None:
        raise InvariantViolation(f"intersection vector in degree {m} is not in the span of G^2 E")
      combos.append(coords)
    return self._space(m, positions, images, combos)

  def _space(self, m: int, positions: List[int], images: List[SparseRow], kernel: Sequence[Vector]) -> BSpace:
    combinations, vectors = [], []
    for vec in kernel:
      combinations.append({positions[t]: x for t, x in enumerate(vec) if x})
      acc: SparseRow = {}
      for t, x in enumerate(vec):
        if not x:
          continue
        for r, c in images[t].items():
          value = acc.get(r, ZERO) + x * c
          if value:
            acc[r] = value
          else:
            acc.pop(r, None)
      vectors.append(acc)
    logging.debug("  B in degree %d has dimension %d (G^2 E has %d)", m, len(combinations), len(positions))
    return BSpace(m, combinations, vectors)


def product_kernel(h: GradedAlgebra, via_intersection: bool = False) -> ProductKernelData:
  return ProductKernelData(h, via_intersection=via_intersection)
