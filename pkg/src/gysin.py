"""
The Gysin extension of an algebra with zero differential.

Given A and an even-degree class omega, the chain algebra A_theta = A (x) Lambda(theta)
has basis b_i, theta*b_i, with |theta| = |omega| - 1 and d(x + theta*y) = omega*y.
Chain elements are sparse rows over 2N indices: i < N is b_i, N + i is theta*b_i,
always in the normal form x + theta*y with theta on the left.

Its cohomology is coker(omega) (+) theta*ker(omega). Coker classes are represented
by a greedy complement of im(omega); theta classes by theta times a kernel basis.
"""
from dataclasses import dataclass, field
from fractions import Fraction
from random import Random
from typing import Dict, List, Optional, Sequence, Tuple
import logging

from .exactla import (
  Matrix, QuotientReader, SparseRow, SpanSolver, Subspace, Vector, ZERO, ONE,
  complement_in, kernel_basis, rank, row_reduce, to_dense, to_sparse,
)
from .exception import InputException, InvariantViolation
from .galg import BasisElement, CDGA, GradedAlgebra, koszul_sign, poincare_check, validate
from .sympow import Sym2Basis, sym2

COKER = "coker"
THETA = "theta"


def _add_into(acc: SparseRow, row: SparseRow, factor: Fraction = ONE) -> None:
  for k, c in row.items():
    x = acc.get(k, ZERO) + factor * c
    if x:
      acc[k] = x
    else:
      acc.pop(k, None)


def _is_standard(vec: Sequence[Fraction]) -> Optional[int]:
  """The position of the single 1 in a standard coordinate vector, else None."""
  support = [t for t, x in enumerate(vec) if x]
  if len(support) == 1 and vec[support[0]] == 1:
    return support[0]
  return None


@dataclass(frozen=True)
class ClassInfo:
  """A basis class of H_theta: a coker class [x] or a theta class [theta*y]."""
  kind: str
  base_degree: int
  rep: Dict[int, Fraction]


@dataclass
class DegreeData:
  """Multiplication by omega into and out of one degree d of A."""
  degree: int
  target: List[int]
  image: Subspace
  preimages: List[SparseRow]
  complement: Subspace
  reader: QuotientReader
  kernel: Subspace
  kernel_solver: SpanSolver


@dataclass(frozen=True)
class Choice:
  """
  An admissible choice of section alpha and right inverse of omega.

  `alpha[c]` is a closed chain representing class c; `preimages[d][k]` is an A
  element with omega * preimage = the k-th image basis vector in degree d;
  `gamma_shift[k]` is a closed chain added to gamma on the k-th E basis element.
  """
  alpha: Tuple[Dict[int, Fraction], ...]
  preimages: Dict[int, Tuple[Dict[int, Fraction], ...]]
  gamma_shift: Tuple[Dict[int, Fraction], ...] = field(default=())


class GysinExtension:
  """A_theta with its cohomology ring `h` and the bookkeeping maps."""
  def __init__(self, base: GradedAlgebra, omega: Sequence[Fraction], omega_degree: int):
    self.base = base
    self.omega = tuple(Fraction(x) for x in omega)
    self.omega_sparse = to_sparse(self.omega)
    self.omega_degree = omega_degree
    self.theta_degree = omega_degree - 1
    self.N = base.size

    self.chain = self._build_chain()
    self.degree_data: Dict[int, DegreeData] = {
      d: self._degree_data(d) for d in range(base.top_degree + 1)
    }
    self.classes: List[ClassInfo] = []
    self.h = self._build_cohomology()
    self.sym2: Sym2Basis = sym2([b.degree for b in self.h.basis])
    self.canonical = Choice(
      alpha=tuple(self._canonical_alpha(c) for c in self.classes),
      preimages={d: tuple(data.preimages) for d, data in self.degree_data.items()},
    )

  @property
  def chain_algebra(self) -> GradedAlgebra:
    return self.chain.algebra

  def _omega_times(self, y: SparseRow) -> SparseRow:
    return self.base.multiply_sparse(self.omega_sparse, y)

  def _omega_matrix(self, d: int) -> Matrix:
    """omega * -: A^d -> A^(d + |omega|) in block coordinates."""
    source = self.base.indices_in_degree(d)
    target = self.base.indices_in_degree(d + self.omega_degree)
    position = {k: r for r, k in enumerate(target)}
    rows = [[ZERO] * len(source) for _ in target]
    for c, j in enumerate(source):
      for k, x in self._omega_times({j: ONE}).items():
        rows[position[k]][c] = x
    return Matrix.from_rows(rows, len(source))

  def _build_chain(self) -> CDGA:
    a, N, t = self.base, self.N, self.theta_degree
    basis = list(a.basis) + [BasisElement(f"th_{b.name}", b.degree + t) for b in a.basis]
    if len({b.name for b in basis}) != len(basis):
      raise InputException("base basis names collide with the generated theta names")

    products: Dict[Tuple[int, int], SparseRow] = {}
    for i in range(N):
      for j in range(N):
        row = a.product(i, j)
        if not row:
          continue
        if i <= j:
          products[(i, j)] = dict(row)
        sign = koszul_sign(t, a.degree(i))
        products[(i, N + j)] = {N + k: sign * c for k, c in row.items()}

    differential = {N + i: self._omega_times({i: ONE}) for i in range(N)}
    algebra = GradedAlgebra(a.dimension + t, basis, a.unit, products)
    return CDGA(algebra, differential)

  def _degree_data(self, d: int) -> DegreeData:
    a = self.base
    source = a.indices_in_degree(d - self.omega_degree)
    target = a.indices_in_degree(d)
    into = self._omega_matrix(d - self.omega_degree)
    _, pivots = row_reduce(into.sparse_rows(), into.cols)
    image = Subspace(len(target), tuple(into.column(j) for j in pivots))
    complement = complement_in(image)
    kernel = kernel_basis(self._omega_matrix(d))
    return DegreeData(
      degree=d,
      target=target,
      image=image,
      preimages=[{source[j]: ONE} for j in pivots],
      complement=complement,
      reader=QuotientReader(image, complement),
      kernel=kernel,
      kernel_solver=SpanSolver(kernel.basis, len(target)),
    )

  def _build_cohomology(self) -> GradedAlgebra:
    a, t = self.base, self.theta_degree
    entries = []
    for d, data in self.degree_data.items():
      for k, vec in enumerate(data.complement.basis):
        s = _is_standard(vec)
        name = a.name(data.target[s]) if s is not None else f"c{d}_{k}"
        rep = {data.target[r]: x for r, x in enumerate(vec) if x}
        entries.append((d, 0, name, ClassInfo(COKER, d, rep)))
      for k, vec in enumerate(data.kernel.basis):
        s = _is_standard(vec)
        name = f"th_{a.name(data.target[s])}" if s is not None else f"th{d}_{k}"
        rep = {data.target[r]: x for r, x in enumerate(vec) if x}
        entries.append((d + t, 1, name, ClassInfo(THETA, d, rep)))
    entries.sort(key=lambda e: (e[0], e[1]))

    self.classes = [e[3] for e in entries]
    basis = [BasisElement(e[2], e[0]) for e in entries]
    if len({b.name for b in basis}) != len(basis):
      raise InputException("generated cohomology class names collide with base basis names")

    self._coker_index: Dict[int, List[int]] = {}
    self._theta_index: Dict[int, List[int]] = {}
    for c, info in enumerate(self.classes):
      index = self._coker_index if info.kind == COKER else self._theta_index
      index.setdefault(info.base_degree, []).append(c)

    unit = self._coker_index[0][0]
    alpha = [self._canonical_alpha(info) for info in self.classes]
    products: Dict[Tuple[int, int], SparseRow] = {}
    for p in range(len(alpha)):
      for q in range(p, len(alpha)):
        row = self._class_sparse(self.chain.algebra.multiply_sparse(alpha[p], alpha[q]))
        if row:
          products[(p, q)] = row

    orientation = None
    if a.orientation is not None:
      for c, info in enumerate(self.classes):
        if info.kind == THETA and info.rep == {a.orientation: ONE}:
          orientation = c
    h = GradedAlgebra(a.dimension + t, basis, unit, products, orientation)
    logging.debug("  H_theta has Betti numbers %s", {d: h.dim_in_degree(d) for d in h.degrees})
    return h

  def _canonical_alpha(self, info: ClassInfo) -> Dict[int, Fraction]:
    if info.kind == COKER:
      return dict(info.rep)
    return self.theta(info.rep)

  def theta(self, y: SparseRow) -> SparseRow:
    """The chain element theta * y for y in A."""
    return {self.N + i: c for i, c in y.items()}

  def split(self, z: SparseRow) -> Tuple[SparseRow, SparseRow]:
    """(x, y) with z = x + theta * y."""
    x = {i: c for i, c in z.items() if i < self.N}
    y = {i - self.N: c for i, c in z.items() if i >= self.N}
    return x, y

  def d(self, z: SparseRow) -> SparseRow:
    return self.chain.d(z)

  def multiply(self, u: SparseRow, v: SparseRow) -> SparseRow:
    return self.chain.algebra.multiply_sparse(u, v)

  def in_theta_ideal(self, z: SparseRow) -> bool:
    return all(i >= self.N for i in z)

  def _blocks(self, x: SparseRow) -> Dict[int, Vector]:
    by_degree: Dict[int, Dict[int, Fraction]] = {}
    for i, c in x.items():
      by_degree.setdefault(self.base.degree(i), {})[i] = c
    return {
      d: tuple(row.get(i, ZERO) for i in self.degree_data[d].target)
      for d, row in by_degree.items()
    }

  def _class_sparse(self, z: SparseRow) -> SparseRow:
    x, y = self.split(z)
    if self._omega_times(y):
      raise InvariantViolation("chain element is not closed")
    result: SparseRow = {}
    for d, block in self._blocks(x).items():
      _, coker = self.degree_data[d].reader.split(block)
      for c, value in zip(self._coker_index.get(d, []), coker):
        if value:
          result[c] = value
    for d, block in self._blocks(y).items():
      coords = self.degree_data[d].kernel_solver.coordinates(block)
      if coords is None:
        raise InvariantViolation(f"theta part in degree {d} is closed but not in the kernel basis span")
      for c, value in zip(self._theta_index.get(d, []), coords):
        if value:
          result[c] = value
    return result

  def cohomology_class(self, z: SparseRow) -> Vector:
    """The H_theta coordinates of a closed chain element."""
    return to_dense(self._class_sparse(z), self.h.size)

  def omega_inverse(self, x: SparseRow, choice: Optional[Choice] = None) -> SparseRow:
    """A right inverse of omega on im(omega), extended by zero on the complement."""
    choice = choice or self.canonical
    result: SparseRow = {}
    for d, block in self._blocks(x).items():
      image_coords, _ = self.degree_data[d].reader.split(block)
      for k, c in enumerate(image_coords):
        if c:
          _add_into(result, choice.preimages[d][k], c)
    return result

  def alpha_squared(self, e: SparseRow, choice: Optional[Choice] = None) -> SparseRow:
    """alpha^2 of an element of G^2 H_theta: sum of c * alpha(h_i) alpha(h_j)."""
    choice = choice or self.canonical
    result: SparseRow = {}
    for p, c in e.items():
      i, j = self.sym2.elements[p]
      _add_into(result, self.multiply(choice.alpha[i], choice.alpha[j]), c)
    return result

  def gamma(self, e: SparseRow, choice: Optional[Choice] = None) -> SparseRow:
    """theta * omega^-1(alpha^2(e)) for e in E, with d(gamma(e)) = alpha^2(e)."""
    z = self.alpha_squared(e, choice)
    x, y = self.split(z)
    if y:
      raise InvariantViolation("alpha^2(e) has a theta part, so it is not exact")
    for d, block in self._blocks(x).items():
      _, coker = self.degree_data[d].reader.split(block)
      if any(coker):
        raise InvariantViolation(f"alpha^2(e) is not in the image of omega in degree {d}")
    result = self.theta(self.omega_inverse(x, choice))
    if self.d(result) != z:
      raise InvariantViolation("d(gamma(e)) differs from alpha^2(e)")
    return result

  def random_choice(self, rng: Random, magnitude: int = 3) -> Choice:
    """Coker representatives shifted by exact elements and right inverses shifted by kernel elements."""
    def small() -> Fraction:
      return Fraction(rng.randint(-magnitude, magnitude))

    alpha = []
    for c, info in enumerate(self.classes):
      rep = dict(self.canonical.alpha[c])
      if info.kind == COKER:
        source = self.base.indices_in_degree(info.base_degree - self.omega_degree)
        shift = {j: small() for j in source}
        _add_into(rep, self._omega_times({j: x for j, x in shift.items() if x}))
      alpha.append(rep)

    preimages = {}
    for d, data in self.degree_data.items():
      below = self.degree_data.get(d - self.omega_degree)
      shifted = []
      for pre in data.preimages:
        pre = dict(pre)
        if below is not None:
          for vec in below.kernel.basis:
            _add_into(pre, {below.target[r]: x for r, x in enumerate(vec) if x}, small())
        shifted.append(pre)
      preimages[d] = tuple(shifted)
    return Choice(alpha=tuple(alpha), preimages=preimages)

  def random_closed(self, rng: Random, degree: int, magnitude: int = 3) -> SparseRow:
    """A random closed chain element of the given degree."""
    z: SparseRow = {}
    for i in self.base.indices_in_degree(degree):
      c = rng.randint(-magnitude, magnitude)
      if c:
        z[i] = Fraction(c)
    data = self.degree_data.get(degree - self.theta_degree)
    if data is not None:
      for vec in data.kernel.basis:
        y = {data.target[r]: x for r, x in enumerate(vec) if x}
        _add_into(z, self.theta(y), Fraction(rng.randint(-magnitude, magnitude)))
    return z


def extend(
  a: GradedAlgebra,
  omega: Sequence[Fraction],
  require_poincare: bool = False,
  omega_degree: Optional[int] = None,
) -> GysinExtension:
  """Build A_theta with d(theta) = omega; a zero omega needs its degree given explicitly."""
  violations = validate(a)
  if violations:
    raise InputException(f"base algebra is not valid: {violations[0]}")
  if len(omega) != a.size:
    raise InputException(f"Euler class has {len(omega)} coordinates, the algebra has {a.size} basis elements")
  degree = a.degree_of(omega)
  if degree is None:
    if omega_degree is None:
      raise InputException("a zero Euler class needs an explicit degree")
    degree = omega_degree
  elif omega_degree is not None and omega_degree != degree:
    raise InputException(f"Euler class has degree {degree}, expected {omega_degree}")
  if degree % 2:
    raise InputException(f"Euler class of odd degree {degree} would give theta of even degree")
  if degree <= 0:
    raise InputException("Euler class must have positive degree")
  if require_poincare:
    poincare_check(a)
  g = GysinExtension(a, omega, degree)
  logging.info("  Built Gysin extension: |theta| = %d, H_theta has dimension %d", g.theta_degree, g.h.size)
  return g


def section_alpha(g: GysinExtension, choice: Optional[Choice] = None) -> List[Dict[int, Fraction]]:
  """alpha on the H_theta basis, as closed chain elements."""
  return list((choice or g.canonical).alpha)


def gamma_canonical(g: GysinExtension, e: SparseRow) -> SparseRow:
  return g.gamma(e)


def cohomology_class(g: GysinExtension, z: SparseRow) -> Vector:
  return g.cohomology_class(z)


def gysin_dimensions(a: GradedAlgebra, omega: Sequence[Fraction], omega_degree: Optional[int] = None) -> Dict[int, int]:
  """
  dim H_theta^i from rank-nullity alone:
  (dim A^i - rank(omega into A^i)) + (dim A^(i-|theta|) - rank(omega out of A^(i-|theta|))).
  """
  p = a.degree_of(omega)
  p = omega_degree if p is None else p
  sv = to_sparse(omega)

  def omega_rank(d: int) -> int:
    source = a.indices_in_degree(d)
    target = a.indices_in_degree(d + p)
    if not source or not target:
      return 0
    columns = [
      tuple(a.multiply_sparse(sv, {j: ONE}).get(k, ZERO) for k in target)
      for j in source
    ]
    return rank(Matrix.from_columns(columns, len(target)))

  t = p - 1
  dims = {}
  for i in range(a.top_degree + t + 1):
    coker = a.dim_in_degree(i) - omega_rank(i - p)
    ker = a.dim_in_degree(i - t) - omega_rank(i - t)
    if coker + ker:
      dims[i] = coker + ker
  return dims
