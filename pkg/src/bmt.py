"""
The Bianchi-Massey tensor F on B, the uniform Massey triple product T on
K[E (x) H], and the correction of gamma that makes T vanish.

gamma is carried as a list of chain elements, one per E basis vector (in the
order of `ProductKernelData.e_basis`), so canonical, randomized and corrected
choices all flow through the same evaluators.
"""
from dataclasses import dataclass, field
from fractions import Fraction
from random import Random
from typing import Dict, List, Optional, Sequence, Tuple
import logging

from .exactla import Matrix, SparseRow, Vector, ZERO, ONE, kernel_basis, solve_particular
from .exception import InputException, InvariantViolation, PoincareException, RefusalException
from .galg import koszul_sign, poincare_check
from .gysin import Choice, GysinExtension, THETA
from .sympow import ProductKernelData, SymPowerBasis


def _add_into(acc: SparseRow, row: SparseRow, factor: Fraction = ONE) -> None:
  for k, c in row.items():
    x = acc.get(k, ZERO) + factor * c
    if x:
      acc[k] = x
    else:
      acc.pop(k, None)


@dataclass
class TensorEntry:
  """F on one basis vector of B."""
  degree: int
  combination: SparseRow
  vector: SparseRow
  value: Vector

  @property
  def is_zero(self) -> bool:
    return not any(self.value)


@dataclass
class BianchiMasseyTensor:
  entries: Dict[int, List[TensorEntry]] = field(default_factory=dict)

  def degrees(self) -> List[int]:
    return sorted(self.entries)

  def nonzero(self, m: Optional[int] = None) -> List[TensorEntry]:
    degrees = [m] if m is not None else self.degrees()
    return [t for d in degrees for t in self.entries.get(d, []) if not t.is_zero]

  def vanishes(self, m: Optional[int] = None) -> bool:
    return not self.nonzero(m)


@dataclass
class MasseyValue:
  """T on one basis vector of K[E (x) H]; `element` maps (E index, H index) to coefficients."""
  degree: int
  element: Dict[Tuple[int, int], Fraction]
  value: Vector


@dataclass
class UniformMassey:
  gamma: List[SparseRow]
  values: Dict[int, List[MasseyValue]] = field(default_factory=dict)
  eta: Optional[List[SparseRow]] = None

  def nonzero(self) -> List[MasseyValue]:
    return [v for d in sorted(self.values) for v in self.values[d] if any(v.value)]

  def vanishes(self) -> bool:
    return not self.nonzero()


@dataclass
class IndependenceReport:
  trials: int
  seed: int
  degrees: List[int]
  max_deviation: Fraction
  identical: bool


def gamma_values(g: GysinExtension, pk: ProductKernelData, choice: Optional[Choice] = None) -> List[SparseRow]:
  """gamma on the E basis for a choice: theta * omega^-1(alpha^2(e)) plus the choice's shift."""
  choice = choice or g.canonical
  values = []
  for k, e in enumerate(pk.e_basis):
    value = g.gamma(e.coords, choice)
    if k < len(choice.gamma_shift):
      _add_into(value, choice.gamma_shift[k])
    values.append(value)
  return values


def _f_summand(
  g: GysinExtension, pk: ProductKernelData, gamma: List[SparseRow], squares: List[SparseRow], k: int, l: int,
) -> SparseRow:
  """gamma(e_k) alpha^2(e_l) + (-1)^(|e_k||e_l|) gamma(e_l) alpha^2(e_k)."""
  sign = koszul_sign(pk.e_basis[k].degree, pk.e_basis[l].degree)
  value = g.multiply(gamma[k], squares[l])
  _add_into(value, g.multiply(gamma[l], squares[k]), Fraction(sign))
  return value


def bm_tensor(
  g: GysinExtension,
  pk: ProductKernelData,
  degrees: Optional[Sequence[int]] = None,
  choice: Optional[Choice] = None,
  gamma: Optional[List[SparseRow]] = None,
) -> BianchiMasseyTensor:
  """
  F on a basis of B in each requested degree (default: the decision degree n + 1).
  """
  choice = choice or g.canonical
  gamma = gamma if gamma is not None else gamma_values(g, pk, choice)
  squares = [g.alpha_squared(e.coords, choice) for e in pk.e_basis]
  if degrees is None:
    degrees = [g.h.dimension + 1]

  tensor = BianchiMasseyTensor()
  for m in degrees:
    space = pk.B(m)
    entries = []
    for combination, vector in zip(space.combinations, space.vectors):
      chain: SparseRow = {}
      for p, c in combination.items():
        k, l = pk.sym2_e.elements[p]
        _add_into(chain, _f_summand(g, pk, gamma, squares, k, l), c)
      if g.d(chain):
        raise InvariantViolation(f"F representative in degree {m} is not closed")
      entries.append(TensorEntry(m, combination, vector, g.cohomology_class(chain)))
    tensor.entries[m] = entries
  logging.info("  Evaluated F on B in degrees %s: %d nonzero values", list(degrees), len(tensor.nonzero()))
  return tensor


def evaluate_witness(
  g: GysinExtension,
  pk: ProductKernelData,
  terms: Sequence[Tuple[Fraction, SparseRow, SparseRow]],
  choice: Optional[Choice] = None,
) -> Vector:
  """
  F on sum c (e . e') for E elements given in G^2 H coordinates.

  The element is checked to lie in G^2 E and in K[G^2 G^2 H] first.
  """
  choice = choice or g.canonical
  def factor_degree(vec: SparseRow) -> int:
    ds = {pk.sym2.element_degrees[p] for p in vec}
    if len(ds) != 1:
      raise InputException("witness factors must be nonzero and homogeneous")
    d = ds.pop()
    image = pk.product_matrix(d).apply([vec.get(p, ZERO) for p in pk.sym2.indices_in_degree(d)])
    if any(image):
      raise InputException("witness factor is not in the kernel of the product map")
    return d

  pieces = [(Fraction(c), e, e2, factor_degree(e), factor_degree(e2)) for c, e, e2 in terms]

  vector: SparseRow = {}
  for c, e, e2, _, _ in pieces:
    _add_into(vector, pk.sym2_sym2.pair(e, e2), c)
  if pk.symmetrize(vector):
    raise InputException("witness is not in the kernel of the full symmetrisation")

  chain: SparseRow = {}
  for c, e, e2, d, d2 in pieces:
    value = g.multiply(g.gamma(e, choice), g.alpha_squared(e2, choice))
    _add_into(value, g.multiply(g.gamma(e2, choice), g.alpha_squared(e, choice)), Fraction(koszul_sign(d, d2)))
    _add_into(chain, value, c)
  return g.cohomology_class(chain)


def _e_tensor_h(pk: ProductKernelData, g3: SymPowerBasis, m: int) -> Tuple[List[Tuple[int, int]], Matrix, List[int]]:
  """Basis pairs of (E (x) H)^m and the matrix of the symmetrisation to G^3 H."""
  h = pk.h
  pairs = [
    (k, i) for k, e in enumerate(pk.e_basis) for i in range(h.size)
    if e.degree + h.degree(i) == m
  ]
  images = []
  for k, i in pairs:
    image: SparseRow = {}
    for p, c in pk.e_basis[k].coords.items():
      a, b = pk.sym2.elements[p]
      _add_into(image, g3.monomial((a, b, i)), c)
    images.append(image)
  targets = sorted({r for img in images for r in img})
  columns = [tuple(img.get(r, ZERO) for r in targets) for img in images]
  return pairs, Matrix.from_columns(columns, len(targets)), targets


def massey_domain_degrees(pk: ProductKernelData) -> List[int]:
  return sorted({e.degree + pk.h.degree(i) for e in pk.e_basis for i in range(pk.h.size)})


def uniform_massey(
  g: GysinExtension,
  pk: ProductKernelData,
  gamma: Optional[List[SparseRow]] = None,
  choice: Optional[Choice] = None,
  degrees: Optional[Sequence[int]] = None,
) -> UniformMassey:
  """T: e (x) x -> [gamma(e) alpha(x)] on a basis of K[E (x) H] in every requested degree."""
  choice = choice or g.canonical
  gamma = gamma if gamma is not None else gamma_values(g, pk, choice)
  g3 = SymPowerBasis(pk.sym2.degrees, 3)
  result = UniformMassey(gamma=list(gamma))
  for m in (degrees if degrees is not None else massey_domain_degrees(pk)):
    pairs, matrix, _ = _e_tensor_h(pk, g3, m)
    values = []
    for vec in kernel_basis(matrix).basis:
      element = {pairs[t]: x for t, x in enumerate(vec) if x}
      chain: SparseRow = {}
      for (k, i), x in element.items():
        _add_into(chain, g.multiply(gamma[k], choice.alpha[i]), x)
      if g.d(chain):
        raise InvariantViolation(f"T representative in degree {m} is not closed")
      values.append(MasseyValue(m, element, g.cohomology_class(chain)))
    result.values[m] = values
  return result


def _e_tensor_g2(pk: ProductKernelData, m: int) -> Tuple[List[Tuple[int, int]], List[Vector]]:
  """A basis of the degree-m part of K[E (x) G^2 H], over (E index, G^2 H position) pairs."""
  pairs = [
    (k, q) for k, e in enumerate(pk.e_basis) for q in range(len(pk.sym2))
    if e.degree + pk.sym2.element_degrees[q] == m
  ]
  images = []
  for k, q in pairs:
    image: SparseRow = {}
    c_pair = pk.sym2.elements[q]
    for p, c in pk.e_basis[k].coords.items():
      _add_into(image, pk.g4.monomial(pk.sym2.elements[p] + c_pair), c)
    images.append(image)
  targets = sorted({r for img in images for r in img})
  columns = [tuple(img.get(r, ZERO) for r in targets) for img in images]
  return pairs, list(kernel_basis(Matrix.from_columns(columns, len(targets))).basis)


def eta_correct(
  g: GysinExtension,
  pk: ProductKernelData,
  f: BianchiMasseyTensor,
  choice: Optional[Choice] = None,
) -> UniformMassey:
  """
  A correction eta: E -> closed chains in the theta ideal with T' = 0 for gamma' = gamma + eta.

  mu-bar is solved for on E (x) D as a functional table psi(e, u) = alpha_H(mu-bar(e (x) a_u)),
  where a_u in D is the preimage of the basis class u; psi vanishes whenever u is a theta
  class. The equations are mu-bar(p(w)) = mu(w) on the degree n + 1 part of K[E (x) G^2 H].
  """
  choice = choice or g.canonical
  h = g.h
  n = h.dimension
  ps = poincare_check(h)
  if n + 1 not in f.entries:
    raise InvariantViolation(f"F was not evaluated in the decision degree {n + 1}")
  witnesses = f.nonzero(n + 1)
  if witnesses:
    raise RefusalException(f"F does not vanish on B^{n + 1}, so no correction exists", witness=witnesses[0])

  gamma = gamma_values(g, pk, choice)
  coker = [c for c in range(h.size) if g.classes[c].kind != THETA]

  # unknowns psi(k, u) for u a coker class of degree n + 1 - |e_k|
  unknowns: Dict[Tuple[int, int], int] = {}
  for k, e in enumerate(pk.e_basis):
    for u in coker:
      if e.degree + h.degree(u) == n + 1:
        unknowns[(k, u)] = len(unknowns)

  product_class = {}
  for q in range(len(pk.sym2)):
    if pk.sym2.element_degrees[q] <= n + 1:
      a, b = pk.sym2.elements[q]
      product_class[q] = h.product(a, b)

  pairs, kernel = _e_tensor_g2(pk, n + 1)
  rows, rhs = [], []
  for vec in kernel:
    row = [ZERO] * len(unknowns)
    chain: SparseRow = {}
    for t, x in enumerate(vec):
      if not x:
        continue
      k, q = pairs[t]
      for u, c in product_class[q].items():
        if (k, u) in unknowns:
          row[unknowns[(k, u)]] += x * c
      a, b = pk.sym2.elements[q]
      _add_into(chain, g.multiply(gamma[k], g.multiply(choice.alpha[a], choice.alpha[b])), x)
    rows.append(row)
    rhs.append(ps.alpha(g.cohomology_class(chain)))

  psi = solve_particular(Matrix.from_rows(rows, len(unknowns)), rhs)
  if psi is None:
    raise InvariantViolation("mu-bar is not consistent on the image of the projection to E (x) D")

  eta: List[SparseRow] = []
  for k, e in enumerate(pk.e_basis):
    partner = h.indices_in_degree(n + 1 - e.degree)
    values = [
      -psi[unknowns[(k, u)]] if (k, u) in unknowns else ZERO
      for u in partner
    ]
    if not any(values):
      eta.append({})
      continue
    try:
      cls = ps.solve_dual(e.degree - 1, values)
    except PoincareException as exc:
      raise PoincareException(
        f"no class realizes the correction functional for E basis element {k}", degree=exc.degree,
      )
    correction: SparseRow = {}
    for c, x in enumerate(cls):
      if not x:
        continue
      if g.classes[c].kind != THETA:
        raise InvariantViolation("correction class is not in theta * ker(omega)")
      _add_into(correction, choice.alpha[c], x)
    eta.append(correction)

  corrected = []
  for k, e in enumerate(pk.e_basis):
    value = dict(gamma[k])
    _add_into(value, eta[k])
    if g.d(value) != g.alpha_squared(e.coords, choice):
      raise InvariantViolation("d(gamma') differs from alpha^2")
    if not g.in_theta_ideal(value):
      raise InvariantViolation("gamma' leaves the theta ideal")
    corrected.append(value)

  result = uniform_massey(g, pk, gamma=corrected, choice=choice)
  result.eta = eta
  if not result.vanishes():
    raise InvariantViolation(f"T' does not vanish after correction ({len(result.nonzero())} nonzero values)")
  logging.info("  Corrected gamma: T' vanishes on K[E (x) H] in all %d degrees", len(result.values))
  return result


def choice_independence(
  g: GysinExtension,
  pk: ProductKernelData,
  trials: int,
  seed: int,
  degrees: Optional[Sequence[int]] = None,
) -> IndependenceReport:
  """Re-derive F under randomized admissible choices and require identical values."""
  degrees = list(degrees) if degrees is not None else pk.b_degrees()
  reference = bm_tensor(g, pk, degrees)
  rng = Random(seed)
  worst = Fraction(0)
  for trial in range(trials):
    choice = g.random_choice(rng)
    shifts = tuple(g.random_closed(rng, e.degree - 1) for e in pk.e_basis)
    choice = Choice(alpha=choice.alpha, preimages=choice.preimages, gamma_shift=shifts)
    tensor = bm_tensor(g, pk, degrees, choice=choice)
    for m in degrees:
      for ref, other in zip(reference.entries[m], tensor.entries[m]):
        for x, y in zip(ref.value, other.value):
          worst = max(worst, abs(x - y))
    if worst:
      raise InvariantViolation(f"F changed under the randomized choice of trial {trial} (seed {seed})")
  logging.info("  F identical under %d randomized choices (seed %d)", trials, seed)
  return IndependenceReport(trials, seed, degrees, worst, worst == 0)
