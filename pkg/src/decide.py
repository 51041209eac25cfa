"""
Formality verdicts for sphere bundles over formal bases, unit tangent bundles,
and the reducible-Euler-class (hard Lefschetz) obstruction.
"""
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from typing import List, Optional, Sequence, Tuple, Union
import logging

from .ainfty import AInfinityCertificate, build_certificate
from .bmt import BianchiMasseyTensor, TensorEntry, bm_tensor, eta_correct, evaluate_witness
from .exactla import Matrix, SparseRow, Vector, ZERO, ONE, kernel_basis, rank, row_reduce, solve_particular, to_dense, to_sparse
from .exception import InputException, InvariantViolation, PoincareException, RefusalException
from .galg import GradedAlgebra, GradedVector, euler_characteristic, poincare_check, validate
from .gysin import GysinExtension, extend
from .sympow import ProductKernelData, product_kernel

Outcome = Enum("Outcome", "FORMAL NON_FORMAL")

Reason = Enum("Reason", " ".join([
  "EVEN_SPHERE",
  "ZERO_TENSOR",
  "NONZERO_TENSOR",
  "ZERO_EULER_CHARACTERISTIC",
  "SINGLE_GENERATOR",
  "ODD_CLASS",
  "PRODUCT_KERNEL",
  "HL_OBSTRUCTION",
]))


@dataclass
class BundleSpec:
  """An oriented S^k-bundle over a base given by its cohomology ring."""
  base: GradedAlgebra
  sphere_dim: int
  euler: Optional[GradedVector] = None
  base_formal_attested: bool = False


@dataclass
class Witness:
  """An element of B, as terms c (e . e') over G^2 H_theta, with its F value."""
  terms: List[Tuple[Fraction, SparseRow, SparseRow]]
  vector: SparseRow
  value: Vector


@dataclass
class HLTranscript:
  decomposition: List[Tuple[GradedVector, GradedVector]] = field(default_factory=list)
  s: Optional[int] = None
  lines: List[str] = field(default_factory=list)


@dataclass
class FormalityVerdict:
  outcome: Outcome
  reason: Reason
  witness: Optional[Witness] = None
  certificate: Optional[AInfinityCertificate] = None
  extension: Optional[GysinExtension] = None
  tensor: Optional[BianchiMasseyTensor] = None
  transcript: Optional[HLTranscript] = None
  findings: List[str] = field(default_factory=list)

  @property
  def formal(self) -> bool:
    return self.outcome == Outcome.FORMAL


@dataclass
class NotApplicable:
  """The obstruction does not apply; this says nothing about formality."""
  condition: int
  reason: str
  transcript: HLTranscript


@dataclass
class HLObstructionInput:
  h: GradedAlgebra
  omega: GradedVector
  r: int
  decomposition: Optional[List[Tuple[GradedVector, GradedVector]]] = None


@dataclass(frozen=True)
class SingleGenerator:
  degree: int
  power: int


@dataclass(frozen=True)
class LefschetzRow:
  degree: int
  source_dim: int
  target_dim: int
  rank: int

  @property
  def iso(self) -> bool:
    return self.source_dim == self.target_dim == self.rank


@dataclass
class LefschetzReport:
  rows: List[LefschetzRow]

  @property
  def holds(self) -> bool:
    return all(row.iso for row in self.rows)

  @property
  def first_failure(self) -> Optional[int]:
    return next((row.degree for row in self.rows if not row.iso), None)


def _require_valid(a: GradedAlgebra) -> None:
  violations = validate(a)
  if violations:
    raise InputException(f"algebra is not valid: {violations[0]}")


def _class_of(g: GysinExtension, x: SparseRow) -> SparseRow:
  """H_theta coordinates of a base element, read as a closed chain."""
  return to_sparse(g.cohomology_class(x))


def _checked_witness(
  g: GysinExtension, pk: ProductKernelData, terms: List[Tuple[Fraction, SparseRow, SparseRow]], expected: Optional[Vector] = None,
) -> Witness:
  """Evaluate a witness through the tensor and require a nonzero (and, if given, the expected) value."""
  terms = [(c, e, e2) for c, e, e2 in terms if e and e2]
  value = evaluate_witness(g, pk, terms)
  if not any(value):
    raise InvariantViolation("witness evaluates to zero under F")
  if expected is not None and tuple(value) != tuple(expected):
    raise InvariantViolation("witness value differs from the value predicted for this route")
  vector: SparseRow = {}
  for c, e, e2 in terms:
    for k, x in pk.sym2_sym2.pair(e, e2).items():
      y = vector.get(k, ZERO) + c * x
      if y:
        vector[k] = y
      else:
        vector.pop(k, None)
  return Witness(terms, vector, value)


def _tensor_witness(g: GysinExtension, pk: ProductKernelData, entry: TensorEntry) -> Witness:
  terms = []
  for p, c in sorted(entry.combination.items()):
    k, l = pk.sym2_e.elements[p]
    terms.append((c, pk.e_basis[k].coords, pk.e_basis[l].coords))
  return _checked_witness(g, pk, terms, expected=entry.value)


def sphere_bundle_formality(
  spec: BundleSpec, all_degrees: bool = False, via_intersection: bool = False,
) -> FormalityVerdict:
  """
  Decide formality of the total space from the Bianchi-Massey tensor in the decision degree.

  Odd spheres get either a witness or a verified certificate; with `all_degrees`
  any nonzero value away from the decision degree is recorded as a finding.
  """
  if not spec.base_formal_attested:
    raise RefusalException(
      "the verdict is only valid over a formal base, which cannot be read off the cohomology ring; "
      "attest base formality explicitly"
    )
  _require_valid(spec.base)
  k = spec.sphere_dim
  if k < 1:
    raise InputException(f"sphere dimension must be at least 1, not {k}")
  if k % 2 == 0:
    logging.info("  S^%d-bundle: even sphere, formal without computation", k)
    return FormalityVerdict(Outcome.FORMAL, Reason.EVEN_SPHERE)
  if spec.euler is None:
    raise InputException(f"an S^{k}-bundle needs an Euler class of degree {k + 1}")

  g = extend(spec.base, spec.euler, omega_degree=k + 1)
  try:
    poincare_check(g.h)
  except PoincareException as e:
    raise InputException(f"the cohomology of the total space is not a Poincare algebra ({e})")
  pk = product_kernel(g.h, via_intersection=via_intersection)
  n = g.h.dimension
  degrees = sorted(set(pk.b_degrees()) | {n + 1}) if all_degrees else [n + 1]
  f = bm_tensor(g, pk, degrees)

  findings = [
    f"F is nonzero in degree {m} while the decision degree is {n + 1}"
    for m in f.degrees() if m != n + 1 and not f.vanishes(m)
  ]
  if findings and f.vanishes(n + 1):
    logging.warning("  F vanishes in degree %d but not in degrees %s", n + 1, [m for m in f.degrees() if not f.vanishes(m)])

  nonzero = f.nonzero(n + 1)
  if nonzero:
    witness = _tensor_witness(g, pk, nonzero[0])
    return FormalityVerdict(
      Outcome.NON_FORMAL, Reason.NONZERO_TENSOR, witness=witness, extension=g, tensor=f, findings=findings,
    )

  u = eta_correct(g, pk, f)
  certificate = build_certificate(g, pk, u)
  return FormalityVerdict(
    Outcome.FORMAL, Reason.ZERO_TENSOR, certificate=certificate, extension=g, tensor=f, findings=findings,
  )


def single_generator_check(h: GradedAlgebra) -> Optional[SingleGenerator]:
  """(d, p) when h = K[x]/(x^p) with |x| = d, else None."""
  if any(h.dim_in_degree(d) > 1 for d in h.degrees) or h.degrees[:1] != [0]:
    return None
  positive = [d for d in h.degrees if d > 0]
  if not positive:
    return SingleGenerator(0, 1)
  d = positive[0]
  p = len(positive) + 1
  if positive != [d * k for k in range(1, p)]:
    return None
  x = {h.indices_in_degree(d)[0]: ONE}
  power = dict(x)
  for _ in range(2, p):
    power = h.multiply_sparse(power, x)
    if not power:
      return None
  return SingleGenerator(d, p)


def _pairing_value(h: GradedAlgebra, u: SparseRow, v: SparseRow) -> Fraction:
  return h.multiply_sparse(u, v).get(h.orientation, ZERO)


def _odd_class_witness(h: GradedAlgebra, g: GysinExtension, pk: ProductKernelData) -> Optional[Witness]:
  """((x.x*).(x.x*)) for an odd class x with x x* = omega; F = 2[theta omega]."""
  odd = [d for d in h.degrees if d % 2]
  if not odd:
    return None
  x = {h.indices_in_degree(odd[0])[0]: ONE}
  chi = g.omega[h.orientation]
  x_star = None
  for y in h.indices_in_degree(h.dimension - odd[0]):
    value = _pairing_value(h, x, {y: ONE})
    if value:
      x_star = {y: chi / value}
      break
  if x_star is None:
    raise InvariantViolation(f"no Poincare partner for the class {h.name(next(iter(x)))}")
  e = pk.sym2.pair(_class_of(g, x), _class_of(g, x_star))
  expected = g.cohomology_class({k: 2 * c for k, c in g.theta(g.omega_sparse).items()})
  return _checked_witness(g, pk, [(ONE, e, e)], expected)


def _rank_split(m: List[List[Fraction]]) -> Tuple[List[List[Fraction]], List[List[Fraction]]]:
  """Columns C and rows R with m = C R, both of full rank."""
  cols = len(m[0])
  reduced, pivots = row_reduce([to_sparse(row) for row in m], cols)
  c = [[row[p] for p in pivots] for row in m]
  r = [list(to_dense(row, cols)) for row in reduced]
  return [[c[a][t] for a in range(len(m))] for t in range(len(pivots))], r


def _product_kernel_witness(h: GradedAlgebra, g: GysinExtension, pk: ProductKernelData) -> Optional[Witness]:
  """
  From sum x_t (x) y_t in the kernel of H^i (x) H^j -> H^(i+j) with i, j <= n, the element
  ((sum x_t.y_t).(x*.y*)) - sum ((x_t.x*).(y_t.y*)) with x_t x* = y_t y* = delta_1t omega;
  F = -2[theta omega].
  """
  n = h.dimension // 2
  chi = g.omega[h.orientation]
  for i in range(1, n + 1):
    for j in range(i, n + 1):
      xs, ys = h.indices_in_degree(i), h.indices_in_degree(j)
      target = h.indices_in_degree(i + j)
      if not xs or not ys:
        continue
      columns = [tuple(h.product(a, b).get(t, ZERO) for t in target) for a in xs for b in ys]
      kernel = kernel_basis(Matrix.from_columns(columns, len(target)))
      if not kernel.dim:
        continue

      vec = kernel.basis[0]
      m = [list(vec[a * len(ys):(a + 1) * len(ys)]) for a in range(len(xs))]
      c_cols, r_rows = _rank_split(m)
      x_list = [{xs[a]: x for a, x in enumerate(col) if x} for col in c_cols]
      y_list = [{ys[b]: y for b, y in enumerate(row) if y} for row in r_rows]

      def dual_first(family: List[SparseRow], degree: int) -> SparseRow:
        partner = h.indices_in_degree(h.dimension - degree)
        rows = [[_pairing_value(h, v, {y: ONE}) for y in partner] for v in family]
        rhs = [chi] + [ZERO] * (len(family) - 1)
        coords = solve_particular(Matrix.from_rows(rows, len(partner)), rhs)
        if coords is None:
          raise InvariantViolation(f"no dual element for a kernel family in degree {degree}")
        return {partner[c]: x for c, x in enumerate(coords) if x}

      x_star = _class_of(g, dual_first(x_list, i))
      y_star = _class_of(g, dual_first(y_list, j))
      x_h = [_class_of(g, v) for v in x_list]
      y_h = [_class_of(g, v) for v in y_list]

      e0: SparseRow = {}
      for x, y in zip(x_h, y_h):
        for k, c in pk.sym2.pair(x, y).items():
          v = e0.get(k, ZERO) + c
          if v:
            e0[k] = v
          else:
            e0.pop(k, None)
      terms = [(ONE, e0, pk.sym2.pair(x_star, y_star))]
      terms.extend((-ONE, pk.sym2.pair(x, x_star), pk.sym2.pair(y, y_star)) for x, y in zip(x_h, y_h))
      expected = g.cohomology_class({k: -2 * c for k, c in g.theta(g.omega_sparse).items()})
      logging.info("  Product kernel found in H^%d (x) H^%d", i, j)
      return _checked_witness(g, pk, terms, expected)
  return None


def utm_classify(h: GradedAlgebra) -> FormalityVerdict:
  """
  Formality of the unit tangent bundle: formal iff chi = 0 or h is single-generated.
  Non-formal verdicts carry a witness checked through the tensor of the chi * vol extension.
  """
  _require_valid(h)
  poincare_check(h)
  if h.dimension % 2:
    return FormalityVerdict(Outcome.FORMAL, Reason.ZERO_EULER_CHARACTERISTIC)
  chi = euler_characteristic(h)
  if chi == 0:
    return FormalityVerdict(Outcome.FORMAL, Reason.ZERO_EULER_CHARACTERISTIC)
  if single_generator_check(h) is not None:
    return FormalityVerdict(Outcome.FORMAL, Reason.SINGLE_GENERATOR)

  omega = to_dense({h.orientation: Fraction(chi)}, h.size)
  g = extend(h, omega, omega_degree=h.dimension)
  pk = product_kernel(g.h)
  witness = _odd_class_witness(h, g, pk)
  if witness is not None:
    return FormalityVerdict(Outcome.NON_FORMAL, Reason.ODD_CLASS, witness=witness, extension=g)
  witness = _product_kernel_witness(h, g, pk)
  if witness is not None:
    return FormalityVerdict(Outcome.NON_FORMAL, Reason.PRODUCT_KERNEL, witness=witness, extension=g)
  raise InvariantViolation("ring is not single-generated with chi != 0, yet neither witness route applies")


def _omega_rank(h: GradedAlgebra, omega: Sequence[Fraction], s: int) -> Tuple[int, int, int]:
  """(dim H^s, dim H^(s+|omega|), rank of omega * -) for s possibly negative."""
  if s < 0 or not h.dim_in_degree(s):
    return 0, h.dim_in_degree(s + h.degree_of(omega)) if s >= 0 else 0, 0
  m = h.left_multiplication(omega, s)
  return m.cols, m.rows, rank(m)


def hl_obstruction(inp: HLObstructionInput) -> Union[FormalityVerdict, NotApplicable]:
  """
  Non-formality of A (x) Lambda(theta), d(theta) = omega, from a reducible [omega] of
  degree 2r (r odd) acting as an isomorphism out of some H^s and injectively out of H^(s-r).

  The decomposition is checked in cohomology; closed representatives of the factors
  then give one at chain level, so the check is sound over any base.
  """
  h, omega, r = inp.h, tuple(Fraction(c) for c in inp.omega), inp.r
  _require_valid(h)
  if len(omega) != h.size:
    raise InputException(f"class has {len(omega)} coordinates, the algebra has {h.size} basis elements")
  degree = h.degree_of(omega)
  if degree is None:
    raise InputException("the class omega is zero")
  if degree != 2 * r:
    raise InputException(f"omega has degree {degree}, expected 2r = {2 * r}")
  if r % 2 == 0:
    raise InputException(
      f"|omega| = {degree} is divisible by 4; the obstruction requires |omega| = 2 mod 4 and fails without it"
    )

  transcript = HLTranscript()
  if inp.decomposition is not None:
    total: SparseRow = {}
    for x, y in inp.decomposition:
      if h.degree_of(x) != r or h.degree_of(y) != r:
        raise InputException(f"decomposition factors must be nonzero classes of degree {r}")
      for k, c in h.multiply_sparse(to_sparse(x), to_sparse(y)).items():
        v = total.get(k, ZERO) + c
        if v:
          total[k] = v
        else:
          total.pop(k, None)
    if total != to_sparse(omega):
      raise InputException("the decomposition does not sum to omega")
    transcript.decomposition = list(inp.decomposition)
    transcript.lines.append("condition 1: decomposition given and checked")
  else:
    basis = h.indices_in_degree(r)
    pairs = [(a, b) for n, a in enumerate(basis) for b in basis[n:]]
    target = h.indices_in_degree(2 * r)
    columns = [tuple(h.product(a, b).get(t, ZERO) for t in target) for a, b in pairs]
    coords = None
    if pairs and target:
      coords = solve_particular(Matrix.from_columns(columns, len(target)), h.block(omega, 2 * r))
    if coords is None:
      transcript.lines.append(f"condition 1: omega is not in the span of products H^{r} * H^{r}")
      return NotApplicable(1, f"omega is not a sum of products of degree-{r} classes", transcript)
    for (a, b), c in zip(pairs, coords):
      if c:
        transcript.decomposition.append((h.element(h.name(a)), to_dense({b: c}, h.size)))
    transcript.lines.append(f"condition 1: omega is a sum of {len(transcript.decomposition)} products")

  for s in range(h.dimension + 1):
    if not h.dim_in_degree(s):
      continue
    source, target, rk = _omega_rank(h, omega, s)
    iso = source == target == rk
    transcript.lines.append(f"s = {s}: omega: H^{s} -> H^{s + 2 * r} is {target}x{source} of rank {rk}")
    if not iso:
      continue
    low_source, low_target, low_rank = _omega_rank(h, omega, s - r)
    transcript.lines.append(
      f"s = {s}: omega: H^{s - r} -> H^{s + r} has source dimension {low_source} and rank {low_rank}"
    )
    if low_rank == low_source:
      transcript.s = s
      logging.info("  Reducible omega obstruction applies at s = %d", s)
      return FormalityVerdict(Outcome.NON_FORMAL, Reason.HL_OBSTRUCTION, transcript=transcript)
  return NotApplicable(2, "no degree s with omega an isomorphism out of H^s and injective out of H^(s-r)", transcript)


def hard_lefschetz_check(h: GradedAlgebra, omega: Sequence[Fraction]) -> LefschetzReport:
  """omega^(n-i): H^i -> H^(2n-i) for every i <= n."""
  _require_valid(h)
  poincare_check(h)
  if h.dimension % 2:
    raise InputException(f"hard Lefschetz needs an even formal dimension, not {h.dimension}")
  if h.degree_of(omega) != 2:
    raise InputException("the Lefschetz class must have degree 2")
  n = h.dimension // 2
  rows = []
  for i in range(n + 1):
    power = {h.unit: ONE}
    for _ in range(n - i):
      power = h.multiply_sparse(power, to_sparse(omega))
    source = h.dim_in_degree(i)
    target = h.dim_in_degree(2 * n - i)
    rk = rank(h.left_multiplication(to_dense(power, h.size), i)) if power and source else 0
    rows.append(LefschetzRow(i, source, target, rk))
  return LefschetzReport(rows)


def boothby_wang(h: GradedAlgebra, omega: Sequence[Fraction]) -> Union[FormalityVerdict, NotApplicable]:
  """The circle bundle with Euler class a hard Lefschetz class omega reducible in H^1 * H^1."""
  report = hard_lefschetz_check(h, omega)
  if not report.holds:
    return NotApplicable(2, f"hard Lefschetz fails at degree {report.first_failure}", HLTranscript())
  return hl_obstruction(HLObstructionInput(h, omega, 1))
