"""
A-infinity relations and morphism equations on finite bases, and the formality
certificate f1 = alpha, f2(x, y) = gamma'((1.xy) - (x.y)), f_{>=3} = 0.

Operations are multilinear maps given on basis tuples. With |m_s| = 2 - s and
|f_i| = 1 - i, the relations checked are

  sum_{r+s+t=p} (-1)^(r+st) m_{r+t+1}(1^r (x) m_s (x) 1^t) = 0

and, for a morphism f: A -> B,

  sum_{r+s+t=p} (-1)^(r+st) f_{r+t+1}(1^r (x) m_s (x) 1^t)
    = sum_{i_1+...+i_q=p} (-1)^w m_q(f_{i_1} (x) ... (x) f_{i_q}),  w = sum_j (q - j)(i_j - 1),

with the Koszul sign of passing each map over the inputs to its left.
"""
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product
from typing import Callable, Dict, Iterator, List, Optional, Sequence, Tuple
import json
import logging

from .bmt import UniformMassey
from .error import ErrorHandler
from .exactla import SparseRow, SpanSolver, ZERO, ONE
from .exception import CertificateException, InputException
from .galg import CDGA, GradedAlgebra
from .gysin import Choice, GysinExtension, extend
from .parser import read_algebra
from .sympow import ProductKernelData
from .writer import format_scalar, parse_scalar, write_algebra

Operation = Callable[[Tuple[int, ...]], SparseRow]


def _add_into(acc: SparseRow, row: SparseRow, factor: Fraction = ONE) -> None:
  for k, c in row.items():
    x = acc.get(k, ZERO) + factor * c
    if x:
      acc[k] = x
    else:
      acc.pop(k, None)


def _parity(n: int) -> int:
  return -1 if n % 2 else 1


@dataclass
class Operations:
  """Multilinear operations on a graded basis, keyed by arity; missing arities are zero."""
  degrees: Sequence[int]
  maps: Dict[int, Operation]
  top_degree: int

  @property
  def size(self) -> int:
    return len(self.degrees)


def cdga_operations(c: CDGA) -> Operations:
  """m1 = d, m2 = the product, m_{>=3} = 0."""
  a = c.algebra
  return Operations(
    degrees=[b.degree for b in a.basis],
    maps={
      1: lambda xs: c.d({xs[0]: ONE}),
      2: lambda xs: dict(a.product(xs[0], xs[1])),
    },
    top_degree=a.top_degree,
  )


def algebra_operations(a: GradedAlgebra) -> Operations:
  """A graded algebra with zero differential: m2 only."""
  return Operations(
    degrees=[b.degree for b in a.basis],
    maps={2: lambda xs: dict(a.product(xs[0], xs[1]))},
    top_degree=a.top_degree,
  )


def _multilinear(op: Operation, vectors: Sequence[SparseRow]) -> SparseRow:
  acc: SparseRow = {}
  for terms in product(*(list(v.items()) for v in vectors)):
    coeff = ONE
    for _, c in terms:
      coeff *= c
    _add_into(acc, op(tuple(k for k, _ in terms)), coeff)
  return acc


def _compositions(p: int, parts: Sequence[int]) -> Iterator[Tuple[int, ...]]:
  """Ordered tuples of allowed part sizes summing to p."""
  if p == 0:
    yield ()
    return
  for i in parts:
    if i <= p:
      for rest in _compositions(p - i, parts):
        yield (i,) + rest


def _inner_sum(
  outer: Dict[int, Operation], inner: Operations, xs: Tuple[int, ...],
) -> SparseRow:
  """sum (-1)^(r+st) outer_{r+t+1}(1^r (x) m_s (x) 1^t) on a basis tuple."""
  p = len(xs)
  acc: SparseRow = {}
  for s, m in inner.maps.items():
    for r in range(p - s + 1):
      t = p - s - r
      u = r + t + 1
      if u not in outer:
        continue
      value = m(xs[r:r + s])
      if not value:
        continue
      passed = sum(inner.degrees[x] for x in xs[:r])
      sign = _parity(r + s * t) * _parity((2 - s) * passed)
      for k, c in value.items():
        _add_into(acc, outer[u](xs[:r] + (k,) + xs[r + s:]), sign * c)
  return acc


def relation_residual(ops: Operations, xs: Tuple[int, ...]) -> SparseRow:
  return _inner_sum(ops.maps, ops, xs)


def morphism_residual(
  source: Operations, target: Operations, f: Dict[int, Operation], xs: Tuple[int, ...],
) -> SparseRow:
  """Left side minus right side of the morphism equation on one basis tuple."""
  p = len(xs)
  acc = _inner_sum(f, source, xs)
  for q, m in target.maps.items():
    for parts in _compositions(p, sorted(f)):
      if len(parts) != q:
        continue
      w = sum((q - j) * (i - 1) for j, i in enumerate(parts, start=1))
      koszul, start, vectors = 0, 0, []
      for i in parts:
        koszul += (1 - i) * sum(source.degrees[x] for x in xs[:start])
        vectors.append(f[i](xs[start:start + i]))
        start += i
      if not all(vectors):
        continue
      _add_into(acc, _multilinear(m, vectors), Fraction(-_parity(w) * _parity(koszul)))
  return acc


def _tuples(ops: Operations, p: int, shift: int, target_top: int) -> Iterator[Tuple[int, ...]]:
  """Basis tuples of length p whose output degree can be nonzero."""
  for xs in product(range(ops.size), repeat=p):
    d = sum(ops.degrees[x] for x in xs) + shift
    if 0 <= d <= target_top:
      yield xs


@dataclass
class RelationReport:
  ok: bool
  checked: Dict[int, int]
  failure: Optional[Tuple[int, Tuple[int, ...], SparseRow]] = None


def verify_relations(ops: Operations, p_max: int) -> RelationReport:
  """Check the A-infinity relations for every p <= p_max; stop at the first failing tuple."""
  checked = {}
  for p in range(1, p_max + 1):
    count = 0
    for xs in _tuples(ops, p, 3 - p, ops.top_degree):
      count += 1
      residual = relation_residual(ops, xs)
      if residual:
        checked[p] = count
        logging.info("  A-infinity relation fails at p = %d on %s", p, xs)
        return RelationReport(False, checked, (p, xs, residual))
    checked[p] = count
  return RelationReport(True, checked)


def _contributes(source: Operations, target: Operations, f: Dict[int, Operation], p: int) -> bool:
  """Whether any term of the p-th morphism equation is structurally nonzero."""
  if any((p - s + 1) in f for s in source.maps if s <= p):
    return True
  return any(len(parts) in target.maps for parts in _compositions(p, sorted(f)))


@dataclass
class ResidualSummary:
  """Tuples checked at one p, with every nonzero residual kept."""
  checked: int
  vacuous: bool
  nonzero: List[Tuple[Tuple[int, ...], SparseRow]] = field(default_factory=list)


def verify_morphism(
  source: Operations, target: Operations, f: Dict[int, Operation], p_max: int,
) -> Dict[int, ResidualSummary]:
  summaries = {}
  for p in range(1, p_max + 1):
    if not _contributes(source, target, f, p):
      summaries[p] = ResidualSummary(0, True)
      continue
    summary = ResidualSummary(0, False)
    for xs in _tuples(source, p, 1 - p, target.top_degree):
      summary.checked += 1
      residual = morphism_residual(source, target, f, xs)
      if residual:
        summary.nonzero.append((xs, residual))
    summaries[p] = summary
  return summaries


@dataclass
class AInfinityCertificate:
  """f1 on the H_theta basis and f2 on basis pairs, as chain elements of A_theta."""
  extension: GysinExtension
  f1: List[SparseRow]
  f2: Dict[Tuple[int, int], SparseRow]
  residuals: Dict[int, ResidualSummary]

  @property
  def verified(self) -> bool:
    return not any(s.nonzero for s in self.residuals.values())


def _gamma_on_e(g: GysinExtension, pk: ProductKernelData, gamma: List[SparseRow]) -> Callable[[SparseRow], SparseRow]:
  """Extend gamma from the E basis to any E vector given in G^2 H coordinates."""
  solvers: Dict[int, Tuple[List[int], List[int], SpanSolver]] = {}
  for d in pk.e_degrees():
    members = [k for k, e in enumerate(pk.e_basis) if e.degree == d]
    positions = pk.sym2.indices_in_degree(d)
    basis = [tuple(pk.e_basis[k].coords.get(q, ZERO) for q in positions) for k in members]
    solvers[d] = (members, positions, SpanSolver(basis, len(positions)))

  def apply(v: SparseRow) -> SparseRow:
    result: SparseRow = {}
    if not v:
      return result
    d = pk.sym2.element_degrees[next(iter(v))]
    if d not in solvers:
      raise CertificateException(f"no E basis in degree {d}")
    members, positions, solver = solvers[d]
    coords = solver.coordinates(tuple(v.get(q, ZERO) for q in positions))
    if coords is None:
      raise CertificateException("(1.xy) - (x.y) is not in E")
    for k, c in zip(members, coords):
      if c:
        _add_into(result, gamma[k], c)
    return result

  return apply


def f2_table(g: GysinExtension, pk: ProductKernelData, gamma: List[SparseRow]) -> Dict[Tuple[int, int], SparseRow]:
  """f2(x, y) = gamma((1.xy) - (x.y)) on every pair of H_theta basis classes."""
  h = g.h
  gamma_e = _gamma_on_e(g, pk, gamma)
  table = {}
  for x in range(h.size):
    for y in range(h.size):
      v = pk.sym2.pair({h.unit: ONE}, h.product(x, y))
      _add_into(v, pk.sym2.monomial((x, y)), -ONE)
      value = gamma_e(v)
      if value:
        table[(x, y)] = value
  return table


def _check_certificate(g: GysinExtension, f1: List[SparseRow], f2: Dict[Tuple[int, int], SparseRow]) -> Dict[int, ResidualSummary]:
  h = g.h
  for c, chain in enumerate(f1):
    if g.d(chain):
      raise CertificateException(f"f1 of class {h.name(c)} is not closed")
    if list(g.cohomology_class(chain)) != [ONE if k == c else ZERO for k in range(h.size)]:
      raise CertificateException(f"f1 of class {h.name(c)} does not represent it")
  for (x, y), chain in f2.items():
    if not g.in_theta_ideal(chain):
      raise CertificateException(f"f2({h.name(x)}, {h.name(y)}) leaves the theta ideal")

  source = algebra_operations(h)
  target = cdga_operations(g.chain)
  f = {
    1: lambda xs: dict(f1[xs[0]]),
    2: lambda xs: dict(f2.get((xs[0], xs[1]), {})),
  }
  residuals = verify_morphism(source, target, f, 5)
  for p, summary in residuals.items():
    if summary.nonzero:
      xs, _ = summary.nonzero[0]
      names = ", ".join(h.name(x) for x in xs)
      raise CertificateException(f"morphism equation fails at p = {p} on ({names})")
  return residuals


def build_certificate(
  g: GysinExtension, pk: ProductKernelData, u: UniformMassey, choice: Optional[Choice] = None,
) -> AInfinityCertificate:
  """Assemble f1 = alpha and f2 from the corrected gamma of `u`, and verify p = 1, ..., 5."""
  choice = choice or g.canonical
  f1 = [dict(chain) for chain in choice.alpha]
  f2 = f2_table(g, pk, u.gamma)
  residuals = _check_certificate(g, f1, f2)
  logging.info(
    "  Verified A-infinity certificate: %s tuples checked",
    {p: s.checked for p, s in residuals.items()},
  )
  return AInfinityCertificate(g, f1, f2, residuals)


def _named_row(names: Sequence[str], row: SparseRow) -> Dict[str, str]:
  return {names[k]: format_scalar(c) for k, c in sorted(row.items())}


def certificate_to_json(cert: AInfinityCertificate) -> str:
  g = cert.extension
  h_names = [b.name for b in g.h.basis]
  chain_names = [b.name for b in g.chain_algebra.basis]
  data = {
    "base": write_algebra(g.base),
    "euler": [format_scalar(c) for c in g.omega],
    "euler_degree": g.omega_degree,
    "classes": h_names,
    "f1": {h_names[c]: _named_row(chain_names, row) for c, row in enumerate(cert.f1)},
    "f2": {
      f"{h_names[x]}|{h_names[y]}": _named_row(chain_names, row)
      for (x, y), row in sorted(cert.f2.items())
    },
    "residuals": {
      str(p): {"checked": s.checked, "vacuous": s.vacuous, "nonzero": len(s.nonzero)}
      for p, s in sorted(cert.residuals.items())
    },
  }
  return json.dumps(data, indent=2, sort_keys=True) + "\n"


def certificate_from_json(text: str) -> Tuple[GysinExtension, List[SparseRow], Dict[Tuple[int, int], SparseRow]]:
  """Rebuild the extension and the f1, f2 tables; nothing is re-derived from gamma."""
  try:
    data = json.loads(text)
    handler = ErrorHandler()
    base = read_algebra(data["base"], handler)
    if base is None:
      raise InputException("embedded base algebra: " + "; ".join(handler.messages()))
    g = extend(base, [parse_scalar(c) for c in data["euler"]], omega_degree=data["euler_degree"])
    if data["classes"] != [b.name for b in g.h.basis]:
      raise InputException("class names do not match the rebuilt cohomology ring")

    def row(named: Dict[str, str]) -> SparseRow:
      return {g.chain_algebra.index(k): parse_scalar(v) for k, v in named.items()}

    f1 = [row(data["f1"][name]) for name in data["classes"]]
    f2 = {}
    for key, named in data["f2"].items():
      x, y = key.split("|")
      f2[(g.h.index(x), g.h.index(y))] = row(named)
  except (KeyError, ValueError, TypeError, ZeroDivisionError) as e:
    raise InputException(f"malformed certificate: {e}")
  return g, f1, f2


def verify_certificate(text: str) -> AInfinityCertificate:
  """Re-check a serialized certificate from its tables, base ring and Euler class alone."""
  g, f1, f2 = certificate_from_json(text)
  residuals = _check_certificate(g, f1, f2)
  return AInfinityCertificate(g, f1, f2, residuals)
