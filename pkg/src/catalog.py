"""
Constructors for standard cohomology rings: exterior algebras, truncated
polynomial rings, surfaces, odd spheres and graded tensor products of these.
"""
from fractions import Fraction
from itertools import combinations
from random import Random
from typing import Callable, Dict, List, Sequence, Tuple

from .exactla import ONE
from .exception import InputException
from .galg import BasisElement, GradedAlgebra, koszul_sign

UNIT_NAME = "one"


def exterior_algebra(names: Sequence[str], degree: int = 1) -> GradedAlgebra:
  """The exterior algebra on generators of one odd degree; basis words are concatenated names."""
  if degree % 2 == 0:
    raise InputException(f"exterior generators must have odd degree, not {degree}")
  count = len(names)
  words: List[Tuple[int, ...]] = []
  for size in range(count + 1):
    words.extend(combinations(range(count), size))
  position = {w: k for k, w in enumerate(words)}
  basis = [
    BasisElement("".join(names[g] for g in w) if w else UNIT_NAME, degree * len(w))
    for w in words
  ]

  products = {}
  for p, u in enumerate(words):
    for q, v in enumerate(words):
      if p > q or not u or not v or set(u) & set(v):
        continue
      inversions = sum(1 for s in u for t in v if s > t)
      products[(p, q)] = {position[tuple(sorted(u + v))]: Fraction((-1) ** inversions)}
  return GradedAlgebra(degree * count, basis, 0, products, orientation=len(words) - 1)


def truncated_polynomial(name: str, degree: int, p: int) -> GradedAlgebra:
  """K[x]/(x^p) with deg x = degree; powers are named x, x2, x3, ..."""
  if p < 1:
    raise InputException(f"truncation order must be positive, not {p}")
  if degree % 2 == 1 and p > 2:
    raise InputException(f"an odd generator squares to zero, so K[{name}]/({name}^{p}) is not graded-commutative")
  if degree == 0 and p > 1:
    raise InputException("generator of degree 0 would make the algebra disconnected")
  basis = [BasisElement(UNIT_NAME, 0)]
  basis.extend(BasisElement(name if k == 1 else f"{name}{k}", degree * k) for k in range(1, p))
  products = {
    (i, j): {i + j: ONE}
    for i in range(1, p) for j in range(i, p) if i + j < p
  }
  return GradedAlgebra(degree * (p - 1), basis, 0, products, orientation=p - 1)


def complex_projective_space(n: int) -> GradedAlgebra:
  return truncated_polynomial("x", 2, n + 1)


def odd_sphere(degree: int, name: str = "z") -> GradedAlgebra:
  if degree % 2 == 0:
    raise InputException(f"odd_sphere needs an odd degree, not {degree}")
  return truncated_polynomial(name, degree, 2)


def surface(genus: int) -> GradedAlgebra:
  """H*(closed orientable surface of the given genus) with a_i * b_i = vol."""
  if genus < 0:
    raise InputException(f"genus must be non-negative, not {genus}")
  if genus == 0:
    return truncated_polynomial("x", 2, 2)
  if genus == 1:
    return exterior_algebra(["a", "b"])
  basis = [BasisElement(UNIT_NAME, 0)]
  basis.extend(BasisElement(f"a{k}", 1) for k in range(1, genus + 1))
  basis.extend(BasisElement(f"b{k}", 1) for k in range(1, genus + 1))
  basis.append(BasisElement("vol", 2))
  vol = len(basis) - 1
  products = {(k, genus + k): {vol: ONE} for k in range(1, genus + 1)}
  return GradedAlgebra(2, basis, 0, products, orientation=vol)


def relabel(a: GradedAlgebra, rename: Callable[[str], str]) -> GradedAlgebra:
  """The same algebra with every non-unit basis element renamed."""
  basis = [
    b if i == a.unit else BasisElement(rename(b.name), b.degree)
    for i, b in enumerate(a.basis)
  ]
  return GradedAlgebra(a.dimension, basis, a.unit, a.table, a.orientation)


def tensor_product(a: GradedAlgebra, b: GradedAlgebra) -> GradedAlgebra:
  """
  The graded tensor product, (x (x) y)(z (x) w) = (-1)^(|y||z|) xz (x) yw.

  A pure tensor with a unit factor keeps the other factor's name; any other
  pure tensor is named by concatenation. Basis order is by (degree, j, i), so
  within a degree the left factor's classes times the right unit come first.
  """
  pairs = sorted(
    ((i, j) for i in range(a.size) for j in range(b.size)),
    key=lambda ij: (a.degree(ij[0]) + b.degree(ij[1]), ij[1], ij[0]),
  )
  position = {ij: k for k, ij in enumerate(pairs)}

  def name(i: int, j: int) -> str:
    if i == a.unit and j == b.unit:
      return UNIT_NAME
    if j == b.unit:
      return a.name(i)
    if i == a.unit:
      return b.name(j)
    return a.name(i) + b.name(j)

  basis = [BasisElement(name(i, j), a.degree(i) + b.degree(j)) for i, j in pairs]
  names = [e.name for e in basis]
  if len(set(names)) != len(names):
    raise InputException("tensor factors share basis names; relabel one of them first")

  products: Dict[Tuple[int, int], Dict[int, Fraction]] = {}
  for p, (i, j) in enumerate(pairs):
    for q, (k, l) in enumerate(pairs):
      if p > q:
        continue
      left, right = a.product(i, k), b.product(j, l)
      if not left or not right:
        continue
      sign = koszul_sign(b.degree(j), a.degree(k))
      row = {}
      for x, c in left.items():
        for y, d in right.items():
          row[position[(x, y)]] = sign * c * d
      products[(p, q)] = row

  orientation = None
  if a.orientation is not None and b.orientation is not None:
    orientation = position[(a.orientation, b.orientation)]
  return GradedAlgebra(a.dimension + b.dimension, basis, position[(a.unit, b.unit)], products, orientation)


def random_poincare_algebra(rng: Random, max_factors: int = 2) -> GradedAlgebra:
  """A tensor product of randomly chosen catalog factors; always valid and Poincare."""
  factories: List[Callable[[], GradedAlgebra]] = [
    lambda: truncated_polynomial("x", rng.choice([2, 4]), rng.randint(2, 4)),
    lambda: odd_sphere(rng.choice([1, 3, 5])),
    lambda: surface(rng.randint(0, 3)),
    lambda: exterior_algebra(["a", "b", "c"][:rng.randint(1, 3)]),
  ]
  result = None
  for k in range(rng.randint(1, max_factors)):
    factor = relabel(rng.choice(factories)(), lambda s, k=k: f"{s}_{k}")
    result = factor if result is None else tensor_product(result, factor)
  return result
