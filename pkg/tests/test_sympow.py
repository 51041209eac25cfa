from fractions import Fraction
from random import Random
import pytest

from src.catalog import surface
from src.exactla import Matrix, SpanSolver, rank, to_dense
from src.gysin import extend
from src.sympow import Sym2Basis, Sym2Sym2Basis, SymPowerBasis, koszul_sort, product_kernel, symmetrize_to_g4


def test_koszul_sort_signs():
  assert koszul_sort((1, 0), (1, 1)) == ((0, 1), -1)
  assert koszul_sort((1, 0), (2, 1)) == ((0, 1), 1)
  assert koszul_sort((0, 0), (1,)) is None
  assert koszul_sort((0, 0), (2,)) == ((0, 0), 1)


@pytest.mark.parametrize("seed", range(25))
def test_sign_is_independent_of_the_transposition_path(seed):
  rng = Random(seed)
  degrees = [rng.randint(0, 3) for _ in range(5)]
  word = [rng.randrange(5) for _ in range(4)]
  if koszul_sort(word, degrees) is None:
    return
  target, sign = koszul_sort(word, degrees)

  shuffled, acc = list(word), 1
  for _ in range(10):
    k = rng.randrange(len(shuffled) - 1)
    acc *= -1 if (degrees[shuffled[k]] * degrees[shuffled[k + 1]]) % 2 else 1
    shuffled[k], shuffled[k + 1] = shuffled[k + 1], shuffled[k]
  other, other_sign = koszul_sort(shuffled, degrees)
  assert other == target
  assert sign == acc * other_sign


def test_sym2_basis_drops_odd_squares():
  basis = Sym2Basis([0, 1, 1, 2])
  assert len(basis) == 8
  assert (1, 1) not in basis.index and (3, 3) in basis.index
  assert basis.pair({1: Fraction(1)}, {2: Fraction(1)}) == {basis.index[(1, 2)]: 1}
  assert basis.pair({2: Fraction(1)}, {1: Fraction(1)}) == {basis.index[(1, 2)]: -1}
  assert basis.pair({1: Fraction(1)}, {1: Fraction(1)}) == {}


def test_symmetric_power_degrees_are_sorted():
  basis = SymPowerBasis([0, 1, 2], 3)
  assert basis.element_degrees == sorted(basis.element_degrees)
  assert basis.monomial((2, 1, 0)) == {basis.index[(0, 1, 2)]: 1}


def test_product_kernel_of_the_torus(load):
  pk = product_kernel(load("torus"))
  assert {d: pk.E[d].dim for d in pk.E if pk.E[d].dim} == {2: 1, 3: 2, 4: 1}
  for e in pk.e_basis:
    positions = pk.sym2.indices_in_degree(e.degree)
    assert not any(pk.product_matrix(e.degree).apply([e.coords.get(p, 0) for p in positions]))


@pytest.mark.parametrize(("name", "euler"), [
  ("torus", "ab"), ("s2xs2", "xy"), ("cp2", "x2"), ("sigma2", "vol"),
])
def test_b_by_pullback_equals_b_by_intersection(name, euler, load):
  base = load(name)
  h = extend(base, base.element(euler)).h
  by_pullback = product_kernel(h)
  by_intersection = product_kernel(h, via_intersection=True)
  width = len(by_pullback.sym2_sym2)
  for m in by_pullback.b_degrees():
    first, second = by_pullback.B(m), by_intersection.B(m)
    assert first.dim == second.dim
    if not first.dim:
      continue
    solver = SpanSolver([to_dense(v, width) for v in first.vectors], width)
    for v in second.vectors:
      assert solver.coordinates(to_dense(v, width)) is not None
      assert by_pullback.symmetrize(v) == {}


def test_b_is_nonzero_in_the_decision_degree_of_a_surface_bundle():
  base = surface(2)
  g = extend(base, base.element("vol"))
  pk = product_kernel(g.h)
  assert pk.B(g.h.dimension + 1).dim > 0


def test_symmetrisation_of_an_even_square():
  b = Sym2Sym2Basis(Sym2Basis([2]))
  assert symmetrize_to_g4(b).apply([Fraction(1)]) == (1,)


def test_symmetrisation_kills_the_square_of_odd_classes():
  b = Sym2Sym2Basis(Sym2Basis([1, 1]))
  assert len(b) == 1
  assert not any(symmetrize_to_g4(b).apply([Fraction(1)]))


@pytest.mark.parametrize("degrees", [[1, 2, 1, 3], [2, 2, 2, 2], [1, 1, 1, 1], [0, 1, 2, 3]])
def test_symmetrisation_kills_the_exchange_relation(degrees):
  inner = Sym2Basis(degrees)
  b = Sym2Sym2Basis(inner)
  x, y, z, w = range(4)
  relation = b.pair(inner.monomial((x, y)), inner.monomial((z, w)))
  sign = (-1) ** (degrees[y] * degrees[z])
  for p, c in b.pair(inner.monomial((x, z)), inner.monomial((y, w))).items():
    relation[p] = relation.get(p, 0) - sign * c
  assert any(relation.values())
  assert not any(symmetrize_to_g4(b).apply(to_dense(relation, len(b))))


@pytest.mark.parametrize(("name", "euler"), [
  ("torus", "ab"), ("cp3", "x3"), ("sigma2", "vol"), ("s2xs2", "xy"),
])
def test_product_kernel_and_its_complement_split_g2(name, euler, load):
  base = load(name)
  pk = product_kernel(extend(base, base.element(euler)).h)
  for d in pk.E:
    ambient = len(pk.sym2.indices_in_degree(d))
    e_space, d_space = pk.E[d], pk.D[d]
    assert e_space.dim + d_space.dim == ambient
    assert rank(Matrix.from_rows(list(e_space.basis) + list(d_space.basis), ambient)) == ambient
    if d_space.dim:
      images = [pk.product_matrix(d).apply(v) for v in d_space.basis]
      assert rank(Matrix.from_columns(images, len(pk.h.indices_in_degree(d)))) == d_space.dim
