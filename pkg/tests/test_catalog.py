from random import Random
import pytest

from src.catalog import (
  complex_projective_space, exterior_algebra, odd_sphere, random_poincare_algebra, relabel,
  surface, tensor_product, truncated_polynomial,
)
from src.exception import InputException
from src.galg import euler_characteristic, poincare_check, validate
from src.writer import write_algebra


@pytest.mark.parametrize("algebra", [
  exterior_algebra(["a", "b", "c"]),
  exterior_algebra(["u", "v"], degree=3),
  truncated_polynomial("x", 4, 3),
  complex_projective_space(3),
  odd_sphere(5),
  surface(0),
  surface(1),
  surface(4),
])
def test_catalog_algebras_are_poincare(algebra):
  assert validate(algebra) == []
  poincare_check(algebra)


@pytest.mark.parametrize("genus", range(5))
def test_surface_betti_numbers(genus):
  s = surface(genus)
  assert [s.dim_in_degree(d) for d in range(3)] == [1, 2 * genus, 1]
  assert euler_characteristic(s) == 2 - 2 * genus


def test_exterior_algebra_signs():
  t3 = exterior_algebra(["a", "b", "c"])
  a, b, c, abc = (t3.index(n) for n in ("a", "b", "c", "abc"))
  assert t3.multiply_sparse(t3.product(c, a), {b: 1}) == {abc: 1}
  assert t3.multiply_sparse(t3.product(b, a), {c: 1}) == {abc: -1}


def test_tensor_product_matches_fixture(load):
  product = tensor_product(surface(0), relabel(surface(0), lambda s: "y"))
  assert validate(product) == []
  assert write_algebra(product) == write_algebra(load("s2xs2"))


def test_tensor_product_koszul_sign():
  product = tensor_product(odd_sphere(3, "u"), odd_sphere(3, "v"))
  u, v, uv = (product.index(n) for n in ("u", "v", "uv"))
  assert product.product(u, v) == {uv: 1}
  assert product.product(v, u) == {uv: -1}
  poincare_check(product)


def test_tensor_product_rejects_name_clash():
  with pytest.raises(InputException):
    tensor_product(surface(0), surface(0))


@pytest.mark.parametrize("seed", range(10))
def test_random_poincare_algebras(seed):
  a = random_poincare_algebra(Random(seed))
  assert validate(a) == []
  poincare_check(a)


@pytest.mark.parametrize(("factory", "args"), [
  (truncated_polynomial, ("x", 3, 3)),
  (truncated_polynomial, ("x", 0, 2)),
  (truncated_polynomial, ("x", 2, 0)),
  (exterior_algebra, (["a"], 2)),
  (odd_sphere, (4,)),
  (surface, (-1,)),
])
def test_catalog_rejects_bad_parameters(factory, args):
  with pytest.raises(InputException):
    factory(*args)
