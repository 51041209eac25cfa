from fractions import Fraction
from random import Random
import pytest

from src.ainfty import cdga_operations, verify_relations
from src.error import ErrorHandler
from src.exactla import ONE, to_dense, to_sparse
from src.exception import InputException, InvariantViolation
from src.gysin import THETA, extend, gamma_canonical, gysin_dimensions, section_alpha
from src.parser import read_expression
from src.sympow import product_kernel

PAIRS = [
  ("s2", "x"), ("torus", "ab"), ("sigma2", "vol"), ("sigma3", "-4*vol"), ("cp2", "x"),
  ("cp2", "x2"), ("cp3", "x"), ("cp3", "x2"), ("cp3", "4*x3"), ("s2xs2", "xy"),
  ("s2xs2", "x - y"), ("s2xs2", "x"), ("s3xs3", "uv"), ("trunc_x3", "t2"),
  ("kodaira_thurston", "ac"), ("kodaira_thurston", "ac + tb"),
]


def euler(base, text):
  handler = ErrorHandler()
  terms = read_expression(text, handler)
  assert not handler.has_error()
  return base.vector(terms)


def test_torus_circle_bundle_ring(load):
  torus = load("torus")
  g = extend(torus, torus.element("ab"))
  h = g.h
  assert [b.name for b in h.basis] == ["one", "a", "b", "th_a", "th_b", "th_ab"]
  assert [b.degree for b in h.basis] == [0, 1, 1, 2, 2, 3]
  assert h.name(h.orientation) == "th_ab"
  assert h.product(h.index("a"), h.index("th_b")) == {h.index("th_ab"): -1}
  assert h.product(h.index("b"), h.index("th_a")) == {h.index("th_ab"): 1}
  assert h.product(h.index("a"), h.index("b")) == {}


@pytest.mark.parametrize(("name", "omega"), PAIRS)
def test_gysin_dimension_identity(name, omega, load):
  base = load(name)
  e = euler(base, omega)
  g = extend(base, e)
  assert gysin_dimensions(base, e) == {d: g.h.dim_in_degree(d) for d in g.h.degrees}


def test_zero_euler_class_doubles_the_ring(load):
  torus = load("torus")
  zero = torus.vector([])
  g = extend(torus, zero, omega_degree=2)
  assert g.h.size == 2 * torus.size
  assert gysin_dimensions(torus, zero, omega_degree=2) == {0: 1, 1: 3, 2: 3, 3: 1}


@pytest.mark.parametrize(("name", "omega"), [("torus", "ab"), ("cp2", "x2"), ("kodaira_thurston", "ac")])
def test_chain_algebra_is_a_cdga(name, omega, load):
  base = load(name)
  g = extend(base, euler(base, omega))
  assert g.chain.violations() == []
  assert verify_relations(cdga_operations(g.chain), 3).ok


@pytest.mark.parametrize(("name", "omega"), PAIRS)
def test_section_represents_every_class(name, omega, load):
  base = load(name)
  g = extend(base, euler(base, omega))
  for c, chain in enumerate(section_alpha(g)):
    assert g.d(chain) == {}
    assert g.cohomology_class(chain) == to_dense({c: ONE}, g.h.size)
    assert (g.classes[c].kind == THETA) == g.in_theta_ideal(chain)


@pytest.mark.parametrize(("name", "omega"), [("torus", "ab"), ("s2xs2", "xy"), ("sigma2", "vol"), ("cp3", "x")])
def test_gamma_bounds_alpha_squared(name, omega, load):
  base = load(name)
  g = extend(base, euler(base, omega))
  pk = product_kernel(g.h)
  for e in pk.e_basis:
    gamma = g.gamma(e.coords)
    assert g.d(gamma) == g.alpha_squared(e.coords)
    assert g.in_theta_ideal(gamma)


def test_non_closed_chain_has_no_class(load):
  torus = load("torus")
  g = extend(torus, torus.element("ab"))
  with pytest.raises(InvariantViolation):
    g.cohomology_class(g.theta({torus.unit: ONE}))


@pytest.mark.parametrize("seed", range(5))
def test_random_choices_are_admissible(seed, load):
  kt = load("kodaira_thurston")
  g = extend(kt, kt.element("ac"))
  rng = Random(seed)
  choice = g.random_choice(rng)
  for c, chain in enumerate(choice.alpha):
    assert g.d(chain) == {}
    assert g.cohomology_class(chain) == to_dense({c: ONE}, g.h.size)
  x = {kt.index("tabc"): Fraction(2)}
  assert kt.multiply_sparse(g.omega_sparse, g.omega_inverse(x, choice)) == x
  for d in range(5):
    assert g.d(g.random_closed(rng, d)) == {}


@pytest.mark.parametrize(("omega", "degree"), [("a", None), ("a + ab", None), ("ab", 4)])
def test_extend_rejects_bad_euler_classes(omega, degree, load):
  torus = load("torus")
  with pytest.raises(InputException):
    extend(torus, euler(torus, omega), omega_degree=degree)


def test_extend_needs_a_degree_for_zero(load):
  torus = load("torus")
  with pytest.raises(InputException):
    extend(torus, torus.vector([]))
  with pytest.raises(InputException):
    extend(torus, [Fraction(1)])


def test_canonical_gamma_on_the_torus(load):
  torus = load("torus")
  g = extend(torus, torus.element("ab"))
  h = g.h
  e = g.sym2.pair({h.index("a"): ONE}, {h.index("b"): ONE})
  gamma = gamma_canonical(g, e)
  assert gamma == g.theta({torus.unit: ONE})
  assert g.d(gamma) == g.alpha_squared(e) == {torus.index("ab"): ONE}
