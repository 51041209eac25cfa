from fractions import Fraction
import pytest

from src.ainfty import (
  algebra_operations, cdga_operations, f2_table, morphism_residual, verify_morphism, verify_relations,
)
from src.catalog import exterior_algebra
from src.exactla import ONE
from src.galg import CDGA
from src.gysin import extend
from src.sympow import product_kernel


def identity(scale=ONE):
  return {1: lambda xs: {xs[0]: scale}}


def test_identity_is_a_morphism(load):
  cp2 = algebra_operations(load("cp2"))
  summaries = verify_morphism(cp2, cp2, identity(), 4)
  assert all(not s.nonzero for s in summaries.values())
  assert summaries[2].checked > 0
  assert summaries[3].vacuous and summaries[4].vacuous


def test_scaled_identity_is_not_a_morphism(load):
  cp2 = load("cp2")
  ops = algebra_operations(cp2)
  summaries = verify_morphism(ops, ops, identity(Fraction(2)), 2)
  assert summaries[2].nonzero
  x = cp2.index("x")
  assert morphism_residual(ops, ops, identity(Fraction(2)), (x, x)) == {cp2.index("x2"): -2}


def test_leibniz_failure_is_caught_at_p2():
  t3 = exterior_algebra(["a", "b", "c"])
  broken = CDGA(t3, {t3.index("ab"): {t3.index("abc"): ONE}})
  report = verify_relations(cdga_operations(broken), 3)
  assert not report.ok
  assert report.failure[0] == 2
  assert report.checked[1] > 0


def test_relations_count_only_tuples_of_admissible_degree(load):
  report = verify_relations(algebra_operations(load("s2")), 3)
  assert report.ok
  assert report.checked[3] == 4


def test_f2_vanishes_on_unit_pairs(load):
  cp2 = load("cp2")
  g = extend(cp2, cp2.element("x2"))
  pk = product_kernel(g.h)
  table = f2_table(g, pk, [g.gamma(e.coords) for e in pk.e_basis])
  unit = g.h.unit
  assert all(unit not in pair for pair in table)
  for chain in table.values():
    assert g.in_theta_ideal(chain)
