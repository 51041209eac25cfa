from fractions import Fraction
from random import Random
import json
import pytest

from src.ainfty import certificate_to_json, verify_certificate
from src.catalog import random_poincare_algebra, relabel, surface, tensor_product
from src.decide import (
  BundleSpec, HLObstructionInput, NotApplicable, Outcome, Reason, SingleGenerator, boothby_wang,
  hard_lefschetz_check, hl_obstruction, single_generator_check, sphere_bundle_formality, utm_classify,
)
from src.exactla import to_dense
from src.exception import CertificateException, InputException, RefusalException
from src.galg import euler_characteristic


def volume_bundle(base):
  return BundleSpec(base, 1, base.element(base.name(base.orientation)), base_formal_attested=True)


@pytest.mark.parametrize(("genus", "utm", "utm_reason", "volume"), [
  (0, Outcome.FORMAL, Reason.SINGLE_GENERATOR, Outcome.FORMAL),
  (1, Outcome.FORMAL, Reason.ZERO_EULER_CHARACTERISTIC, Outcome.NON_FORMAL),
  (2, Outcome.NON_FORMAL, Reason.ODD_CLASS, Outcome.NON_FORMAL),
  (3, Outcome.NON_FORMAL, Reason.ODD_CLASS, Outcome.NON_FORMAL),
])
def test_riemann_surface_table(genus, utm, utm_reason, volume):
  s = surface(genus)
  verdict = utm_classify(s)
  assert (verdict.outcome, verdict.reason) == (utm, utm_reason)
  assert sphere_bundle_formality(volume_bundle(s)).outcome == volume


@pytest.mark.parametrize(("name", "reason"), [
  ("s2", Reason.SINGLE_GENERATOR),
  ("cp2", Reason.SINGLE_GENERATOR),
  ("cp3", Reason.SINGLE_GENERATOR),
  ("s2xs2", Reason.PRODUCT_KERNEL),
  ("sigma2", Reason.ODD_CLASS),
  ("sigma3", Reason.ODD_CLASS),
])
def test_unit_tangent_classifier_agrees_with_the_tensor(name, reason, load):
  h = load(name)
  verdict = utm_classify(h)
  assert verdict.reason == reason
  chi = euler_characteristic(h)
  euler = to_dense({h.orientation: Fraction(chi)}, h.size)
  spec = BundleSpec(h, h.dimension - 1, euler, base_formal_attested=True)
  assert sphere_bundle_formality(spec).outcome == verdict.outcome
  if not verdict.formal:
    g = verdict.extension
    factor = 2 if reason == Reason.ODD_CLASS else -2
    expected = g.cohomology_class({k: factor * c for k, c in g.theta(g.omega_sparse).items()})
    assert verdict.witness.value == expected
    assert any(verdict.witness.value)


def test_zero_euler_characteristic_gives_a_formal_unit_tangent_bundle(load):
  assert utm_classify(load("s3xs3")).reason == Reason.ZERO_EULER_CHARACTERISTIC


def test_torus_circle_bundle(load):
  torus = load("torus")
  verdict = sphere_bundle_formality(volume_bundle(torus))
  assert verdict.outcome == Outcome.NON_FORMAL
  assert verdict.reason == Reason.NONZERO_TENSOR
  assert any(verdict.witness.value)
  assert verdict.extension.h.size == 6

  obstruction = hl_obstruction(HLObstructionInput(torus, torus.element("ab"), 1))
  assert obstruction.outcome == Outcome.NON_FORMAL
  assert obstruction.transcript.s == 0


def test_verdict_does_not_depend_on_how_b_is_computed(load):
  spec = volume_bundle(load("torus"))
  assert sphere_bundle_formality(spec, via_intersection=True).outcome == Outcome.NON_FORMAL
  assert sphere_bundle_formality(spec, all_degrees=True).outcome == Outcome.NON_FORMAL


def test_cp2_bundle_is_formal_with_a_certificate(load):
  cp2 = load("cp2")
  verdict = sphere_bundle_formality(BundleSpec(cp2, 3, cp2.element("x2"), base_formal_attested=True))
  assert verdict.outcome == Outcome.FORMAL
  assert verdict.reason == Reason.ZERO_TENSOR
  cert = verdict.certificate
  assert cert.verified
  assert sorted(cert.residuals) == [1, 2, 3, 4, 5]
  assert all(not s.nonzero for s in cert.residuals.values())
  assert cert.residuals[5].vacuous

  again = verify_certificate(certificate_to_json(cert))
  assert again.verified
  assert {p: s.checked for p, s in again.residuals.items()} == {p: s.checked for p, s in cert.residuals.items()}


def test_tampered_certificate_is_rejected(load):
  cp2 = load("cp2")
  verdict = sphere_bundle_formality(BundleSpec(cp2, 3, cp2.element("x2"), base_formal_attested=True))
  data = json.loads(certificate_to_json(verdict.certificate))
  data["f1"]["x"] = {"x": "2"}
  with pytest.raises(CertificateException):
    verify_certificate(json.dumps(data))


def test_malformed_certificate_is_an_input_error():
  with pytest.raises(InputException):
    verify_certificate("{\"base\": 3}")


def test_the_two_paths_disagree_only_where_the_obstruction_does_not_apply(load):
  cp2 = load("cp2")
  with pytest.raises(InputException) as e:
    hl_obstruction(HLObstructionInput(cp2, cp2.element("x2"), 2))
  assert "divisible by 4" in str(e.value)
  spec = BundleSpec(cp2, 3, cp2.element("x2"), base_formal_attested=True)
  assert sphere_bundle_formality(spec).formal


@pytest.mark.parametrize("seed", range(10))
def test_even_spheres_give_formal_total_spaces(seed):
  base = random_poincare_algebra(Random(seed))
  verdict = sphere_bundle_formality(BundleSpec(base, 2, base_formal_attested=True))
  assert (verdict.outcome, verdict.reason) == (Outcome.FORMAL, Reason.EVEN_SPHERE)


def test_missing_attestation_is_refused(load):
  with pytest.raises(RefusalException):
    sphere_bundle_formality(BundleSpec(load("s2"), 2))


def test_odd_sphere_needs_an_euler_class(load):
  with pytest.raises(InputException):
    sphere_bundle_formality(BundleSpec(load("s2"), 1, base_formal_attested=True))


def test_non_poincare_total_space_is_an_input_error(load):
  base = load("misoriented")
  with pytest.raises(InputException):
    sphere_bundle_formality(BundleSpec(base, 1, base.element("x"), base_formal_attested=True))


def test_hl_obstruction_with_a_given_decomposition(load):
  torus = load("torus")
  pairs = [(torus.element("a"), torus.element("b"))]
  verdict = hl_obstruction(HLObstructionInput(torus, torus.element("ab"), 1, pairs))
  assert verdict.outcome == Outcome.NON_FORMAL
  with pytest.raises(InputException):
    hl_obstruction(HLObstructionInput(torus, torus.element("ab"), 1, [(torus.element("b"), torus.element("a"))]))


def test_hl_obstruction_not_applicable_without_degree_one_classes(load):
  cp2 = load("cp2")
  result = hl_obstruction(HLObstructionInput(cp2, cp2.element("x"), 1))
  assert isinstance(result, NotApplicable)
  assert result.condition == 1


def test_hard_lefschetz_table(load):
  cp2 = load("cp2")
  assert hard_lefschetz_check(cp2, cp2.element("x")).holds
  kt = load("kodaira_thurston")
  report = hard_lefschetz_check(kt, kt.vector([(1, "ac"), (1, "tb")]))
  assert not report.holds
  assert report.first_failure == 1
  assert [(r.source_dim, r.rank) for r in report.rows] == [(1, 1), (3, 2), (4, 4)]


def test_boothby_wang(load):
  torus = load("torus")
  assert boothby_wang(torus, torus.element("ab")).outcome == Outcome.NON_FORMAL
  kt = load("kodaira_thurston")
  result = boothby_wang(kt, kt.vector([(1, "ac"), (1, "tb")]))
  assert isinstance(result, NotApplicable)
  with pytest.raises(InputException):
    hard_lefschetz_check(torus, torus.element("a"))


@pytest.mark.parametrize(("name", "expected"), [
  ("cp3", SingleGenerator(2, 4)),
  ("trunc_x3", SingleGenerator(2, 3)),
  ("s2", SingleGenerator(2, 2)),
  ("s2xs2", None),
  ("s3xs3", None),
  ("sigma2", None),
])
def test_single_generator_check(name, expected, load):
  assert single_generator_check(load(name)) == expected


@pytest.mark.parametrize(("name", "sphere_dim"), [("torus", 1), ("cp2", 3), ("s2xs2", 3)])
def test_trivial_bundle_is_formal_with_a_linear_certificate(name, sphere_dim, load):
  base = load(name)
  verdict = sphere_bundle_formality(BundleSpec(base, sphere_dim, base.vector([]), base_formal_attested=True))
  assert (verdict.outcome, verdict.reason) == (Outcome.FORMAL, Reason.ZERO_TENSOR)
  assert verdict.tensor.vanishes()
  assert verdict.certificate.verified
  assert verdict.certificate.f2 == {}


def test_boothby_wang_over_a_product_of_genus_two_surfaces():
  base = tensor_product(surface(2), relabel(surface(2), str.upper))
  omega = base.vector([(1, "vol"), (1, "VOL")])
  assert hard_lefschetz_check(base, omega).holds
  verdict = boothby_wang(base, omega)
  assert (verdict.outcome, verdict.reason) == (Outcome.NON_FORMAL, Reason.HL_OBSTRUCTION)
  assert verdict.transcript.s == 1
