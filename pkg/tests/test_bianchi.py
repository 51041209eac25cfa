import json
import pytest

from main import parse_args
from src import Bianchi


def run(capsys, command, **kwargs):
  code = Bianchi().run(command, **kwargs)
  captured = capsys.readouterr()
  return code, captured.out, captured.err


def test_check_accepts_a_poincare_algebra(capsys, fixture_path):
  code, out, _ = run(capsys, "check", path=fixture_path("torus"))
  assert code == 0
  report = json.loads(out)
  assert report["ok"] and report["poincare"] == "ok"
  assert len(report["inputs_sha256"]) == 64


def test_check_reports_a_degenerate_pairing(capsys, fixture_path):
  code, out, _ = run(capsys, "check", path=fixture_path("misoriented"))
  assert code == 2
  assert "degenerate" in json.loads(out)["poincare"]


def test_unreadable_files_exit_with_an_error(capsys, tmp_path):
  bad = tmp_path / "bad.alg"
  bad.write_text("dimension: x\n")
  code, out, err = run(capsys, "check", path=str(bad))
  assert code == 2
  assert out == ""
  assert err

  code, _, err = run(capsys, "check", path=str(tmp_path / "missing.alg"))
  assert code == 2
  assert err.startswith("Error:")


def test_show_writes_the_products(capsys, fixture_path):
  code, out, _ = run(capsys, "show", path=fixture_path("torus"))
  assert code == 0
  assert "a*b = ab" in out
  assert "orientation: ab" in out


def test_circle_bundle_over_the_torus_is_non_formal(capsys, fixture_path):
  code, out, _ = run(
    capsys, "formality", path=fixture_path("torus"), sphere_dim=1, euler="ab", base_formal=True,
  )
  assert code == 1
  report = json.loads(out)
  assert report["verdict"] == "non-formal"
  assert report["reason"] == "nonzero_tensor"
  assert "th_ab" in report["witness"]["value"]


def test_certificate_is_written_and_verified(capsys, fixture_path, tmp_path):
  path = str(tmp_path / "cp2.json")
  code, out, _ = run(
    capsys, "formality", path=fixture_path("cp2"), sphere_dim=3, euler="x2", base_formal=True, certificate=path,
  )
  assert code == 0
  report = json.loads(out)
  assert report["verdict"] == "formal"
  assert report["certificate"] == path
  assert report["certificate_checks"]["5"]["vacuous"]

  code, out, _ = run(capsys, "certify-verify", path=path)
  assert code == 0
  assert json.loads(out)["verified"]


def test_formality_without_attestation_is_refused(capsys, fixture_path):
  code, out, err = run(capsys, "formality", path=fixture_path("s2"), sphere_dim=3, euler=None, base_formal=False)
  assert code == 2
  assert out == ""
  assert err.startswith("Refused:")


def test_reports_are_deterministic(capsys, fixture_path):
  kwargs = dict(path=fixture_path("s2xs2"), sphere_dim=3, euler="xy", base_formal=True, seed=4, trials=3)
  first = run(capsys, "formality", **kwargs)
  second = run(capsys, "formality", **kwargs)
  assert first[0] == 1
  assert first[1] == second[1]
  assert json.loads(first[1])["choice_independence"]["identical"]


def test_digest_depends_on_the_arguments(capsys, fixture_path):
  _, a, _ = run(capsys, "formality", path=fixture_path("s2"), sphere_dim=2, euler=None, base_formal=True, seed=1)
  _, b, _ = run(capsys, "formality", path=fixture_path("s2"), sphere_dim=2, euler=None, base_formal=True, seed=2)
  assert json.loads(a)["reason"] == "even_sphere"
  assert json.loads(a)["inputs_sha256"] != json.loads(b)["inputs_sha256"]


def test_bm_tensor_lists_the_decision_degree(capsys, fixture_path):
  code, out, _ = run(capsys, "bm-tensor", path=fixture_path("torus"), sphere_dim=1, euler="ab", trials=2)
  assert code == 1
  report = json.loads(out)
  assert report["decision_degree"] == 4
  assert not report["vanishes"]
  assert report["tensor"]["4"]
  assert report["choice_independence"]["trials"] == 2


@pytest.mark.parametrize(("name", "code", "reason"), [
  ("sigma2", 1, "odd_class"),
  ("s2", 0, "single_generator"),
  ("torus", 0, "zero_euler_characteristic"),
])
def test_unit_tangent_bundle(capsys, fixture_path, name, code, reason):
  exit_code, out, _ = run(capsys, "utm", path=fixture_path(name))
  assert exit_code == code
  assert json.loads(out)["reason"] == reason


def test_hl_obstruction(capsys, fixture_path):
  code, out, _ = run(capsys, "hl", path=fixture_path("torus"), omega="ab", r=1, decomposition="a:b")
  assert code == 1
  report = json.loads(out)
  assert report["reason"] == "hl_obstruction"
  assert report["transcript"]["s"] == 0

  code, out, _ = run(capsys, "hl", path=fixture_path("cp2"), omega="x", r=1)
  assert code == 0
  report = json.loads(out)
  assert report["verdict"] == "not-applicable"
  assert report["condition"] == 1


def test_lefschetz_failure_on_kodaira_thurston(capsys, fixture_path):
  code, out, _ = run(capsys, "lefschetz", path=fixture_path("kodaira_thurston"), omega="ac + tb")
  assert code == 1
  report = json.loads(out)
  assert report["first_failure"] == 1
  assert [r["rank"] for r in report["rows"]] == [1, 2, 4]


def test_parse_args():
  args = parse_args(["formality", "base.alg", "--sphere-dim", "3", "--euler", "x2", "--base-formal", "--trials", "5"])
  assert (args.command, args.path, args.sphere_dim, args.euler) == ("formality", "base.alg", 3, "x2")
  assert args.base_formal and args.trials == 5 and not args.all_degrees
  assert parse_args(["-vv", "utm", "s2.alg"]).verbose == 2
  with pytest.raises(SystemExit):
    parse_args(["bm-tensor", "base.alg", "--sphere-dim", "1"])
