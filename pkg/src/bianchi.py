import logging
import sys
import time
from typing import List, Optional, Tuple

from .ainfty import certificate_to_json, verify_certificate
from .bmt import bm_tensor, choice_independence
from .decide import (
  BundleSpec, HLObstructionInput, NotApplicable, boothby_wang, hard_lefschetz_check,
  hl_obstruction, sphere_bundle_formality, utm_classify,
)
from .error import ErrorHandler
from .exception import BianchiException, PoincareException, RefusalException
from .galg import GradedAlgebra, GradedVector, poincare_check, validate
from .gysin import extend
from .parser import read_algebra, read_decomposition, read_expression
from .report import (
  check_report, digest, independence_report, lefschetz_report, not_applicable_report,
  render, tensor_entries, verdict_report,
)
from .sympow import product_kernel
from .writer import write_algebra

EXIT_OK = 0
EXIT_NON_FORMAL = 1
EXIT_ERROR = 2


class Bianchi:
  """The command-line program: reads algebra files, runs one command, prints a report."""
  def __init__(self):
    self.error_handler = ErrorHandler()

  def read_file(self, path: str) -> Tuple[Optional[GradedAlgebra], bytes]:
    """Parse an algebra file; errors are flushed to stderr and give None."""
    with open(path, "rb") as f:
      data = f.read()
    algebra = read_algebra(data.decode("utf-8"), self.error_handler)
    if self.error_handler.has_error():
      self.error_handler.flush()
      return None, data
    return algebra, data

  def read_vector(self, a: GradedAlgebra, expr: str) -> Optional[GradedVector]:
    terms = read_expression(expr, self.error_handler)
    if self.error_handler.has_error():
      self.error_handler.flush()
      return None
    return a.vector(terms)

  def read_pairs(self, a: GradedAlgebra, text: str) -> Optional[List[Tuple[GradedVector, GradedVector]]]:
    pairs = read_decomposition(text, self.error_handler)
    if self.error_handler.has_error():
      self.error_handler.flush()
      return None
    return [(a.element(x), a.element(y)) for x, y in pairs]

  def run(self, command: str, **kwargs) -> int:
    """Run one command, turning every library error into exit code 2."""
    handlers = {
      "check": self.check,
      "show": self.show,
      "formality": self.formality,
      "bm-tensor": self.tensor,
      "utm": self.utm,
      "hl": self.hl,
      "lefschetz": self.lefschetz,
      "certify-verify": self.certify_verify,
    }
    start = time.perf_counter()
    try:
      code = handlers[command](**kwargs)
    except RefusalException as e:
      print(f"Refused: {e}", file=sys.stderr)
      code = EXIT_ERROR
    except BianchiException as e:
      print(f"Error: {e}", file=sys.stderr)
      code = EXIT_ERROR
    except (OSError, UnicodeDecodeError) as e:
      print(f"Error: {e}", file=sys.stderr)
      code = EXIT_ERROR
    logging.info("  %s finished in %.3fs with exit code %d", command, time.perf_counter() - start, code)
    return code

  def check(self, path: str) -> int:
    a, data = self.read_file(path)
    if a is None:
      return EXIT_ERROR
    violations = validate(a)
    poincare = None
    if not violations:
      try:
        poincare_check(a)
        poincare = "ok"
      except PoincareException as e:
        poincare = f"{e} (degree {e.degree})"
      except BianchiException as e:
        poincare = str(e)
    report = check_report("check", digest([data], {"path": path}), violations, poincare)
    print(render(report), end="")
    return EXIT_OK if report["ok"] else EXIT_ERROR

  def show(self, path: str) -> int:
    a, _ = self.read_file(path)
    if a is None:
      return EXIT_ERROR
    print(write_algebra(a), end="")
    return EXIT_OK

  def formality(
    self, path: str, sphere_dim: int, euler: Optional[str], base_formal: bool,
    all_degrees: bool = False, certificate: Optional[str] = None, seed: int = 0, trials: int = 0,
  ) -> int:
    a, data = self.read_file(path)
    if a is None:
      return EXIT_ERROR
    e = None
    if euler is not None:
      e = self.read_vector(a, euler)
      if e is None:
        return EXIT_ERROR
    verdict = sphere_bundle_formality(
      BundleSpec(a, sphere_dim, e, base_formal_attested=base_formal), all_degrees=all_degrees,
    )
    independence = None
    if trials and verdict.extension is not None:
      g = verdict.extension
      independence = choice_independence(g, product_kernel(g.h), trials, seed)
    if certificate is not None and verdict.certificate is not None:
      with open(certificate, "w", encoding="utf-8") as f:
        f.write(certificate_to_json(verdict.certificate))
    arguments = {
      "command": "formality", "sphere_dim": sphere_dim, "euler": euler, "all_degrees": all_degrees,
      "seed": seed, "trials": trials,
    }
    report = verdict_report(
      "formality", digest([data], arguments), verdict, seed=seed,
      certificate_path=certificate if verdict.certificate is not None else None,
      independence=independence,
    )
    print(render(report), end="")
    return EXIT_OK if verdict.formal else EXIT_NON_FORMAL

  def tensor(
    self, path: str, sphere_dim: int, euler: str, all_degrees: bool = False, trials: int = 0, seed: int = 0,
  ) -> int:
    a, data = self.read_file(path)
    if a is None:
      return EXIT_ERROR
    e = self.read_vector(a, euler)
    if e is None:
      return EXIT_ERROR
    g = extend(a, e, omega_degree=sphere_dim + 1)
    pk = product_kernel(g.h)
    n = g.h.dimension
    degrees = sorted(set(pk.b_degrees()) | {n + 1}) if all_degrees else [n + 1]
    f = bm_tensor(g, pk, degrees)
    arguments = {"command": "bm-tensor", "sphere_dim": sphere_dim, "euler": euler, "all_degrees": all_degrees,
                 "seed": seed, "trials": trials}
    report = {
      "command": "bm-tensor",
      "inputs_sha256": digest([data], arguments),
      "decision_degree": n + 1,
      "tensor": tensor_entries(g, f),
      "vanishes": f.vanishes(n + 1),
      "seed": seed,
    }
    if trials:
      report["choice_independence"] = independence_report(choice_independence(g, pk, trials, seed, degrees))
    print(render(report), end="")
    return EXIT_OK if f.vanishes(n + 1) else EXIT_NON_FORMAL

  def utm(self, path: str) -> int:
    a, data = self.read_file(path)
    if a is None:
      return EXIT_ERROR
    verdict = utm_classify(a)
    print(render(verdict_report("utm", digest([data], {"command": "utm"}), verdict)), end="")
    return EXIT_OK if verdict.formal else EXIT_NON_FORMAL

  def hl(self, path: str, omega: str, r: int, decomposition: Optional[str] = None) -> int:
    a, data = self.read_file(path)
    if a is None:
      return EXIT_ERROR
    w = self.read_vector(a, omega)
    if w is None:
      return EXIT_ERROR
    pairs = None
    if decomposition is not None:
      pairs = self.read_pairs(a, decomposition)
      if pairs is None:
        return EXIT_ERROR
    result = hl_obstruction(HLObstructionInput(a, w, r, pairs))
    return self._obstruction_report("hl", digest([data], {"command": "hl", "omega": omega, "r": r,
                                                          "decomposition": decomposition}), result, a)

  def lefschetz(self, path: str, omega: str, boothby_wang_bundle: bool = False) -> int:
    a, data = self.read_file(path)
    if a is None:
      return EXIT_ERROR
    w = self.read_vector(a, omega)
    if w is None:
      return EXIT_ERROR
    input_digest = digest([data], {"command": "lefschetz", "omega": omega, "boothby_wang": boothby_wang_bundle})
    if boothby_wang_bundle:
      return self._obstruction_report("lefschetz", input_digest, boothby_wang(a, w), a)
    report = hard_lefschetz_check(a, w)
    print(render(lefschetz_report("lefschetz", input_digest, report)), end="")
    return EXIT_OK if report.holds else EXIT_NON_FORMAL

  def _obstruction_report(self, command: str, input_digest: str, result, a: GradedAlgebra) -> int:
    if isinstance(result, NotApplicable):
      print(render(not_applicable_report(command, input_digest, result, a)), end="")
      return EXIT_OK
    print(render(verdict_report(command, input_digest, result, algebra=a)), end="")
    return EXIT_NON_FORMAL

  def certify_verify(self, path: str) -> int:
    with open(path, "r", encoding="utf-8") as f:
      text = f.read()
    cert = verify_certificate(text)
    report = {
      "command": "certify-verify",
      "inputs_sha256": digest([text.encode("utf-8")], {"command": "certify-verify"}),
      "verified": cert.verified,
      "checks": {
        str(p): {"checked": s.checked, "vacuous": s.vacuous, "nonzero": len(s.nonzero)}
        for p, s in sorted(cert.residuals.items())
      },
    }
    print(render(report), end="")
    return EXIT_OK
