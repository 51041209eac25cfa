"""
Structured reports: plain dicts rendered as sorted, indented JSON with every
scalar written as a `p/q` string, so identical inputs give identical bytes.
"""
from typing import Dict, List, Optional, Sequence
import hashlib
import json

from .bmt import BianchiMasseyTensor, IndependenceReport
from .decide import FormalityVerdict, LefschetzReport, NotApplicable, Witness
from .galg import GradedAlgebra, Violation
from .gysin import GysinExtension
from .sympow import Sym2Basis, Sym2Sym2Basis
from .writer import format_combination, format_scalar, format_vector


def digest(sources: Sequence[bytes], arguments: Dict) -> str:
  """SHA-256 over the input files and the normalized arguments."""
  h = hashlib.sha256()
  for source in sources:
    h.update(hashlib.sha256(source).digest())
  h.update(json.dumps(arguments, sort_keys=True, separators=(",", ":")).encode("utf-8"))
  return h.hexdigest()


def sym2_names(names: Sequence[str], basis: Sym2Basis) -> List[str]:
  return [f"({names[i]}.{names[j]})" for i, j in basis.elements]


def _outer_labels(g: GysinExtension) -> List[str]:
  """Names of the G^2 G^2 H_theta basis, such as `((a.b).(a.b))`."""
  inner = sym2_names([b.name for b in g.h.basis], g.sym2)
  return [f"({inner[p]}.{inner[q]})" for p, q in Sym2Sym2Basis(g.sym2).elements]


def describe_witness(g: GysinExtension, witness: Witness) -> Dict:
  labels = _outer_labels(g)
  return {
    "element": format_combination(labels, [witness.vector.get(k, 0) for k in range(len(labels))]),
    "value": format_vector(g.h, witness.value),
  }


def tensor_entries(g: GysinExtension, tensor: BianchiMasseyTensor) -> Dict[str, List[Dict]]:
  labels = _outer_labels(g)
  result = {}
  for m in tensor.degrees():
    result[str(m)] = [
      {
        "element": format_combination(labels, [t.vector.get(k, 0) for k in range(len(labels))]),
        "value": format_vector(g.h, t.value),
      }
      for t in tensor.entries[m]
    ]
  return result


def verdict_report(
  command: str,
  input_digest: str,
  verdict: FormalityVerdict,
  seed: Optional[int] = None,
  certificate_path: Optional[str] = None,
  independence: Optional[IndependenceReport] = None,
  algebra: Optional[GradedAlgebra] = None,
) -> Dict:
  report = {
    "command": command,
    "inputs_sha256": input_digest,
    "verdict": "formal" if verdict.formal else "non-formal",
    "reason": verdict.reason.name.lower(),
    "findings": list(verdict.findings),
    "seed": seed,
    "certificate": certificate_path,
  }
  if verdict.witness is not None and verdict.extension is not None:
    report["witness"] = describe_witness(verdict.extension, verdict.witness)
  if verdict.certificate is not None:
    report["certificate_checks"] = {
      str(p): {"checked": s.checked, "vacuous": s.vacuous, "nonzero": len(s.nonzero)}
      for p, s in sorted(verdict.certificate.residuals.items())
    }
  if verdict.transcript is not None:
    report["transcript"] = transcript_report(verdict.transcript, algebra)
  if independence is not None:
    report["choice_independence"] = independence_report(independence)
  return report


def transcript_report(transcript, h: Optional[GradedAlgebra]) -> Dict:
  pairs = []
  if h is not None:
    pairs = [f"{format_vector(h, x)} : {format_vector(h, y)}" for x, y in transcript.decomposition]
  return {"decomposition": pairs, "s": transcript.s, "lines": list(transcript.lines)}


def not_applicable_report(command: str, input_digest: str, result: NotApplicable, h: GradedAlgebra) -> Dict:
  return {
    "command": command,
    "inputs_sha256": input_digest,
    "verdict": "not-applicable",
    "condition": result.condition,
    "reason": result.reason,
    "transcript": transcript_report(result.transcript, h),
    "note": "the obstruction is one-directional; this is not a formality verdict",
  }


def independence_report(report: IndependenceReport) -> Dict:
  return {
    "trials": report.trials,
    "seed": report.seed,
    "degrees": list(report.degrees),
    "max_deviation": format_scalar(report.max_deviation),
    "identical": report.identical,
  }


def lefschetz_report(command: str, input_digest: str, report: LefschetzReport) -> Dict:
  return {
    "command": command,
    "inputs_sha256": input_digest,
    "holds": report.holds,
    "first_failure": report.first_failure,
    "rows": [
      {"degree": r.degree, "source": r.source_dim, "target": r.target_dim, "rank": r.rank, "iso": r.iso}
      for r in report.rows
    ],
  }


def check_report(command: str, input_digest: str, violations: List[Violation], poincare: Optional[str]) -> Dict:
  return {
    "command": command,
    "inputs_sha256": input_digest,
    "violations": [str(v) for v in violations],
    "poincare": poincare,
    "ok": not violations and poincare == "ok",
  }


def render(report: Dict) -> str:
  return json.dumps(report, indent=2, sort_keys=True) + "\n"
