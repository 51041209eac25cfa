from typing import Optional


class BianchiException(RuntimeError):
  """An exception raised while computing with graded algebras."""
  def __init__(self, message):
    super(BianchiException, self).__init__(message)


class InputException(BianchiException):
  """An exception for input that is malformed or inconsistent."""
  def __init__(self, message):
    super(InputException, self).__init__("InputException: " + message)


class PoincareException(BianchiException):
  """An exception for an algebra that fails Poincare duality."""
  def __init__(self, message, degree: Optional[int] = None):
    super(PoincareException, self).__init__("PoincareException: " + message)
    self.degree = degree


class RefusalException(BianchiException):
  """An exception for a request the theory does not allow us to answer."""
  def __init__(self, message, witness=None):
    super(RefusalException, self).__init__("RefusalException: " + message)
    self.witness = witness


class InvariantViolation(BianchiException):
  """An exception for an internal invariant that failed to hold."""
  def __init__(self, message):
    super(InvariantViolation, self).__init__("InvariantViolation: " + message)


class CertificateException(BianchiException):
  """An exception for an A-infinity certificate with a nonzero residual."""
  def __init__(self, message):
    super(CertificateException, self).__init__("CertificateException: " + message)
