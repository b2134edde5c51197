from typing import Optional


class FSSError(Exception):
    """Base class for all errors raised by the library"""


class SpecError(FSSError):
    def __init__(self, message: str, path: Optional[str] = None):
        self.path = path
        super().__init__(f"{path}: {message}" if path else message)


class SmoothnessError(SpecError):
    pass


class DegenerateRootsError(SpecError):
    pass


class SectorError(FSSError):
    pass


class RhoThresholdError(FSSError):
    pass


class ConvergenceError(FSSError):
    def __init__(self, message: str, iterations: int = 0, update_norm: float = float("nan")):
        self.iterations = iterations
        self.update_norm = update_norm
        super().__init__(f"{message} (iterations: {iterations}, last update: {update_norm:.3e})")


class SingularMatrixError(FSSError):
    def __init__(self, message: str, node: Optional[float] = None, rho_modulus: Optional[float] = None):
        self.node = node
        self.rho_modulus = rho_modulus
        details = []
        if node is not None:
            details.append(f"x: {node:.6g}")
        if rho_modulus is not None:
            details.append(f"|rho|: {rho_modulus:.6g}")
        super().__init__("{} ({})".format(message, ", ".join(details)) if details else message)


class VerificationError(FSSError):
    pass
