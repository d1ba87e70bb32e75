"""
❌ Domain Errors
Error hierarchy shared by every layer; each error knows its CLI exit code
"""
from typing import Optional


class IttError(Exception):
    """Base class for all ittdns errors"""
    exit_code: int = 1


class ConfigurationError(IttError, ValueError):
    """Invalid grid, run configuration or registry label"""
    exit_code = 2


class ContractViolation(IttError, ValueError):
    """Caller broke a precondition (shape mismatch, decreasing time)"""
    exit_code = 2


class DomainError(IttError, ValueError):
    """Mathematically invalid request (exponent, bound index, inadmissible interpolation)"""
    exit_code = 2


class NumericalBlowupError(IttError):
    """Non-finite values or amplitude above the overflow guard"""
    exit_code = 3

    def __init__(
        self,
        message: str,
        time: Optional[float] = None,
        step: Optional[int] = None,
        max_amplitude: Optional[float] = None,
    ):
        super().__init__(message)
        self.time = time
        self.step = step
        self.max_amplitude = max_amplitude

    def __str__(self) -> str:
        base = super().__str__()
        details = []
        if self.step is not None:
            details.append(f"step={self.step}")
        if self.time is not None:
            details.append(f"t={self.time:.6g}")
        if self.max_amplitude is not None:
            details.append(f"max|u|={self.max_amplitude:.6g}")
        return f"{base} ({', '.join(details)})" if details else base


class OutputError(IttError):
    """I/O failure or missing report input"""
    exit_code = 4
