"""Report schemas"""
from .common import ErrorReport
from .report import VerificationReport

__all__ = ["ErrorReport", "VerificationReport"]
