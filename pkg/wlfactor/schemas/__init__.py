from wlfactor.schemas.colors import ColorDump, ColorSetDump, ProductEntry
from wlfactor.schemas.config import RunConfig
from wlfactor.schemas.report import (
    BatchFailure,
    BatchReport,
    CertificateReport,
    CheckResult,
    FactorReport,
    StageFactor,
    StageReport,
    SweepSummary,
    VerificationReport,
)
from wlfactor.schemas.scheme import IntersectionTriple, SchemeDump

__all__ = [
    "BatchFailure",
    "BatchReport",
    "CertificateReport",
    "CheckResult",
    "ColorDump",
    "ColorSetDump",
    "FactorReport",
    "IntersectionTriple",
    "ProductEntry",
    "RunConfig",
    "SchemeDump",
    "StageFactor",
    "StageReport",
    "SweepSummary",
    "VerificationReport",
]
