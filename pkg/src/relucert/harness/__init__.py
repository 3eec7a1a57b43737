"""Experiment orchestration, artifact files and summary tables."""

from relucert.harness.experiment import ExperimentResult, run_experiment
from relucert.harness.models import (
    CANDIDATE_SCHEMA,
    CERTIFICATE_SCHEMA,
    CandidateFile,
    CertificateFile,
    ExperimentSpec,
    LiftReportFile,
    SummaryRow,
)
from relucert.harness.store import (
    load_candidate,
    load_certificate,
    load_point,
    save_candidate,
    save_certificate,
    save_lift_report,
)
from relucert.harness.tables import (
    LedgerRow,
    emit_cdf,
    read_runs_csv,
    summarize,
    write_cdf_csv,
    write_runs_csv,
    write_summary_csv,
)

__all__ = [
    "CANDIDATE_SCHEMA",
    "CERTIFICATE_SCHEMA",
    "CandidateFile",
    "CertificateFile",
    "ExperimentResult",
    "ExperimentSpec",
    "LiftReportFile",
    "LedgerRow",
    "SummaryRow",
    "emit_cdf",
    "load_candidate",
    "load_certificate",
    "load_point",
    "read_runs_csv",
    "run_experiment",
    "save_candidate",
    "save_certificate",
    "save_lift_report",
    "summarize",
    "write_cdf_csv",
    "write_runs_csv",
    "write_summary_csv",
]
