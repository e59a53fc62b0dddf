"""CSV and JSON emission. Every file is written to a temp file and renamed into place."""
import csv
import io
import math
import os
import tempfile
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence

from src.observability.logger import get_logger
from src.oracle.models import VerificationReport

logger = get_logger(__name__)

# exp() of anything below this underflows to a subnormal or zero
MIN_LINEAR_LOG = -700.0


def write_atomic(path: Path, text: str) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as f:
            f.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
    return path


def _linear(log_value: float) -> Optional[float]:
    return math.exp(log_value) if log_value >= MIN_LINEAR_LOG else None


def _format(value: Any) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    if isinstance(value, (list, tuple)):
        return ";".join(_format(v) for v in value)
    return str(value)


def render_csv(comment: str, columns: Sequence[str], rows: List[Dict[str, Any]]) -> str:
    buffer = io.StringIO()
    buffer.write(f"# {comment}\n")
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        writer.writerow([_format(row.get(col)) for col in columns])
    return buffer.getvalue()


def _tables(report: VerificationReport) -> Dict[str, str]:
    tables: Dict[str, str] = {}
    if report.normalization:
        tables["normalization.csv"] = render_csv(
            "label: totals; law: which factorization or marginal was summed; "
            "sum: total probability over the enumeration; abs_error: |sum - 1|",
            ["label", "law", "sum", "abs_error"],
            [{**row.model_dump(), "sum": row.total} for row in report.normalization],
        )
    if report.duality:
        tables["duality.csv"] = render_csv(
            "one row per canonical configuration; log_* are natural logs, lhs/rhs linear "
            "when representable; residual: |log_lhs - log_rhs|",
            [
                "label",
                "config_id",
                "r",
                "K_tilde",
                "multiplicity",
                "log_lhs",
                "log_rhs",
                "lhs",
                "rhs",
                "residual",
            ],
            [
                {
                    **row.model_dump(),
                    "K_tilde": row.k_tilde,
                    "lhs": _linear(row.log_lhs),
                    "rhs": _linear(row.log_rhs),
                }
                for row in report.duality
            ],
        )
    if report.quadrature:
        tables["quadrature.csv"] = render_csv(
            "reference: closed form or Bell sum; quadrature: numerical integral; "
            "abserr and neval as reported by the integrator",
            ["label", "reference", "quadrature", "rel_error", "abserr", "neval"],
            [row.model_dump() for row in report.quadrature],
        )
    if report.mc:
        tables["mc.csv"] = render_csv(
            "pooled chi-square against the exact pmf; tv: total variation on the "
            "truncated support plus tail",
            ["statistic", "chi2", "dof", "p_value", "tv", "draws"],
            [row.model_dump() for row in report.mc],
        )
    if report.samples:
        tables["samples.csv"] = render_csv(
            "one row per coupled draw; totals and fine_counts are per group, ';'-separated",
            ["seed", "draw", "phi", "k_tilde", "totals", "fine_counts"],
            [row.model_dump() for row in report.samples],
        )
    if report.criteria:
        tables["criteria.csv"] = render_csv(
            "kind upper: value must not exceed tolerance; kind lower: value must reach it",
            ["name", "value", "tolerance", "kind", "passed"],
            [{**c.model_dump(), "passed": c.passed} for c in report.criteria],
        )
    return tables


def emit_tables(report: VerificationReport, out_dir: Path) -> List[Path]:
    written = [write_atomic(Path(out_dir) / name, text) for name, text in _tables(report).items()]
    logger.debug(f"Wrote {len(written)} tables", out_dir=str(out_dir))
    return written


def emit_report(report: VerificationReport, path: Path) -> Path:
    return write_atomic(path, report.model_dump_json(indent=2) + "\n")
