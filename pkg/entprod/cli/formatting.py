import csv
import io
import json
from fractions import Fraction
from typing import Any, Iterable, Sequence

from entprod.config import Config


def format_value(value: Any) -> str:
    """CSV cell text: 12 significant digits for numbers, empty for missing values."""
    if value is None:
        return ""
    if isinstance(value, bool):
        return str(value).lower()
    if isinstance(value, int):
        return str(value)
    if isinstance(value, (float, Fraction)):
        return f"{float(value):.{Config.CSV_SIGNIFICANT_DIGITS}g}"
    return str(value)


def format_csv(columns: Sequence[str], rows: Iterable[Sequence[Any]], trailer: str | None = None) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        writer.writerow([format_value(v) for v in row])
    if trailer:
        buffer.write(f"# {trailer}\n")
    return buffer.getvalue()


def format_json(payload: dict[str, Any]) -> str:
    return json.dumps(payload, indent=2)


def error_dict(error_code: int, error_message: str) -> dict[str, Any]:
    return {"error_code": error_code, "error_message": error_message}
