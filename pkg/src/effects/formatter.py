"""
Rendering of effect reports and benchmark tables.

JSON is the machine format; the text form is an aligned-column table
rendered from a jinja2 template.
"""

import json
import logging
from collections.abc import Sequence
from typing import Any

from jinja2 import Environment, StrictUndefined

from src.effects.models import EffectReport, Estimand

logger = logging.getLogger(__name__)

_REPORT_TEMPLATE = """\
{{ "%-14s" | format("estimator") }} {{ "%-6s" | format("effect") }} {{ "%-10s" | format("contrast") }} {{ "%-22s" | format("at") }} {{ "%12s" | format("estimate") }}
{{ "-" * 68 }}
{% for row in rows %}
{{ "%-14s" | format(row.estimator) }} {{ "%-6s" | format(row.estimand) }} {{ "%-10s" | format(row.contrast) }} {{ "%-22s" | format(row.at) }} {{ "%12.4f" | format(row.value) }}
{% endfor %}
"""

_TABLE_TEMPLATE = """\
{% for name in columns %}{{ "%14s" | format(name) if not loop.first else "%-22s" | format(name) }}{% endfor %}

{{ "-" * width }}
{% for row in rows %}
{% for cell in row %}{{ ("%-22s" | format(cell)) if loop.first else ("%14s" | format(cell)) }}{% endfor %}

{% endfor %}
"""


class EffectFormatter:
    """Formats effect reports and aggregate tables for people and machines."""

    def __init__(self) -> None:
        self._env = Environment(
            undefined=StrictUndefined,
            trim_blocks=True,
            lstrip_blocks=True,
            keep_trailing_newline=True,
            autoescape=False,
        )
        self._report_template = self._env.from_string(_REPORT_TEMPLATE)
        self._table_template = self._env.from_string(_TABLE_TEMPLATE)

    def to_json(
        self, reports: Sequence[EffectReport], extra: dict[str, Any] | None = None
    ) -> str:
        payload: dict[str, Any] = {"effects": [r.to_dict() for r in reports]}
        if extra:
            payload.update(extra)
        return json.dumps(payload, indent=2, sort_keys=True)

    def to_text(self, reports: Sequence[EffectReport]) -> str:
        """One line per reported value."""
        rows = [row for report in reports for row in self._rows(report)]
        text = self._report_template.render(rows=rows)
        logger.debug(f"Rendered {len(rows)} effect rows")
        return text

    def table_text(self, columns: Sequence[str], rows: Sequence[Sequence[str]]) -> str:
        """Aligned text for an already-formatted table of strings."""
        width = 22 + 14 * (len(columns) - 1)
        return self._table_template.render(columns=columns, rows=rows, width=width)

    def _rows(self, report: EffectReport) -> list[dict[str, Any]]:
        contrast = f"{report.treated}-{report.control}"
        if report.estimand is Estimand.QTET:
            at = [f"p={p:g}" for p in report.probs]
        elif report.estimand is Estimand.CATE:
            at = ["x=(" + ", ".join(f"{v:g}" for v in pt) + ")" for pt in report.points]
        else:
            at = ["all units"]
        return [
            {
                "estimator": report.estimator,
                "estimand": str(report.estimand),
                "contrast": contrast,
                "at": label,
                "value": value,
            }
            for label, value in zip(at, report.values, strict=True)
        ]
