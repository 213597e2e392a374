"""
Deterministic rendering of reports: json and csv with frozen layouts from schema.yaml,
and the Markdown findings report from a Jinja2 template
"""

import csv
import io
import json
import logging
import math
from importlib import resources

import jinja2

import ovbound.two_value as two_value
import ovbound.util as util
import ovbound.exception as exception

logger = logging.getLogger(__name__)

TOOL_NAME = "ovbound"
DIGITS = 12

# Filters available to report templates
default_filters = {}

_schema = None

def load_schema():
    global _schema

    if _schema is None:
        text = resources.files("ovbound").joinpath("schema.yaml").read_text(encoding="utf-8")
        _schema = util.yaml_load(text)

        util.validate(isinstance(_schema, dict), "Report schema must be a mapping", exception.OVBInternalException)

    return _schema

def _layout(kind):
    schema = load_schema()

    if kind not in schema:
        raise exception.OVBInternalException(f"No report layout for kind: {kind}")

    return schema[kind]

def check_keys(kind, report):
    expected = _layout(kind)["keys"]

    if list(report.keys()) != expected:
        raise exception.OVBInternalException(f"Report keys for {kind} drifted from the schema: {list(report.keys())}")

def render_json(kind, report, command, parameters):
    check_keys(kind, report)

    envelope = {
        "tool": TOOL_NAME,
        "version": util.get_version(),
        "command": command,
        "parameters": parameters,
        "report": report
    }

    return json.dumps(util.plain(envelope, DIGITS), indent=2) + "\n"

def _lookup(obj, path):
    for part in path.split("."):
        if not isinstance(obj, dict):
            return None

        obj = obj.get(part)

    return obj

def _cell(val):
    if val is None:
        return ""

    if isinstance(val, bool):
        return "true" if val else "false"

    if isinstance(val, float):
        return "" if not math.isfinite(val) else f"{val:.{DIGITS}g}"

    if isinstance(val, list):
        return ";".join(_cell(x) for x in val)

    if isinstance(val, dict):
        raise exception.OVBInternalException(f"Csv column resolves to a mapping: {val}")

    return str(val)

def render_csv(kind, rows):
    """
    Header from the schema columns, one line per report row
    """
    columns = _layout(kind)["columns"]

    output = io.StringIO()
    writer = csv.writer(output, lineterminator="\n")
    writer.writerow(columns)

    for row in rows:
        check_keys(kind, row)
        row = util.plain(row, DIGITS)

        writer.writerow([_cell(_lookup(row, column)) for column in columns])

    return output.getvalue()

def render(kind, report, command, parameters, output_format="json"):
    if output_format == "csv":
        return render_csv(kind, [report])

    return render_json(kind, report, command, parameters)

def filter_fmt(value, digits=DIGITS):
    value = util.round_sig(value, digits)
    if value is None:
        return "n/a"

    return f"{value:.{digits}g}"

def environment():
    env = jinja2.Environment(undefined=jinja2.StrictUndefined, keep_trailing_newline=True)

    for filter_name in default_filters:
        env.filters[filter_name] = default_filters[filter_name]

    return env

def render_findings(scan, counterexample, threshold):
    """
    Markdown summary of a region scan, the counterexample pair and the beta threshold
    """
    util.validate(isinstance(scan, two_value.RegionScan), "Invalid scan passed to render_findings")
    util.validate(isinstance(counterexample, two_value.FeasibilityReport), "Invalid report passed to render_findings")

    spec = two_value.TwoValueSpec(counterexample.alpha1, counterexample.alpha2)
    branch_point = two_value.nearest_branch_point(spec)
    admissible = two_value.admissible_cells(scan)

    template_vars = {
        "version": util.get_version(),
        "scan": scan.to_dict(),
        "admissible_total": len(admissible),
        "admissible": scan.census(admissible),
        "admissible_one_root": scan.census(admissible, attr="one_root_verdict"),
        "counterexample": counterexample.to_dict(),
        "branch_point": None if branch_point is None else abs(branch_point),
        "hits": two_value.discriminant_hits(spec),
        "threshold": threshold,
        "closed_form_threshold": math.sqrt(math.sqrt(2.0) - 1.0),
        "status": two_value.existence_claim_status(scan)
    }

    text = resources.files("ovbound").joinpath("templates/findings.md.j2").read_text(encoding="utf-8")
    template = environment().from_string(text)

    return template.render(template_vars)

default_filters["fmt"] = filter_fmt
