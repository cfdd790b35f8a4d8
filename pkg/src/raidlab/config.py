"""Scenario configuration loading, validation, and report emission.

One self-describing JSON schema covers everything the command line runs:
disk profiles, workloads, code references, layouts, reliability parameters,
simulation settings and output requests.  Fixtures ship as data files under
raidlab/fixtures and are addressable as presets.
"""

import csv
import io
import json
import time
from dataclasses import dataclass, field
from importlib import resources

import jsonschema

from . import builders
from .disk import DiskProfile, cheetah_15k5
from .queueing import WorkloadSpec
from .declustering import CopysetScheme

TOOL_VERSION = "0.1.0"


class SchemaError(Exception):
    """Configuration fails schema validation (exit code 2)."""


class DomainError(Exception):
    """Configuration is schema-valid but violates a model domain (exit 3)."""


SCENARIO_SCHEMA = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "title": "raidlab scenario",
    "type": "object",
    "additionalProperties": False,
    "properties": {
        "version": {"type": "string"},
        "profile": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "preset": {"type": "string"},
                "cylinders": {"type": "integer", "minimum": 1},
                "rotation_time_ms": {"type": "number", "exclusiveMinimum": 0},
                "seek_char": {"type": "array", "items": {"type": "number"},
                              "minItems": 2, "maxItems": 3},
                "zones": {"type": "array",
                          "items": {"type": "array",
                                    "items": {"type": "integer"},
                                    "minItems": 2, "maxItems": 2}},
                "sector_size": {"type": "integer", "minimum": 1},
                "total_sectors": {"type": "integer", "minimum": 1},
                "no_move_prob": {"type": "number", "minimum": 0, "maximum": 1},
                "iops_rating": {"type": "number", "exclusiveMinimum": 0},
                "media_rate": {"type": "number", "exclusiveMinimum": 0},
                "name": {"type": "string"},
            },
        },
        "workload": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "arrival_rate": {"type": "number", "minimum": 0},
                "read_fraction": {"type": "number", "minimum": 0, "maximum": 1},
                "request_sectors": {"type": "integer", "minimum": 1},
            },
            "required": ["arrival_rate"],
        },
        "code": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "builder": {"type": "string"},
                "params": {"type": "object"},
                "inline": {"type": "object"},
                "granularity": {"enum": ["symbol", "column"]},
                "erasures": {},
            },
        },
        "layout": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "kind": {"enum": ["bibd-10-4", "nrp", "shifted"]},
                "disks": {"type": "integer", "minimum": 2},
                "group": {"type": "integer", "minimum": 2},
                "rows": {"type": "integer", "minimum": 1},
                "seed": {"type": "integer"},
            },
            "required": ["kind"],
        },
        "reliability": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "model": {"type": "string"},
                "disks": {"type": "integer", "minimum": 2},
                "data": {"type": "integer", "minimum": 1},
                "mttf_hours": {"type": "number", "exclusiveMinimum": 0},
                "mttr_hours": {"type": "number", "minimum": 0},
                "group": {"type": "integer"},
                "lse": {"type": "object"},
                "scheme": {"enum": ["none", "spc", "ipc", "rs"]},
                "error_model": {"enum": ["independent", "correlated"]},
                "placement": {"type": "object"},
            },
        },
        "copyset": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "nodes": {"type": "integer", "minimum": 2},
                "replication": {"type": "integer", "minimum": 2},
                "scatter_width": {"type": "integer", "minimum": 1},
                "scheme": {"enum": ["random", "copyset"]},
                "fail_count": {"type": "integer", "minimum": 0},
                "fail_fraction": {"type": "number", "minimum": 0,
                                  "maximum": 1},
            },
            "required": ["nodes", "replication", "scatter_width"],
        },
        "ctmc": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "transitions": {
                    "type": "array",
                    "items": {"type": "array", "minItems": 3, "maxItems": 3},
                },
                "absorbing": {"type": "array"},
                "initial": {"type": "object"},
                "times": {"type": "array", "items": {"type": "number"}},
            },
            "required": ["transitions", "absorbing"],
        },
        "sim": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "kind": {"enum": ["hraid", "generic", "copyset", "queue",
                                  "resch-table"]},
                "nodes": {"type": "integer", "minimum": 1},
                "disks_per_node": {"type": "integer", "minimum": 1},
                "inter_tolerance": {"type": "integer", "minimum": 0},
                "intra_tolerance": {"type": "integer", "minimum": 0},
                "delta": {"type": "number", "minimum": 0},
                "gamma": {"type": "number", "minimum": 0},
                "mu": {"type": "number", "minimum": 0},
                "components": {"type": "integer", "minimum": 1},
                "tolerance": {"type": "integer", "minimum": 0},
                "regime": {"enum": ["chen", "angus"]},
                "replications": {"type": "integer", "minimum": 1},
                "seed": {"type": "integer"},
                "level": {"type": "number", "exclusiveMinimum": 0,
                          "exclusiveMaximum": 1},
                "model": {"type": "string"},
                "params": {"type": "object"},
            },
        },
        "rebuild": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "tracks": {"type": "integer", "minimum": 1},
                "ru_fraction": {"type": "number", "exclusiveMinimum": 0},
                "utilized_fraction": {"type": "number",
                                      "exclusiveMinimum": 0, "maximum": 1},
                "stages": {"type": "integer", "minimum": 1},
                "beta": {"type": "number", "exclusiveMinimum": 0},
            },
        },
        "output": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "format": {"type": "array",
                           "items": {"enum": ["json", "csv", "tsv"]}},
                "path": {"type": "string"},
            },
        },
    },
}


def validate_scenario(doc):
    try:
        jsonschema.validate(doc, SCENARIO_SCHEMA)
    except jsonschema.ValidationError as err:
        raise SchemaError("%s (at %s)" % (err.message,
                                          "/".join(str(p) for p in err.path)))
    return doc


def load_scenario(path):
    with open(path) as fh:
        try:
            doc = json.load(fh)
        except json.JSONDecodeError as err:
            raise SchemaError("invalid JSON: %s" % err)
    return validate_scenario(doc)


def load_preset(name):
    """Bundled scenario fixtures by name (without .json)."""
    ref = resources.files("raidlab.fixtures").joinpath(name + ".json")
    if not ref.is_file():
        raise DomainError("unknown preset %r" % (name,))
    return validate_scenario(json.loads(ref.read_text()))


def profile_from_config(cfg):
    if cfg is None or cfg.get("preset") == "cheetah":
        return cheetah_15k5()
    if "preset" in cfg:
        raise DomainError("unknown profile preset %r" % (cfg["preset"],))
    kw = dict(cfg)
    kw["rotation_time"] = kw.pop("rotation_time_ms")
    kw["seek_char"] = tuple(kw["seek_char"])
    if "zones" in kw:
        kw["zones"] = tuple(tuple(z) for z in kw["zones"])
    try:
        return DiskProfile(**kw)
    except (TypeError, ValueError) as err:
        raise DomainError(str(err))


def workload_from_config(cfg):
    try:
        return WorkloadSpec(**cfg)
    except (TypeError, ValueError) as err:
        raise DomainError(str(err))


def code_from_config(cfg):
    from . import codes
    if "inline" in cfg:
        try:
            return codes.from_json(cfg["inline"])
        except (KeyError, TypeError, ValueError) as err:
            raise DomainError("bad inline code: %s" % err)
    if "builder" not in cfg:
        raise DomainError("code needs a builder name or an inline spec")
    try:
        return builders.build_code(cfg["builder"], **cfg.get("params", {}))
    except (TypeError, ValueError) as err:
        raise DomainError(str(err))


def copyset_from_config(cfg):
    kw = {k: v for k, v in cfg.items()
          if k in ("nodes", "replication", "scatter_width", "scheme")}
    try:
        return CopysetScheme(**kw)
    except (TypeError, ValueError) as err:
        raise DomainError(str(err))


@dataclass
class Report:
    """Structured result record: rows plus provenance and replay data."""

    scenario: dict
    command: str
    seed: int = None
    rows: list = field(default_factory=list)
    version: str = TOOL_VERSION
    elapsed_s: float = 0.0

    def add(self, metric, value, unit="", ci=None, provenance="analytic"):
        lo, hi = (None, None) if ci is None else ci
        self.rows.append({
            "metric": metric,
            "value": value,
            "unit": unit,
            "ci_low": lo,
            "ci_high": hi,
            "provenance": provenance,
        })

    def to_json(self):
        doc = {
            "command": self.command,
            "scenario": self.scenario,
            "seed": self.seed,
            "tool_version": self.version,
            "rows": self.rows,
            "elapsed_s": self.elapsed_s,
        }
        return json.dumps(doc, indent=2, sort_keys=True, default=str) + "\n"

    def to_csv(self, delimiter=","):
        buf = io.StringIO()
        writer = csv.writer(buf, delimiter=delimiter, lineterminator="\n")
        writer.writerow(["metric", "value", "unit", "ci_low", "ci_high",
                         "provenance"])
        for row in self.rows:
            writer.writerow([row["metric"], row["value"], row["unit"],
                             "" if row["ci_low"] is None else row["ci_low"],
                             "" if row["ci_high"] is None else row["ci_high"],
                             row["provenance"]])
        return buf.getvalue()


def emit(report, formats, path_base):
    """Write the report in each requested format; returns the file paths."""
    written = []
    for fmt in formats:
        path = "%s.%s" % (path_base, fmt)
        if fmt == "json":
            payload = report.to_json()
        elif fmt == "csv":
            payload = report.to_csv(",")
        elif fmt == "tsv":
            payload = report.to_csv("\t")
        else:
            raise DomainError("unknown output format %r" % (fmt,))
        with open(path, "w") as fh:
            fh.write(payload)
        written.append(path)
    return written
