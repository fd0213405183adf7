"""Published JSON schemas for the summaries the command line emits.

Kept as plain dicts so callers can validate outputs with any JSON-schema
implementation; the test suite does exactly that.
"""

from __future__ import annotations

_NUMBER_OR_NULL = {"type": ["number", "null"]}

_QUADRUPLE = {
    "type": "object",
    "properties": {
        "a": {"type": "number"},
        "a_prime": {"type": "number"},
        "b": {"type": "number"},
        "b_prime": {"type": "number"},
    },
    "required": ["a", "a_prime", "b", "b_prime"],
    "additionalProperties": False,
}

CORRELATE_SCHEMA = {
    "type": "object",
    "properties": {
        "command": {"const": "correlate"},
        "model": {"type": "string"},
        "method": {"enum": ["analytic", "montecarlo"]},
        "units": {"const": "radians"},
        "trials": {"type": ["integer", "null"]},
        "seed": {"type": ["integer", "null"]},
        "partitions": {"type": ["integer", "null"]},
        "quadrature_points": {"type": ["integer", "null"]},
        "results": {
            "type": "array",
            "minItems": 1,
            "items": {
                "type": "object",
                "properties": {
                    "delta_rad": {"type": "number"},
                    "value": {"type": "number"},
                    "stderr": _NUMBER_OR_NULL,
                },
                "required": ["delta_rad", "value", "stderr"],
                "additionalProperties": False,
            },
        },
        "files": {"type": "object"},
    },
    "required": ["command", "model", "method", "units", "results", "files"],
    "additionalProperties": False,
}

CHSH_SCHEMA = {
    "type": "object",
    "properties": {
        "command": {"const": "chsh"},
        "model": {"type": "string"},
        "method": {"enum": ["analytic", "montecarlo"]},
        "units": {"const": "radians"},
        "maximize": {"type": "boolean"},
        "grid_step": _NUMBER_OR_NULL,
        "quadruple": _QUADRUPLE,
        "correlations": {
            "type": "object",
            "properties": {
                "ab": {"type": "number"},
                "ab_prime": {"type": "number"},
                "a_prime_b": {"type": "number"},
                "a_prime_b_prime": {"type": "number"},
            },
            "required": ["ab", "ab_prime", "a_prime_b", "a_prime_b_prime"],
            "additionalProperties": False,
        },
        "abs_form": {"type": "number"},
        "signed_form": {"type": "number"},
        "combined_stderr": _NUMBER_OR_NULL,
        "pair_stderrs": {"type": ["object", "null"]},
        "trials": {"type": ["integer", "null"]},
        "seed": {"type": ["integer", "null"]},
        "partitions": {"type": ["integer", "null"]},
        "quadrature_points": {"type": ["integer", "null"]},
    },
    "required": [
        "command", "model", "method", "units", "maximize", "quadruple",
        "correlations", "abs_form", "signed_form",
    ],
    "additionalProperties": False,
}

CHECK_RECORD_SCHEMA = {
    "type": "object",
    "properties": {
        "check": {"type": "string"},
        "statement": {"type": "string"},
        "inputs": {"type": "object"},
        "value": {"type": "number"},
        "bound": {"type": "number"},
        "pass": {"type": "boolean"},
        "detail": {"type": "object"},
    },
    "required": ["check", "statement", "inputs", "value", "bound", "pass"],
    "additionalProperties": False,
}

VERIFY_SCHEMA = {
    "type": "object",
    "properties": {
        "command": {"const": "verify"},
        "seed": {"type": "integer"},
        "all_pass": {"type": "boolean"},
        "checks": {"type": "array", "minItems": 1, "items": CHECK_RECORD_SCHEMA},
    },
    "required": ["command", "seed", "all_pass", "checks"],
    "additionalProperties": False,
}

OSCILLATOR_SCHEMA = {
    "type": "object",
    "properties": {
        "command": {"const": "oscillator"},
        "params": {
            "type": "object",
            "properties": {
                "m": {"type": "number"},
                "omega": {"type": "number"},
                "kappa": {"type": "number"},
                "h": {"type": "number"},
            },
            "required": ["m", "omega", "kappa", "h"],
            "additionalProperties": False,
        },
        "normal_frequencies": {
            "type": "array", "items": {"type": "number"},
            "minItems": 2, "maxItems": 2,
        },
        "levels": {
            "type": "array",
            "items": {
                "type": "object",
                "properties": {
                    "n1": {"type": "integer"},
                    "n2": {"type": "integer"},
                    "energy": {"type": "number"},
                },
                "required": ["n1", "n2", "energy"],
                "additionalProperties": False,
            },
        },
        "dt": {"type": "number"},
        "steps": {"type": "integer"},
        "energy_drift": {"type": "number"},
        "energy_span": {"type": "number"},
        "drift_tolerance": {"type": "number"},
        "drift_pass": {"type": "boolean"},
        "exchange_period_predicted": _NUMBER_OR_NULL,
        "exchange_period_measured": _NUMBER_OR_NULL,
        "exchange_period_rel_error": _NUMBER_OR_NULL,
        "files": {"type": "object"},
    },
    "required": [
        "command", "params", "normal_frequencies", "levels", "dt", "steps",
        "energy_drift", "drift_tolerance", "drift_pass", "files",
    ],
    "additionalProperties": False,
}
