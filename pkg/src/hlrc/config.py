"""Job configuration: JSON schema, object builders and bundled presets.

Field elements in a config are coefficient vectors (constant term first); a
plain integer is read as the element index ``sum c_i p^i`` and normalized to
its vector.
"""

from __future__ import annotations

import copy

import jsonschema

from .code import CodeSpec
from .errors import ConfigInvalid
from .gf import AdditiveLHS, Field, make_field
from .surface import (
    ArtinSchreierSurface,
    BivariatePoly,
    KummerProductForm,
    KummerSurface,
    SurfaceSpec,
    kummer_example_surface,
)

ACTIONS = ("params", "build", "simulate", "verify-distance", "verify-census")
PATTERNS = ("uniform", "worst-lower", "worst-middle", "fail-middle")

_ELEMENT = {"oneOf": [
    {"type": "integer", "minimum": 0},
    {"type": "array", "items": {"type": "integer"}, "minItems": 1},
]}
_COUNT = {"type": "integer", "minimum": 0}

_AS_F = {
    "type": "object", "additionalProperties": False, "required": ["terms"],
    "properties": {"terms": {"type": "array", "items": {
        "type": "object", "additionalProperties": False, "required": ["x", "z", "c"],
        "properties": {"x": _COUNT, "z": _COUNT, "c": _ELEMENT},
    }}},
}
_KUMMER_F = {
    "type": "object", "additionalProperties": False, "required": ["c", "h", "nu", "roots"],
    "properties": {"c": _ELEMENT, "h": _COUNT, "nu": _COUNT,
                   "roots": {"type": "array", "items": _ELEMENT}},
}

_ACTION = {
    "type": "object", "additionalProperties": False, "required": ["action"],
    "properties": {
        "action": {"enum": list(ACTIONS)},
        "trials": {"type": "integer", "minimum": 1},
        "seed": _COUNT,
        "budget": {"type": "integer", "minimum": 1},
        "mode": {"enum": ["auto", "exhaustive", "sampled"]},
        "sharpness": {"type": "boolean"},
        "reference_bounds": {"type": "object", "additionalProperties": {"type": "integer"}},
        "patterns": {"type": "array", "items": {"enum": list(PATTERNS)}},
        "erasures": {"type": "integer", "minimum": 1},
        "lower_groups": {"type": "integer", "minimum": 1},
        "indices": {"type": "array", "items": _COUNT},
        "census": {"enum": ["as-census", "kummer-point-count"]},
        "p": {"type": "integer", "minimum": 3},
        "q": {"type": "integer", "minimum": 2},
    },
}

SCHEMA = {
    "type": "object", "additionalProperties": False, "required": ["field", "actions"],
    "properties": {
        "name": {"type": "string"},
        "field": {
            "type": "object", "additionalProperties": False, "required": ["p"],
            "properties": {"p": {"type": "integer", "minimum": 2},
                           "h": {"type": "integer", "minimum": 1},
                           "modulus": {"type": "array", "items": {"type": "integer"}}},
        },
        "surface": {
            "type": "object", "additionalProperties": False, "required": ["kind", "f"],
            "properties": {
                "kind": {"enum": ["artin-schreier", "kummer"]},
                "f": {"type": "object"},
                "lhs": {"type": "object", "additionalProperties": False, "required": ["exponent"],
                        "properties": {"exponent": {"type": "integer", "minimum": 2},
                                       "sign": {"enum": [-1, 1]}}},
                "lambda": {"type": "integer", "minimum": 2},
                "relaxed_degree": {"type": "boolean"},
            },
            "allOf": [
                {"if": {"properties": {"kind": {"const": "kummer"}}},
                 "then": {"required": ["lambda"], "properties": {"f": _KUMMER_F},
                          "not": {"anyOf": [{"required": ["lhs"]}, {"required": ["relaxed_degree"]}]}},
                 "else": {"properties": {"f": _AS_F}, "not": {"required": ["lambda"]}}},
            ],
        },
        "code": {
            "type": "object", "additionalProperties": False, "required": ["rho1", "rho2", "rho3"],
            "properties": {
                "eta": {"oneOf": [{"type": "integer", "minimum": 1}, {"const": "auto"}]},
                "rho1": {"type": "integer"}, "rho2": {"type": "integer"}, "rho3": {"type": "integer"},
                "waive_condition2": {"type": "boolean"},
            },
        },
        "actions": {"type": "array", "items": _ACTION},
        "output": {
            "type": "object", "additionalProperties": False,
            "properties": {"dir": {"type": "string"},
                           "formats": {"type": "array", "items": {"enum": ["json", "csv", "table"]},
                                       "minItems": 1}},
        },
    },
}


def validate_config(cfg: dict) -> dict:
    """Schema-check and normalize (integer elements become coefficient vectors)."""
    try:
        jsonschema.validate(cfg, SCHEMA)
    except jsonschema.ValidationError as exc:
        where = "/".join(str(p) for p in exc.absolute_path) or "<root>"
        raise ConfigInvalid(f"config invalid at {where}: {exc.message}") from None
    out = copy.deepcopy(cfg)
    F = build_field(out)
    surf = out.get("surface")
    if surf is not None:
        f = surf["f"]
        if surf["kind"] == "kummer":
            f["c"] = _normalize(F, f["c"])
            f["roots"] = [_normalize(F, a) for a in f["roots"]]
        else:
            for t in f["terms"]:
                t["c"] = _normalize(F, t["c"])
    for act in out["actions"]:
        if act["action"] in ("params", "build", "simulate", "verify-distance") and surf is None:
            raise ConfigInvalid(f"action {act['action']!r} needs a surface")
        if act["action"] in ("params", "build", "simulate", "verify-distance") and "code" not in out:
            raise ConfigInvalid(f"action {act['action']!r} needs a code section")
        if act["action"] == "verify-census":
            kind = act.get("census")
            if kind is None:
                raise ConfigInvalid("verify-census needs 'census'")
            if kind == "as-census" and "p" not in act:
                raise ConfigInvalid("as-census needs 'p'")
            if kind == "kummer-point-count" and "q" not in act:
                raise ConfigInvalid("kummer-point-count needs 'q'")
    return out


def _normalize(F: Field, value) -> list[int]:
    try:
        return [int(c) for c in F.digits(F.element(value if isinstance(value, int) else list(value)).value)]
    except (ValueError, TypeError) as exc:
        raise ConfigInvalid(f"bad field element {value!r}: {exc}") from None


def build_field(cfg: dict) -> Field:
    fc = cfg["field"]
    try:
        return make_field(fc["p"], fc.get("h", 1), fc.get("modulus"))
    except ConfigInvalid:
        raise
    except ValueError as exc:
        raise ConfigInvalid(f"field: {exc}") from None


def build_surface(cfg: dict) -> SurfaceSpec:
    F = build_field(cfg)
    sc = cfg["surface"]
    f = sc["f"]
    if sc["kind"] == "kummer":
        form = KummerProductForm(F, F.element(f["c"]), f["h"], f["nu"],
                                 tuple(F.element(a) for a in f["roots"]))
        return KummerSurface(F, sc["lambda"], form)
    coeffs: dict = {}
    for t in f["terms"]:
        key = (t["x"], t["z"])
        coeffs[key] = F.element(t["c"]) + coeffs[key] if key in coeffs else F.element(t["c"])
    poly = BivariatePoly.from_dict(F, coeffs)
    lhs = None
    if "lhs" in sc:
        lhs = AdditiveLHS(sc["lhs"]["exponent"], sc["lhs"].get("sign", -1))
    return ArtinSchreierSurface(F, poly, lhs, sc.get("relaxed_degree", False))


def build_code_spec(cfg: dict) -> CodeSpec:
    cc = cfg["code"]
    eta = cc.get("eta", "auto")
    return CodeSpec(build_surface(cfg), None if eta == "auto" else eta,
                    cc["rho1"], cc["rho2"], cc["rho3"], cc.get("waive_condition2", False))


# -- presets ------------------------------------------------------------------

def _as_p3(rho, actions, eta=5) -> dict:
    return {
        "field": {"p": 3, "h": 2},
        "surface": {"kind": "artin-schreier",
                    "f": {"terms": [{"x": 4, "z": 2, "c": [1]}, {"x": 2, "z": 4, "c": [1]}]}},
        "code": {"eta": eta, "rho1": rho[0], "rho2": rho[1], "rho3": rho[2]},
        "actions": actions,
    }


def _kummer_q(q: int, rho, actions) -> dict:
    surface = kummer_example_surface(q)
    F, form = surface.field, surface.f
    cfg = {
        "field": {"p": F.p, "h": F.h},
        "surface": {"kind": "kummer", "lambda": surface.lam,
                    "f": {"c": F.digits(form.c.value).tolist(), "h": form.h, "nu": form.nu,
                          "roots": [F.digits(a.value).tolist() for a in form.roots]}},
        "actions": actions,
    }
    if rho is not None:
        cfg["code"] = {"eta": "auto", "rho1": rho[0], "rho2": rho[1], "rho3": rho[2]}
    return cfg


_ALL_PATTERNS = ["worst-lower", "worst-middle", "fail-middle", "uniform"]


def _presets() -> dict:
    return {
        "as-p3-maxdim": _as_p3((4, 2, 1), [
            {"action": "params"},
            {"action": "verify-distance", "mode": "sampled", "trials": 100000, "seed": 0},
            {"action": "simulate", "trials": 200, "seed": 0, "patterns": _ALL_PATTERNS},
            {"action": "verify-census", "census": "as-census", "p": 3},
        ]),
        "as-p3-rho3": _as_p3((4, 2, 4), [
            {"action": "params"},
            {"action": "verify-distance", "mode": "exhaustive"},
        ]),
        "kummer-q5-sharp": _kummer_q(5, (10, 6, 23), [
            {"action": "params"},
            {"action": "verify-distance", "mode": "exhaustive", "sharpness": True},
        ]),
        "kummer-q5-maxdim": _kummer_q(5, (6, 2, 1), [
            {"action": "params"},
            {"action": "verify-distance", "mode": "sampled", "trials": 10000, "seed": 0,
             "reference_bounds": {"general": 20, "alternative": 28}},
            {"action": "simulate", "trials": 50, "seed": 0, "lower_groups": 16,
             "patterns": _ALL_PATTERNS},
        ]),
        "kummer-q2-pointcount": _kummer_q(2, None, [
            {"action": "verify-census", "census": "kummer-point-count", "q": 2},
        ]),
        "hermitian-cone-q2": {
            "field": {"p": 2, "h": 2},
            "surface": {"kind": "artin-schreier", "lhs": {"exponent": 2, "sign": 1},
                        "f": {"terms": [{"x": 3, "z": 0, "c": [1]}]}},
            "code": {"eta": 4, "rho1": 2, "rho2": 2, "rho3": 1},
            "actions": [
                {"action": "params"},
                {"action": "verify-distance", "mode": "sampled", "trials": 20000, "seed": 0},
                {"action": "simulate", "trials": 200, "seed": 0, "patterns": _ALL_PATTERNS},
            ],
        },
    }


PRESET_NAMES = ("as-p3-maxdim", "as-p3-rho3", "kummer-q5-sharp", "kummer-q5-maxdim",
                "kummer-q2-pointcount", "hermitian-cone-q2")


def preset(name: str) -> dict:
    presets = _presets()
    if name not in presets:
        raise ConfigInvalid(f"unknown preset {name!r}; choose from {', '.join(PRESET_NAMES)}")
    cfg = presets[name]
    cfg["name"] = name
    return cfg
