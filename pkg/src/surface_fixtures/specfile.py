"""JSON fixture-spec files: strict parsing into FixtureSpec + build options."""

import json
from dataclasses import dataclass

from .errors import SpecValidationError
from .fixtures import GUIDANCE, VALUE, FixtureSpec, RegionRole
from .solvers import SolveParams

_TOP_KEYS = {"kind", "regions", "k", "epsilon", "t_d", "tolerance", "seed"}
_REGION_KEYS = {"role", "value"}
_ROLES = {"free", "value", "obstacle", "target"}


@dataclass
class BuildOptions:
    """Cloud/operator knobs carried alongside the fixture spec."""

    k: int = 12
    epsilon: float | None = None
    seed: int | None = None


def parse_spec(doc, default_t_d=None):
    """Validate a decoded spec document; unknown keys are rejected with
    their location. Returns (FixtureSpec, BuildOptions).

    t_d defaults to h^2; since h is cloud-dependent the caller passes the
    resolved default (or leaves it None and fills params later via
    resolve_params).
    """
    if not isinstance(doc, dict):
        raise SpecValidationError("spec root must be a JSON object")
    unknown = set(doc) - _TOP_KEYS
    if unknown:
        raise SpecValidationError(f"unknown spec keys at root: {sorted(unknown)}")

    kind = doc.get("kind")
    if kind not in (VALUE, GUIDANCE):
        raise SpecValidationError(f"spec.kind must be 'value' or 'guidance', got {kind!r}")

    regions_doc = doc.get("regions")
    if not isinstance(regions_doc, dict):
        raise SpecValidationError("spec.regions must be an object of id -> role")
    roles = {}
    for key, entry in regions_doc.items():
        try:
            rid = int(key)
        except ValueError:
            raise SpecValidationError(f"spec.regions key {key!r} is not an integer id")
        if not isinstance(entry, dict):
            raise SpecValidationError(f"spec.regions[{key}] must be an object")
        unknown = set(entry) - _REGION_KEYS
        if unknown:
            raise SpecValidationError(
                f"unknown keys in spec.regions[{key}]: {sorted(unknown)}"
            )
        role = entry.get("role")
        if role not in _ROLES:
            raise SpecValidationError(
                f"spec.regions[{key}].role must be one of {sorted(_ROLES)}, got {role!r}"
            )
        value = entry.get("value")
        if role == "value" and value is None:
            raise SpecValidationError(f"spec.regions[{key}] role 'value' needs a value")
        if value is not None:
            value = float(value)
        roles[rid] = RegionRole(role=role, value=value)

    tolerance = float(doc.get("tolerance", 1e-9))
    t_d = doc.get("t_d", default_t_d)
    params = SolveParams(diffusion_time=float(t_d), tolerance=tolerance) if t_d else None
    spec = FixtureSpec(kind=kind, region_roles=roles, params=params)

    options = BuildOptions(
        k=int(doc.get("k", 12)),
        epsilon=float(doc["epsilon"]) if "epsilon" in doc else None,
        seed=int(doc["seed"]) if "seed" in doc else None,
    )
    # stash the raw t_d so resolve_params can tell "absent" from "given"
    options.raw_t_d = doc.get("t_d")
    options.raw_tolerance = tolerance
    return spec, options


def load_spec(path):
    """Read and validate a spec file from disk."""
    with open(path) as f:
        try:
            doc = json.load(f)
        except json.JSONDecodeError as exc:
            raise SpecValidationError(f"spec file {path} is not valid JSON: {exc}")
    return parse_spec(doc)


def resolve_params(spec, options, mean_spacing):
    """Fill in the default diffusion time t_d = h^2 once h is known."""
    if spec.params is None:
        t_d = options.raw_t_d if options.raw_t_d else mean_spacing ** 2
        spec.params = SolveParams(
            diffusion_time=float(t_d), tolerance=options.raw_tolerance
        )
    return spec
