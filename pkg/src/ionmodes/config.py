"""Run-configuration schema: a versioned JSON document, strictly validated.

Masses are in atomic mass units, lengths in micrometres, frequencies in MHz
(detunings in kHz), temperatures in millikelvin, curvatures in V m^-2;
everything is converted to SI here at the boundary.  Unknown keys are
rejected with the offending field path.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np

from .calibration import IN_PHASE, OUT_OF_PHASE, PotentialFamily
from .dynamics import ThermalEnvironment
from .potentials import AxialPotential, TrapModel3D, axial_from_lambdas, \
    trap3d_from_frequencies
from .species import IonSpecies, make_species

CONFIG_VERSION = 1

COMMAND_SECTIONS = ("modes", "chi", "coherence", "gate", "scan", "null",
                    "sensitivity")
TOP_LEVEL_KEYS = ("version", "species", "chain", "potential", "trap3d",
                  "environment") + COMMAND_SECTIONS


class ConfigError(ValueError):
    """Invalid configuration; ``path`` locates the offending field."""

    def __init__(self, path: str, message: str):
        self.path = path
        super().__init__(f"{path}: {message}")


def _require_mapping(obj, path):
    if not isinstance(obj, dict):
        raise ConfigError(path, f"expected an object, got {type(obj).__name__}")
    return obj


def _check_keys(obj, path, allowed):
    for key in obj:
        if key not in allowed:
            raise ConfigError(f"{path}.{key}", "unknown key")


def _number(obj, path, minimum=None, nonzero=False):
    if isinstance(obj, bool) or not isinstance(obj, (int, float)):
        raise ConfigError(path, f"expected a number, got {type(obj).__name__}")
    v = float(obj)
    if not math.isfinite(v):
        raise ConfigError(path, "must be finite")
    if minimum is not None and v < minimum:
        raise ConfigError(path, f"must be >= {minimum}")
    if nonzero and v == 0:
        raise ConfigError(path, "must be nonzero")
    return v


def _integer(obj, path, minimum=None):
    if isinstance(obj, bool) or not isinstance(obj, int):
        raise ConfigError(path, f"expected an integer, got {type(obj).__name__}")
    if minimum is not None and obj < minimum:
        raise ConfigError(path, f"must be >= {minimum}")
    return int(obj)


def load_config(path) -> dict:
    with open(path) as fh:
        try:
            raw = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ConfigError("<document>", f"invalid JSON: {exc}") from exc
    return raw


def apply_overrides(raw: dict, overrides) -> dict:
    """Apply ``--param dotted.path=value`` overrides (values parsed as JSON)."""
    for item in overrides:
        if "=" not in item:
            raise ConfigError("<override>", f"expected key=value, got {item!r}")
        key, _, text = item.partition("=")
        try:
            value = json.loads(text)
        except json.JSONDecodeError:
            value = text
        node = raw
        parts = key.split(".")
        for part in parts[:-1]:
            node = node.setdefault(part, {})
            if not isinstance(node, dict):
                raise ConfigError(key, "override path crosses a non-object")
        node[parts[-1]] = value
    return raw


@dataclass(frozen=True, eq=False)
class RunConfig:
    """Validated configuration with domain objects built."""

    species: dict[str, IonSpecies]
    chain: tuple[IonSpecies, ...]
    axial: AxialPotential
    trap3d: TrapModel3D | None
    environment: ThermalEnvironment | None
    sections: dict

    @property
    def potential(self):
        return self.trap3d if self.trap3d is not None else self.axial


def _parse_species(raw, path) -> dict[str, IonSpecies]:
    table = {}
    for label, body in _require_mapping(raw, path).items():
        p = f"{path}.{label}"
        _check_keys(_require_mapping(body, p), p, ("mass_u", "charge_e"))
        if "mass_u" not in body:
            raise ConfigError(f"{p}.mass_u", "required")
        mass = _number(body["mass_u"], f"{p}.mass_u")
        if mass <= 0:
            raise ConfigError(f"{p}.mass_u", "must be positive")
        charge = _integer(body.get("charge_e", 1), f"{p}.charge_e")
        if charge == 0:
            raise ConfigError(f"{p}.charge_e", "must be nonzero")
        table[label] = make_species(label, mass, charge)
    if not table:
        raise ConfigError(path, "at least one species is required")
    return table


def _lookup(table, label, path):
    if label not in table:
        raise ConfigError(path, f"unknown species {label!r}")
    return table[label]


def _parse_potential(raw, path, table) -> AxialPotential:
    allowed = ("kappa2", "lambdas_um", "kappas", "field_v_per_m",
               "pseudo_gradient_ev_per_m", "pseudo_reference", "origin_um")
    body = _require_mapping(raw, path)
    _check_keys(body, path, allowed)
    if "kappa2" not in body:
        raise ConfigError(f"{path}.kappa2", "required")
    kappa2 = _number(body["kappa2"], f"{path}.kappa2")
    if kappa2 <= 0:
        raise ConfigError(f"{path}.kappa2", "must be positive")
    kwargs = {
        "uniform_field": _number(body.get("field_v_per_m", 0.0),
                                 f"{path}.field_v_per_m"),
        "pseudo_gradient": _number(body.get("pseudo_gradient_ev_per_m", 0.0),
                                   f"{path}.pseudo_gradient_ev_per_m"),
        "expansion_origin": _number(body.get("origin_um", 0.0),
                                    f"{path}.origin_um") * 1e-6,
    }
    if "pseudo_reference" in body:
        kwargs["pseudo_reference"] = _lookup(table, body["pseudo_reference"],
                                             f"{path}.pseudo_reference")
    elif kwargs["pseudo_gradient"]:
        raise ConfigError(f"{path}.pseudo_reference",
                          "required when pseudo_gradient_ev_per_m is nonzero")
    lambdas = {}
    for n_text, lam in _require_mapping(body.get("lambdas_um", {}),
                                        f"{path}.lambdas_um").items():
        p = f"{path}.lambdas_um.{n_text}"
        n = _order_key(n_text, p)
        lambdas[n] = _number(lam, p, nonzero=True) * 1e-6
    try:
        kappa = dict(axial_from_lambdas(kappa2, lambdas).kappa)
    except ValueError as exc:
        raise ConfigError(path, str(exc)) from exc
    for n_text, kn in _require_mapping(body.get("kappas", {}),
                                       f"{path}.kappas").items():
        p = f"{path}.kappas.{n_text}"
        n = _order_key(n_text, p)
        if n in kappa:
            raise ConfigError(p, "order given in both kappas and lambdas_um")
        kappa[n] = _number(kn, p)
    try:
        return AxialPotential(kappa=kappa, **kwargs)
    except ValueError as exc:
        raise ConfigError(path, str(exc)) from exc


def _order_key(text, path) -> int:
    try:
        n = int(text)
    except (TypeError, ValueError):
        raise ConfigError(path, f"polynomial order must be an integer, got {text!r}")
    if n < 3:
        raise ConfigError(path, "anharmonic orders start at 3")
    return n


def _parse_tensor(raw, path, shape):
    arr = np.asarray(raw, dtype=float)
    if arr.shape != shape:
        raise ConfigError(path, f"expected shape {shape}, got {arr.shape}")
    return arr


def _parse_trap3d(raw, path, table, axial) -> TrapModel3D:
    allowed = ("reference", "radial_mhz", "radial_mass_scaling",
               "cubic_tensor_v_per_m3", "quartic_tensor_v_per_m4")
    body = _require_mapping(raw, path)
    _check_keys(body, path, allowed)
    for key in ("reference", "radial_mhz"):
        if key not in body:
            raise ConfigError(f"{path}.{key}", "required")
    ref = _lookup(table, body["reference"], f"{path}.reference")
    radial = body["radial_mhz"]
    if not isinstance(radial, list) or len(radial) != 2:
        raise ConfigError(f"{path}.radial_mhz", "expected [f1, f2] in MHz")
    fx = _number(radial[0], f"{path}.radial_mhz[0]")
    fy = _number(radial[1], f"{path}.radial_mhz[1]")
    if fx <= 0 or fy <= 0:
        raise ConfigError(f"{path}.radial_mhz", "frequencies must be positive")
    scaling = body.get("radial_mass_scaling", True)
    if not isinstance(scaling, bool):
        raise ConfigError(f"{path}.radial_mass_scaling", "expected a boolean")
    cubic = quartic = None
    if "cubic_tensor_v_per_m3" in body:
        cubic = _parse_tensor(body["cubic_tensor_v_per_m3"],
                              f"{path}.cubic_tensor_v_per_m3", (3, 3, 3))
    if "quartic_tensor_v_per_m4" in body:
        quartic = _parse_tensor(body["quartic_tensor_v_per_m4"],
                                f"{path}.quartic_tensor_v_per_m4", (3, 3, 3, 3))
    try:
        return trap3d_from_frequencies(ref, (fx * 1e6, fy * 1e6), axial,
                                       trap_cubic=cubic, trap_quartic=quartic,
                                       radial_mass_scaling=scaling)
    except ValueError as exc:
        raise ConfigError(path, str(exc)) from exc


def _parse_environment(raw, path) -> ThermalEnvironment:
    body = _require_mapping(raw, path)
    _check_keys(body, path, ("temperature_mk", "nbar"))
    has_t = "temperature_mk" in body
    has_n = "nbar" in body
    if has_t == has_n:
        raise ConfigError(path, "specify exactly one of temperature_mk or nbar")
    if has_t:
        t = _number(body["temperature_mk"], f"{path}.temperature_mk")
        if t <= 0:
            raise ConfigError(f"{path}.temperature_mk", "must be positive")
        return ThermalEnvironment(temperature=t * 1e-3)
    nb = body["nbar"]
    if not isinstance(nb, list) or not nb:
        raise ConfigError(f"{path}.nbar", "expected a non-empty list")
    vals = [_number(v, f"{path}.nbar[{i}]", minimum=0.0)
            for i, v in enumerate(nb)]
    return ThermalEnvironment(nbar=tuple(vals))


_SECTION_KEYS = {
    "modes": (),
    "chi": (),
    "coherence": ("chi_file", "mode_index", "n_upper", "t_max_s", "samples"),
    "gate": ("chi_file", "mode_index", "detuning_khz"),
    "scan": ("n_min", "n_max"),
    "null": ("family", "bracket", "mode_label"),
    "sensitivity": ("field_v_per_m", "mode"),
}


def _parse_sections(raw: dict) -> dict:
    out = {}
    for name in COMMAND_SECTIONS:
        if name not in raw:
            continue
        body = _require_mapping(raw[name], name)
        _check_keys(body, name, _SECTION_KEYS[name])
        out[name] = body
    return out


def validate_config(raw: dict) -> RunConfig:
    _require_mapping(raw, "<document>")
    _check_keys(raw, "<document>", TOP_LEVEL_KEYS)
    if "version" not in raw:
        raise ConfigError("version", "required")
    if raw["version"] != CONFIG_VERSION:
        raise ConfigError("version", f"unsupported version {raw['version']!r}; "
                          f"expected {CONFIG_VERSION}")
    for key in ("species", "chain", "potential"):
        if key not in raw:
            raise ConfigError(key, "required")
    table = _parse_species(raw["species"], "species")
    if not isinstance(raw["chain"], list) or not raw["chain"]:
        raise ConfigError("chain", "expected a non-empty list of species labels")
    chain = tuple(_lookup(table, lbl, f"chain[{i}]")
                  for i, lbl in enumerate(raw["chain"]))
    axial = _parse_potential(raw["potential"], "potential", table)
    trap3d = None
    if "trap3d" in raw:
        trap3d = _parse_trap3d(raw["trap3d"], "trap3d", table, axial)
    env = None
    if "environment" in raw:
        env = _parse_environment(raw["environment"], "environment")
    return RunConfig(species=table, chain=chain, axial=axial, trap3d=trap3d,
                     environment=env, sections=_parse_sections(raw))


def parse_family(body, path, base: AxialPotential) -> PotentialFamily:
    fam = _require_mapping(body, path)
    _check_keys(fam, path, ("kappa", "field"))
    actions = {}
    for n_text, slope in _require_mapping(fam.get("kappa", {}),
                                          f"{path}.kappa").items():
        p = f"{path}.kappa.{n_text}"
        actions[_order_key(n_text, p)] = _number(slope, p)
    field_action = _number(fam.get("field", 0.0), f"{path}.field")
    if not actions and field_action == 0.0:
        raise ConfigError(path, "family must act on at least one coefficient")
    return PotentialFamily(base=base, kappa_actions=actions,
                           field_action=field_action)


def parse_mode_label(text, path) -> str:
    if text not in (IN_PHASE, OUT_OF_PHASE):
        raise ConfigError(path, f"expected '{IN_PHASE}' or '{OUT_OF_PHASE}'")
    return text
