"""Declarative run-spec documents (YAML or JSON) and the bundled presets.

Schema, version 1::

    version: 1                 # optional
    label: fig2a               # optional
    model:                     # required
      kind: goe                # goe | csyk
      dims: [10, 10]           # goe: required
      couplings: [0.1]         # goe: epsilon_1, epsilon_2, ...
      orders: null             # goe: interaction orders kept (default: all with a coupling)
      sigma: 1.0
      shared: false            # goe: one matrix per subsystem for every order
      include_local: true
      convention: element      # element | density
      n_per_side: 10           # csyk: required (2N = 2 * n_per_side Majoranas)
      J: 1.0
      K: 1.0
      mu: 0.0
    beta: 0.0
    observable: total          # see chaosprobe.runner.parse_observable
    grid: {t_min: 0.01, t_max: 10000, points: 400, log: true}
    realizations: 500
    seed: 0
    sweeps:                    # optional, Cartesian product, first varies slowest
      - {parameter: epsilon1, values: [0.1, 1, 5, 10]}
"""
from __future__ import annotations

import json
import os
from importlib import resources

import yaml

from .runner import CsykModel, GoeModel, RunSpec, SpecError, Sweep, TimeGrid

SCHEMA_VERSION = 1
TOP_KEYS = {"version", "label", "model", "beta", "observable", "grid", "realizations", "seed", "sweeps"}
GOE_KEYS = {"kind", "dims", "couplings", "orders", "sigma", "shared", "include_local", "convention"}
CSYK_KEYS = {"kind", "n_per_side", "J", "K", "mu"}
GRID_KEYS = {"t_min", "t_max", "points", "log"}
SWEEP_KEYS = {"parameter", "values"}


def _check_keys(block: dict, allowed: set, where: str, required: set = frozenset()):
    if not isinstance(block, dict):
        raise SpecError(f"{where} must be a mapping, got {type(block).__name__}")
    unknown = sorted(set(block) - allowed)
    if unknown:
        raise SpecError(f"unknown keys in {where}: {', '.join(map(str, unknown))}")
    missing = sorted(required - set(block))
    if missing:
        raise SpecError(f"missing required keys in {where}: {', '.join(missing)}")


def preset_names() -> list[str]:
    files = resources.files("chaosprobe").joinpath("presets").iterdir()
    return sorted(f.name[:-5] for f in files if f.name.endswith(".yaml"))


def preset_text(name: str) -> str:
    path = resources.files("chaosprobe").joinpath("presets").joinpath(f"{name}.yaml")
    if not path.is_file():
        raise SpecError(f"unknown preset {name!r}; available: {', '.join(preset_names())}")
    return path.read_text()


def _load_text(source: str) -> str:
    """Resolve a preset name, a file path or inline text."""
    if "\n" not in source and source.strip() in preset_names():
        return preset_text(source.strip())
    if "\n" not in source and os.path.isfile(source):
        with open(source) as fh:
            return fh.read()
    return source


def document_from_text(text: str) -> dict:
    try:
        doc = yaml.safe_load(text)  # JSON is a subset of YAML
    except yaml.YAMLError as exc:
        raise SpecError(f"cannot parse run spec: {exc}") from None
    if doc is None:
        raise SpecError("empty run spec: a model block is required")
    if not isinstance(doc, dict):
        raise SpecError("run spec must be a mapping at the top level")
    return doc


def runspec_from_document(doc: dict) -> RunSpec:
    _check_keys(doc, TOP_KEYS, "run spec", {"model"})
    if doc.get("version", SCHEMA_VERSION) != SCHEMA_VERSION:
        raise SpecError(f"unsupported run-spec version {doc['version']!r}")
    m = doc["model"]
    _check_keys(m, GOE_KEYS | CSYK_KEYS, "model", {"kind"})
    kind = m["kind"]
    try:
        if kind == "goe":
            _check_keys(m, GOE_KEYS, "goe model", {"dims"})
            args = {k: v for k, v in m.items() if k != "kind"}
            if args.get("orders") is not None:
                args["orders"] = tuple(args["orders"])
            args["dims"] = tuple(args["dims"])
            args["couplings"] = tuple(args.get("couplings", ()))
            model = GoeModel(**args)
        elif kind == "csyk":
            _check_keys(m, CSYK_KEYS, "csyk model", {"n_per_side"})
            model = CsykModel(**{k: v for k, v in m.items() if k != "kind"})
        else:
            raise SpecError(f"unknown model kind {kind!r}; expected goe or csyk")
        grid = doc.get("grid", {}) or {}
        _check_keys(grid, GRID_KEYS, "grid")
        grid = {k: (float(v) if k in ("t_min", "t_max") else v) for k, v in grid.items()}
        sweeps = []
        for i, sw in enumerate(doc.get("sweeps", []) or []):
            _check_keys(sw, SWEEP_KEYS, f"sweeps[{i}]", SWEEP_KEYS)
            sweeps.append(Sweep(str(sw["parameter"]), tuple(sw["values"])))
        return RunSpec(
            model=model,
            beta=float(doc.get("beta", 0.0)),
            observable=str(doc.get("observable", "total")),
            grid=TimeGrid(**grid),
            realizations=doc.get("realizations", 500),
            master_seed=int(doc.get("seed", 0)),
            sweeps=tuple(sweeps),
            label=str(doc.get("label", "")),
        )
    except (TypeError, ValueError) as exc:
        if isinstance(exc, SpecError):
            raise
        raise SpecError(f"invalid run spec: {exc}") from None


def parse_runspec(source: str) -> RunSpec:
    """Parse a preset name, a path to a YAML/JSON file, or inline document text."""
    return runspec_from_document(document_from_text(_load_text(source)))


def runspec_to_document(spec: RunSpec) -> dict:
    """Echo-back with every default made explicit; re-parses to an equal spec."""
    m = spec.model
    if isinstance(m, GoeModel):
        model = {"kind": "goe", "dims": list(m.dims), "couplings": list(m.couplings),
                 "orders": None if m.orders is None else list(m.orders), "sigma": m.sigma,
                 "shared": m.shared, "include_local": m.include_local, "convention": m.convention}
    else:
        model = {"kind": "csyk", "n_per_side": m.n_per_side, "J": m.J, "K": m.K, "mu": m.mu}
    g = spec.grid
    return {
        "version": SCHEMA_VERSION,
        "label": spec.label,
        "model": model,
        "beta": spec.beta,
        "observable": spec.observable,
        "grid": {"t_min": g.t_min, "t_max": g.t_max, "points": int(g.points), "log": g.log},
        "realizations": int(spec.realizations),
        "seed": int(spec.master_seed),
        "sweeps": [{"parameter": s.parameter, "values": list(s.values)} for s in spec.sweeps],
    }


def dump_runspec(spec: RunSpec, fmt: str = "yaml") -> str:
    doc = runspec_to_document(spec)
    if fmt == "json":
        return json.dumps(doc, indent=2)
    return yaml.safe_dump(doc, sort_keys=False)
