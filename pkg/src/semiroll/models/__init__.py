"""Model registry: bundled geometries plus declarative JSON descriptions.

Every model is constructed through one path: a JSON-serializable
*description* (algebra basis, splitting, form signatures, submersion
differential, base point) paired with a named *embedding bundle* that
supplies the non-serializable callables (ambient representation, chart
action, embedding, pointwise frames).  Bundled descriptions live next to
this file under ``data/``; ``get_model`` also recognizes parameterized
family names and filesystem paths.
"""

from __future__ import annotations

import json
import re
from pathlib import Path

import numpy as np

from ..homogeneous import CartanModel
from ..linalg import SignatureForm
from . import hyperbolic, pseudo_orthogonal, sphere, stiefel
from .hyperbolic import hyperbolic_lift, make_hyperbolic_model, roll_hyperboloid
from .pseudo_orthogonal import make_pseudo_orthogonal_model, roll_pseudo_orthogonal
from .sphere import make_sphere_model, roll_sphere, sphere_lift
from .stiefel import make_stiefel_model, roll_stiefel

__all__ = [
    "build_model",
    "load_model_file",
    "get_model",
    "available_models",
    "make_hyperbolic_model",
    "make_sphere_model",
    "make_pseudo_orthogonal_model",
    "make_stiefel_model",
    "roll_hyperboloid",
    "roll_sphere",
    "roll_pseudo_orthogonal",
    "roll_stiefel",
    "hyperbolic_lift",
    "sphere_lift",
]

DATA_DIR = Path(__file__).resolve().parent / "data"

EMBEDDING_BUNDLES = {
    "hyperboloid12": hyperbolic.bundle,
    "riemann_sphere": sphere.bundle,
    "pseudo_orth": pseudo_orthogonal.bundle,
    "stiefel": stiefel.bundle,
}

_FAMILY_PATTERNS = [
    (re.compile(r"^so_plus_(\d+)_(\d+)$"),
     lambda m: pseudo_orthogonal.description(int(m.group(1)), int(m.group(2)))),
    (re.compile(r"^stiefel_(\d+)_(\d+)$"),
     lambda m: stiefel.description(int(m.group(1)), int(m.group(2)))),
]

_FIXED_DESCRIPTIONS = {
    "hyperboloid": hyperbolic.description,
    "sphere": sphere.description,
}


def _decode_basis(desc):
    raw = np.asarray(desc["basis"], dtype=float)
    if desc.get("dtype", "real") == "complex":
        if raw.ndim != 4 or raw.shape[-1] != 2:
            raise ValueError("complex basis must store [re, im] entry pairs")
        return raw[..., 0] + 1j * raw[..., 1]
    return raw


def build_model(desc, validate=False, rng=None):
    """Instantiate a CartanModel from a description dictionary."""
    version = desc.get("format_version")
    if version != 1:
        raise ValueError(f"unsupported model format_version: {version!r}")
    embedding = desc.get("embedding", "")
    if not embedding.startswith("builtin:"):
        raise ValueError(f"unknown embedding scheme: {embedding!r}")
    key = embedding.split(":", 1)[1]
    if key not in EMBEDDING_BUNDLES:
        raise ValueError(f"unknown embedding bundle: {key!r}")
    parts = EMBEDDING_BUNDLES[key](desc)

    model = CartanModel(
        name=desc["name"],
        basis=_decode_basis(desc),
        h_indices=desc["h_indices"],
        p_indices=desc["p_indices"],
        form=SignatureForm(desc["J_signs"]),
        group_form=SignatureForm(desc["group_signs"]),
        base_point=parts["base_point"],
        obar=parts["obar"],
        d_e_pi=np.asarray(desc["d_e_pi"], dtype=float),
        rho=parts["rho"],
        d_e_rho=parts["d_e_rho"],
        action=parts["action"],
        embed=parts["embed"],
        random_group_element=parts.get("random_group_element"),
        random_point=parts.get("random_point"),
        tangent_frame_at=parts.get("tangent_frame_at"),
        normal_frame_at=parts.get("normal_frame_at"),
        closed_form_normal=parts.get("closed_form_normal", False),
        symmetric_space=parts.get("symmetric_space", True),
        extrinsic_override=parts.get("extrinsic_override"),
        tangential_correction=parts.get("tangential_correction"),
        params=desc.get("params"),
        description=desc,
    )
    if validate:
        model.validate(rng=rng)
    return model


def load_model_file(path, validate=False):
    with open(path) as fh:
        desc = json.load(fh)
    return build_model(desc, validate=validate)


def _description_for(name):
    if name in _FIXED_DESCRIPTIONS:
        return _FIXED_DESCRIPTIONS[name]()
    for pattern, builder in _FAMILY_PATTERNS:
        m = pattern.match(name)
        if m:
            return builder(m)
    return None


_CACHE = {}


def get_model(name, validate=False):
    """Look up a model by name, family pattern, or description-file path."""
    if name in _CACHE:
        return _CACHE[name]
    desc = _description_for(name)
    bundled = DATA_DIR / f"{name}.json"
    if desc is not None:
        model = build_model(desc, validate=validate)
    elif bundled.is_file():
        model = load_model_file(bundled, validate=validate)
    elif Path(name).is_file():
        model = load_model_file(name, validate=validate)
    else:
        raise KeyError(
            f"unknown model {name!r}; try one of {sorted(available_models())} "
            "or a description-file path"
        )
    _CACHE[name] = model
    return model


def available_models():
    """Names resolvable without a file path, bundled families at sample sizes."""
    names = set(_FIXED_DESCRIPTIONS)
    for f in sorted(DATA_DIR.glob("*.json")):
        names.add(f.stem)
    names.update({"so_plus_1_2", "stiefel_3_1", "stiefel_4_2"})
    return sorted(names)
