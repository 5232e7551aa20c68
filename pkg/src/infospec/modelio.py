"""JSON model description files.

Layout (probabilities are linear-space decimals, matrices row-major)::

    {"type": "channel", "family": "memoryless", "alphabet": [2, 2],
     "matrices": [[[0.89, 0.11], [0.11, 0.89]]]}

    {"type": "source", "family": "memoryless", "alphabet": 2,
     "distributions": [[0.5, 0.5]]}
    {"type": "source", "family": "markov", "alphabet": 2,
     "initial": [0.5, 0.5], "transition": [[0.9, 0.1], [0.2, 0.8]]}

    {"type": "joint", "family": "memoryless", "alphabet": [2, 2],
     "distributions": [[[0.445, 0.055], [0.055, 0.445]]]}
    {"type": "joint", "family": "markov", "alphabet": [2, 2],
     "initial": [[...], [...]], "transition": [[...] x 4] x 4}

    {"type": ..., "family": "mixture", "alphabet": ...,
     "weights": [0.5, 0.5], "components": [{"family": ...}, ...]}

Joint Markov transitions run on pair states ``x * |Y| + y``. Components
inherit ``type`` and ``alphabet`` from the enclosing mixture.
"""
import hashlib
import json
from pathlib import Path

import numpy as np

from .errors import InputError, ModelFormatError
from .models import ChannelModel, JointSourceModel, SourceModel

LOAD_TOL = 1e-9
_CLASSES = {"source": SourceModel, "joint": JointSourceModel, "channel": ChannelModel}


def _normalized(values, axis, where):
    arr = np.array(values, dtype=float)
    if not np.all(np.isfinite(arr)):
        raise ModelFormatError(f"{where}: non-finite probability")
    if arr.size and arr.min() < 0:
        raise ModelFormatError(f"{where}: negative probability {arr.min()}")
    sums = arr.sum(axis=axis, keepdims=True)
    residual = float(np.max(np.abs(sums - 1.0))) if arr.size else 1.0
    if residual >= LOAD_TOL:
        raise ModelFormatError(f"{where}: probabilities sum off by {residual:.3g} (tolerance {LOAD_TOL:g})")
    return arr / sums


def _sizes(alphabet, kind):
    if kind == "source":
        sizes = alphabet if isinstance(alphabet, list) else [alphabet]
        if len(sizes) != 1:
            raise ModelFormatError("source alphabet must be a single size")
    else:
        sizes = alphabet
        if not isinstance(sizes, list) or len(sizes) != 2:
            raise ModelFormatError(f"{kind} alphabet must be [|X|, |Y|]")
    if not all(isinstance(s, int) and s >= 1 for s in sizes):
        raise ModelFormatError(f"alphabet sizes must be positive integers, got {alphabet!r}")
    return sizes


def _shape_check(arr, shape, where):
    if arr.shape != tuple(shape):
        raise ModelFormatError(f"{where}: expected shape {tuple(shape)}, got {arr.shape}")


def _build(doc, kind, alphabet, where):
    if not isinstance(doc, dict):
        raise ModelFormatError(f"{where}: expected an object")
    if doc.get("type", kind) != kind:
        raise ModelFormatError(f"{where}: type {doc.get('type')!r} inside a {kind} model")
    family = doc.get("family")
    alphabet = doc.get("alphabet", alphabet)
    if alphabet is None:
        raise ModelFormatError(f"{where}: missing alphabet")
    sizes = _sizes(alphabet, kind)
    try:
        return _build_family(doc, kind, family, alphabet, sizes, where)
    except KeyError as exc:
        raise ModelFormatError(f"{where}: missing field {exc.args[0]!r}") from None
    except (TypeError, ValueError) as exc:
        if isinstance(exc, ModelFormatError):
            raise
        raise ModelFormatError(f"{where}: {exc}") from None


def _build_family(doc, kind, family, alphabet, sizes, where):
    cls = _CLASSES[kind]
    if family == "mixture":
        comps = doc["components"]
        if not isinstance(comps, list) or not comps:
            raise ModelFormatError(f"{where}: mixture needs a non-empty components list")
        weights = np.array(doc["weights"], dtype=float)
        if weights.ndim != 1 or np.any(weights <= 0):
            raise ModelFormatError(f"{where}: mixture weights must be positive")
        weights = _normalized(weights, None, f"{where}.weights").ravel()
        built = [_build(c, kind, alphabet, f"{where}.components[{k}]") for k, c in enumerate(comps)]
        if any(b.family == "mixture" for b in built):
            raise ModelFormatError(f"{where}: nested mixtures are not supported")
        return cls.mixture(weights, built)
    if family == "memoryless":
        key = "matrices" if kind == "channel" else "distributions"
        arr = np.array(doc[key], dtype=float)
        if kind == "source":
            if arr.ndim != 2:
                raise ModelFormatError(f"{where}.{key}: expected a list of distributions")
            _shape_check(arr, (arr.shape[0], sizes[0]), f"{where}.{key}")
            return cls.memoryless(_normalized(arr, 1, f"{where}.{key}"))
        if arr.ndim != 3 or arr.shape[0] == 0:
            raise ModelFormatError(f"{where}.{key}: expected a list of |X| x |Y| matrices")
        _shape_check(arr, (arr.shape[0], *sizes), f"{where}.{key}")
        axis = 2 if kind == "channel" else (1, 2)
        return cls.memoryless(_normalized(arr, axis, f"{where}.{key}"))
    if family == "markov":
        if kind == "channel":
            raise ModelFormatError(f"{where}: channels do not support the markov family")
        init = np.array(doc["initial"], dtype=float)
        trans = np.array(doc["transition"], dtype=float)
        states = int(np.prod(sizes))
        _shape_check(init, sizes, f"{where}.initial")
        _shape_check(trans, (states, states), f"{where}.transition")
        return cls.markov(_normalized(init, None, f"{where}.initial").reshape(init.shape),
                          _normalized(trans, 1, f"{where}.transition"))
    raise ModelFormatError(f"{where}: unknown family {family!r}")


def model_from_dict(doc):
    if not isinstance(doc, dict) or doc.get("type") not in _CLASSES:
        raise ModelFormatError("model 'type' must be one of source, joint, channel")
    try:
        return _build(doc, doc["type"], None, "model")
    except InputError as exc:
        if isinstance(exc, ModelFormatError):
            raise
        raise ModelFormatError(str(exc)) from None


def load_model(path):
    """Parse, validate and return the model stored at ``path``."""
    try:
        doc = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise ModelFormatError(f"{path}: invalid JSON ({exc})") from None
    return model_from_dict(doc)


def file_hash(path) -> str:
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()


def _component_dict(model):
    if model.family == "mixture":
        return {"family": "mixture", "weights": model.weights.tolist(),
                "components": [_component_dict(c) for c in model.components]}
    if isinstance(model, ChannelModel):
        return {"family": "memoryless", "matrices": model.matrices.tolist()}
    if model.family == "memoryless":
        return {"family": "memoryless", "distributions": model.distributions.tolist()}
    return {"family": "markov", "initial": model.initial.tolist(), "transition": model.transition.tolist()}


def model_to_dict(model):
    if isinstance(model, SourceModel):
        head = {"type": "source", "alphabet": model.size}
    elif isinstance(model, JointSourceModel):
        head = {"type": "joint", "alphabet": [model.x_size, model.y_size]}
    else:
        head = {"type": "channel", "alphabet": [model.x_size, model.y_size]}
    return {**head, **_component_dict(model)}


def save_model(model, path):
    Path(path).write_text(json.dumps(model_to_dict(model), indent=2) + "\n")
