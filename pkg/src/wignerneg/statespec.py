"""Textual state specs and JSON round-tripping of states.

Spec grammar::

    fock:<n>
    mix:fock:<n>@<w>,fock:<m>@<v>,...
    superpos:<n1>:<re1>[+i<im1>],<n2>:<re2>[-i<im2>],...

Mixture weights and superposition amplitudes are normalized on parse.
"""
from __future__ import annotations

import json
import re

import numpy as np

from .fock import DensityMatrix, FockState

__all__ = ["parse_state", "state_to_json", "state_from_json", "as_density"]

_AMP = re.compile(r"^\s*([+-]?[0-9.eE+-]*?[0-9.])?\s*(?:([+-])\s*i\s*([0-9.eE+-]+))?\s*$")


def _parse_amplitude(text: str) -> complex:
    m = _AMP.match(text)
    if not m or (m.group(1) is None and m.group(2) is None):
        raise ValueError(f"bad amplitude {text!r}")
    re_part = float(m.group(1)) if m.group(1) else 0.0
    im_part = 0.0
    if m.group(2):
        im_part = float(m.group(3)) * (1 if m.group(2) == "+" else -1)
    return complex(re_part, im_part)


def _level(text: str) -> int:
    n = int(text)
    if n < 0:
        raise ValueError(f"negative Fock level {n}")
    return n


def parse_state(spec: str) -> FockState | DensityMatrix:
    spec = spec.strip()
    try:
        if spec.startswith("fock:"):
            return FockState.basis(_level(spec[5:]))
        if spec.startswith("mix:"):
            levels, weights = [], []
            for item in spec[4:].split(","):
                head, _, w = item.partition("@")
                if not head.startswith("fock:") or not w:
                    raise ValueError(f"bad mixture term {item!r}")
                levels.append(_level(head[5:]))
                weights.append(float(w))
            return DensityMatrix.mixture(levels, weights)
        if spec.startswith("superpos:"):
            levels, amps = [], []
            for item in spec[9:].split(","):
                n, _, amp = item.partition(":")
                if not amp:
                    raise ValueError(f"bad superposition term {item!r}")
                levels.append(_level(n))
                amps.append(_parse_amplitude(amp))
            return FockState.from_levels(levels, amps)
    except ValueError as exc:
        raise ValueError(f"invalid state spec {spec!r}: {exc}") from None
    raise ValueError(f"invalid state spec {spec!r}: expected fock:, mix: or superpos:")


def as_density(state) -> DensityMatrix:
    return state.density() if isinstance(state, FockState) else state


def _pairs(arr) -> list:
    return [[float(z.real), float(z.imag)] for z in np.asarray(arr).ravel()]


def state_to_json(state) -> dict:
    if isinstance(state, FockState):
        return {"kind": "pure", "amplitudes": _pairs(state.amplitudes)}
    return {"kind": "density", "entries": [_pairs(row) for row in state.entries]}


def state_from_json(data) -> FockState | DensityMatrix:
    if isinstance(data, str):
        data = json.loads(data)
    if data["kind"] == "pure":
        return FockState.raw([complex(re, im) for re, im in data["amplitudes"]])
    rows = [[complex(re, im) for re, im in row] for row in data["entries"]]
    return DensityMatrix(np.array(rows), check=False)
