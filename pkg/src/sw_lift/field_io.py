"""Binary dump format for torus fields and sector spinors.

Layout (all little-endian):

* 16-byte header: the 12 ASCII bytes ``SWLIFT-FIELD`` and a ``uint32`` version.
* Four ``uint32`` grid dimensions.
* One kind byte (see ``KIND_CODES``).
* Kind extras: a value-class byte for two-forms; for sector spinors an ``int32``
  holding ``2q`` and an origin byte (the chirality code it was lifted from).
* Samples as ``float64`` pairs (real, imaginary) in lexicographic site order,
  component index fastest. Gauge fields store ``a_μ`` as the real parts and
  append their four holonomies as a final site-less block.
"""

from __future__ import annotations

import logging
import struct
from pathlib import Path
from typing import Union

import numpy as np

from .kaluza_klein.sector import SectorSpinor
from .torus_fields import (
    SPINOR_ARITY,
    Charge,
    GaugeField,
    Grid4,
    SpinorChirality,
    SpinorField,
    TwoFormField,
)

LOGGER = logging.getLogger(__name__)

MAGIC = b"SWLIFT-FIELD"
VERSION = 2
KIND_CODES: dict[str, int] = {
    "plus": 1,
    "minus": 2,
    "full": 3,
    "gauge": 4,
    "twoform": 5,
    "sector": 6,
}
VALUE_CLASS_CODES: dict[str, int] = {"real": 0, "imaginary": 1, "complex": 2}
_CHIRALITY_CODES: dict[int, SpinorChirality] = {1: "plus", 2: "minus", 3: "full"}

DumpableField = Union[SpinorField, GaugeField, TwoFormField, SectorSpinor]

_HEADER = struct.Struct("<12sI")
_DIMS = struct.Struct("<4I")
_SAMPLE_DTYPE = np.dtype("<c16")


def _encode(field: DumpableField) -> tuple[int, bytes, np.ndarray]:
    if isinstance(field, SectorSpinor):
        extras = struct.pack("<iB", field.charge.doubled, KIND_CODES[field.origin])
        return KIND_CODES["sector"], extras, field.base.values
    if isinstance(field, SpinorField):
        return KIND_CODES[field.chirality], b"", field.values
    if isinstance(field, TwoFormField):
        code = VALUE_CLASS_CODES.get(field.value_class, VALUE_CLASS_CODES["complex"])
        return KIND_CODES["twoform"], struct.pack("<B", code), field.values
    if isinstance(field, GaugeField):
        samples = np.moveaxis(field.components, 0, -1).astype(np.complex128)
        return KIND_CODES["gauge"], b"", samples
    raise TypeError(f"cannot dump object of type {type(field).__name__}")


def write_field(path: Path, field: DumpableField) -> Path:
    kind, extras, samples = _encode(field)
    grid = field.base.grid if isinstance(field, SectorSpinor) else field.grid
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("wb") as handle:
        handle.write(_HEADER.pack(MAGIC, VERSION))
        handle.write(_DIMS.pack(*grid.shape))
        handle.write(struct.pack("<B", kind))
        handle.write(extras)
        handle.write(np.ascontiguousarray(samples, dtype=_SAMPLE_DTYPE).tobytes())
        if isinstance(field, GaugeField):
            handle.write(field.holonomy.astype(_SAMPLE_DTYPE).tobytes())
    LOGGER.debug("Wrote field dump %s (kind %d)", path, kind)
    return path


def read_field(path: Path) -> DumpableField:
    payload = path.read_bytes()
    magic, version = _HEADER.unpack_from(payload, 0)
    if magic != MAGIC:
        raise ValueError(f"{path} is not a field dump (bad magic {magic!r})")
    if version != VERSION:
        raise ValueError(f"unsupported field dump version {version} in {path}")
    offset = _HEADER.size
    dims = _DIMS.unpack_from(payload, offset)
    offset += _DIMS.size
    if len(set(dims)) != 1:
        raise ValueError(f"field dumps must be on a cubic grid, got dims {dims}")
    grid = Grid4(dims[0])
    (kind,) = struct.unpack_from("<B", payload, offset)
    offset += 1

    def samples(components: int) -> np.ndarray:
        count = grid.site_count * components
        data = np.frombuffer(payload, dtype=_SAMPLE_DTYPE, count=count, offset=offset)
        return data.reshape(grid.shape + (components,)).astype(np.complex128)

    if kind in (KIND_CODES["plus"], KIND_CODES["minus"], KIND_CODES["full"]):
        chirality = _CHIRALITY_CODES[kind]
        return SpinorField(grid, chirality, samples(SPINOR_ARITY[chirality]))
    if kind == KIND_CODES["twoform"]:
        (code,) = struct.unpack_from("<B", payload, offset)
        offset += 1
        value_class = {value: name for name, value in VALUE_CLASS_CODES.items()}[code]
        return TwoFormField(grid, samples(6), value_class)
    if kind == KIND_CODES["sector"]:
        doubled, origin_code = struct.unpack_from("<iB", payload, offset)
        offset += 5
        if origin_code not in _CHIRALITY_CODES:
            raise ValueError(f"unknown sector origin code {origin_code} in {path}")
        base = SpinorField(grid, "full", samples(4))
        return SectorSpinor(base, Charge(doubled), _CHIRALITY_CODES[origin_code])
    if kind == KIND_CODES["gauge"]:
        components = samples(4)
        offset += components.nbytes
        holonomy = np.frombuffer(payload, dtype=_SAMPLE_DTYPE, count=4, offset=offset)
        return GaugeField(grid, np.moveaxis(components.real, -1, 0), holonomy.real)
    raise ValueError(f"unknown field kind code {kind} in {path}")


__all__ = ["KIND_CODES", "MAGIC", "VERSION", "read_field", "write_field"]
