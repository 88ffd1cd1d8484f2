"""Scene files: a contraction system plus condensation geometry, as JSON.

A scene bundles everything one computation needs: the maps, the ambient
bounding box, an optional condensation set, separation flags, and whatever
reference values the author chose to record under ``expected``. A handful
of scenes ship inside the package; see docs/scene-format.md for the schema.
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from importlib import resources
from pathlib import Path
from typing import Any, Mapping

import numpy as np

from .condensation import (
    AxisBox,
    BitmapCloud,
    CondensationSet,
    Disk,
    FinitePoints,
    Segment,
    bounds_of,
)
from .errors import SceneError
from .maps import AbstractLipschitz, Affine, ContractionMap, IFSystem, Similarity

# slack for "stays inside the bounding box" checks
GEOMETRY_TOL = 1e-9


@dataclass(frozen=True)
class Scene:
    """A named system ready for dimension and measure computations."""

    name: str
    ifs: IFSystem
    box: AxisBox
    condensation: CondensationSet | None
    expected: Mapping[str, Any]
    warnings: tuple[str, ...]
    source: str


# -- field access with path-aware diagnostics -------------------------------


def _field(data: Mapping, key: str, path: str, required: bool = True,
           default: Any = None) -> Any:
    if not isinstance(data, Mapping):
        raise SceneError(f"{path}: expected an object")
    if key not in data:
        if required:
            raise SceneError(f"{path}.{key}: missing required field")
        return default
    return data[key]


def _number(data: Mapping, key: str, path: str, required: bool = True,
            default: float | None = None) -> float | None:
    value = _field(data, key, path, required, default)
    if value is None and not required:
        return default
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise SceneError(f"{path}.{key}: expected a number, got {value!r}")
    return float(value)


def _integer(data: Mapping, key: str, path: str) -> int:
    value = _field(data, key, path)
    if isinstance(value, bool) or not isinstance(value, int):
        raise SceneError(f"{path}.{key}: expected an integer, got {value!r}")
    return value


def _boolean(data: Mapping, key: str, path: str, default: bool = False) -> bool:
    value = _field(data, key, path, required=False, default=default)
    if not isinstance(value, bool):
        raise SceneError(f"{path}.{key}: expected true or false, got {value!r}")
    return value


def _vector(data: Mapping, key: str, path: str, n: int) -> np.ndarray:
    value = _field(data, key, path)
    try:
        arr = np.array(value, dtype=float).reshape(-1)
    except (TypeError, ValueError):
        raise SceneError(f"{path}.{key}: expected a list of {n} numbers") from None
    if arr.shape != (n,):
        raise SceneError(f"{path}.{key}: expected {n} entries, got shape {arr.shape}")
    return arr


def _matrix(data: Mapping, key: str, path: str, n: int) -> np.ndarray:
    value = _field(data, key, path)
    try:
        arr = np.array(value, dtype=float)
    except (TypeError, ValueError):
        raise SceneError(f"{path}.{key}: expected an {n}x{n} matrix") from None
    if arr.shape != (n, n):
        raise SceneError(f"{path}.{key}: expected an {n}x{n} matrix, got shape {arr.shape}")
    return arr


# -- component parsers -------------------------------------------------------


def _parse_map(entry: Any, n: int, path: str) -> ContractionMap:
    kind = _field(entry, "type", path)
    try:
        if kind == "similarity":
            iso = np.eye(n)
            if entry.get("isometry") is not None:
                iso = _matrix(entry, "isometry", path, n)
            return Similarity(
                ratio=_number(entry, "ratio", path),
                isometry=iso,
                translation=_vector(entry, "translation", path, n),
            )
        if kind == "affine":
            return Affine(
                linear=_matrix(entry, "linear", path, n),
                translation=_vector(entry, "translation", path, n),
            )
        if kind == "abstract":
            return AbstractLipschitz(
                lip_plus=_number(entry, "lip_plus", path),
                lip_minus=_number(entry, "lip_minus", path),
            )
    except ValueError as exc:
        raise SceneError(f"{path}: {exc}") from exc
    raise SceneError(f"{path}.type: unknown map type {kind!r}")


def _parse_hausdorff(entry: Mapping, path: str):
    block = _field(entry, "hausdorff", path, required=False)
    if block is None:
        return None
    d = _number(block, "d", f"{path}.hausdorff")
    value = _number(block, "value", f"{path}.hausdorff")
    if d < 0.0 or value < 0.0:
        raise SceneError(f"{path}.hausdorff: d and value must be nonnegative")
    return (d, value)


def _parse_condensation(entry: Any, n: int, path: str) -> CondensationSet:
    kind = _field(entry, "type", path)
    hausdorff = _parse_hausdorff(entry, path)
    try:
        if kind == "points":
            pts = _field(entry, "points", path)
            arr = np.array(pts, dtype=float)
            if arr.ndim == 1 and n == 1:
                arr = arr.reshape(-1, 1)
            if arr.ndim != 2 or arr.shape[1] != n:
                raise SceneError(
                    f"{path}.points: expected a list of {n}-dimensional points")
            return FinitePoints(points=arr, hausdorff=hausdorff)
        if kind == "segment":
            return Segment(
                start=_vector(entry, "start", path, n),
                end=_vector(entry, "end", path, n),
                hausdorff=hausdorff,
            )
        if kind == "axis_box":
            return AxisBox(
                corner=_vector(entry, "corner", path, n),
                widths=_vector(entry, "widths", path, n),
                hausdorff=hausdorff,
            )
        if kind == "disk":
            return Disk(
                center=_vector(entry, "center", path, n),
                radius=_number(entry, "radius", path),
                hausdorff=hausdorff,
            )
        if kind == "bitmap":
            pts = _field(entry, "points", path)
            arr = np.array(pts, dtype=float)
            if arr.ndim == 1 and n == 1:
                arr = arr.reshape(-1, 1)
            if arr.ndim != 2 or arr.shape[1] != n:
                raise SceneError(
                    f"{path}.points: expected a list of {n}-dimensional points")
            return BitmapCloud(
                points=arr,
                declared_box_dim=_number(entry, "declared_box_dim", path),
                hausdorff=hausdorff,
            )
    except SceneError:
        raise
    except Exception as exc:
        raise SceneError(f"{path}: {exc}") from exc
    raise SceneError(f"{path}.type: unknown condensation type {kind!r}")


# -- geometric sanity ---------------------------------------------------------


def _image_bounds(m, box: AxisBox) -> tuple[np.ndarray, np.ndarray]:
    # interval image of the box under x -> Ax + t
    half = box.widths / 2.0
    center = box.corner + half
    image_center = m.linear @ center + m.translation
    image_half = np.abs(m.linear) @ half
    return image_center - image_half, image_center + image_half


def _overlaps(lo_a, hi_a, lo_b, hi_b) -> bool:
    lo = np.maximum(lo_a, lo_b)
    hi = np.minimum(hi_a, hi_b)
    return bool(np.all(hi - lo > GEOMETRY_TOL))


def _geometry_checks(ifs: IFSystem, box: AxisBox,
                     cond: CondensationSet | None) -> tuple[str, ...]:
    if cond is not None:
        if cond.ambient_dim != box.ambient_dim:
            raise SceneError("condensation: ambient dimension does not match box")
        lo, hi = bounds_of(cond)
        inside = np.all(lo >= box.corner - GEOMETRY_TOL) and \
            np.all(hi <= box.upper + GEOMETRY_TOL)
        if not inside:
            raise SceneError("condensation: set leaves the bounding box")
    if not ifs.has_point_action:
        return ()
    images = [_image_bounds(m, box) for m in ifs.maps]
    for i, (lo, hi) in enumerate(images):
        inside = np.all(lo >= box.corner - GEOMETRY_TOL) and \
            np.all(hi <= box.upper + GEOMETRY_TOL)
        if not inside:
            raise SceneError(
                f"maps[{i}]: image of the bounding box leaves the bounding box")
    notes = []
    for i in range(len(images)):
        for j in range(i + 1, len(images)):
            if _overlaps(*images[i], *images[j]):
                notes.append(
                    f"images of maps {i} and {j} overlap;"
                    " separation flags are taken on trust")
    if cond is not None:
        c_lo, c_hi = bounds_of(cond)
        for i, (lo, hi) in enumerate(images):
            if _overlaps(lo, hi, c_lo, c_hi):
                notes.append(
                    f"image of map {i} meets the condensation bounds;"
                    " separation flags are taken on trust")
    return tuple(notes)


# -- entry points -------------------------------------------------------------


def scene_from_dict(data: Mapping[str, Any], source: str = "<dict>") -> Scene:
    """Build and validate a Scene from parsed JSON data.

    Raises SceneError with a dotted field path on any malformed or
    geometrically inconsistent input.
    """
    name = _field(data, "name", "scene")
    if not isinstance(name, str) or not name:
        raise SceneError("scene.name: expected a nonempty string")
    n = _integer(data, "ambient_dim", "scene")
    if n < 1:
        raise SceneError(f"scene.ambient_dim: must be a positive integer, got {n}")

    box_data = _field(data, "bounding_box", "scene")
    try:
        box = AxisBox(
            corner=_vector(box_data, "corner", "scene.bounding_box", n),
            widths=_vector(box_data, "widths", "scene.bounding_box", n),
        )
    except SceneError:
        raise
    except Exception as exc:
        raise SceneError(f"scene.bounding_box: {exc}") from exc

    maps_data = _field(data, "maps", "scene")
    if not isinstance(maps_data, list) or not maps_data:
        raise SceneError("scene.maps: expected a nonempty list")
    maps = tuple(
        _parse_map(entry, n, f"scene.maps[{i}]")
        for i, entry in enumerate(maps_data)
    )

    cond = None
    if data.get("condensation") is not None:
        cond = _parse_condensation(data["condensation"], n, "scene.condensation")

    flags = _field(data, "flags", "scene", required=False, default={})
    sosc = _boolean(flags, "sosc", "scene.flags")
    cosc = _boolean(flags, "cosc", "scene.flags")
    distortion = _number(flags, "bounded_distortion_L", "scene.flags",
                         required=False)

    expected = _field(data, "expected", "scene", required=False, default={})
    if not isinstance(expected, Mapping):
        raise SceneError("scene.expected: expected an object")

    try:
        ifs = IFSystem(
            maps=maps,
            ambient_dim=n,
            asserted_sosc=sosc,
            asserted_cosc=cosc,
            bounded_distortion_L=distortion,
        )
    except ValueError as exc:
        raise SceneError(f"scene.maps: {exc}") from exc

    warnings = _geometry_checks(ifs, box, cond)
    return Scene(
        name=name,
        ifs=ifs,
        box=box,
        condensation=cond,
        expected=dict(expected),
        warnings=warnings,
        source=source,
    )


def bundled_scene_names() -> list[str]:
    root = resources.files("iak.scenes")
    return sorted(
        entry.name[:-5]
        for entry in root.iterdir()
        if entry.name.endswith(".json")
    )


def load_bundled_scene(name: str) -> Scene:
    entry = resources.files("iak.scenes") / f"{name}.json"
    if not entry.is_file():
        known = ", ".join(bundled_scene_names())
        raise SceneError(f"no bundled scene named {name!r} (bundled: {known})")
    data = json.loads(entry.read_text(encoding="utf-8"))
    return scene_from_dict(data, source=f"bundled:{name}")


def load_scene(spec: str | Path) -> Scene:
    """Load a scene from a JSON file path or a bundled scene name."""
    path = Path(spec)
    if path.is_file():
        try:
            data = json.loads(path.read_text(encoding="utf-8"))
        except json.JSONDecodeError as exc:
            raise SceneError(f"{path}: invalid JSON ({exc})") from exc
        if not isinstance(data, dict):
            raise SceneError(f"{path}: top level must be an object")
        return scene_from_dict(data, source=str(path))
    if isinstance(spec, str) and "/" not in spec and not spec.endswith(".json"):
        return load_bundled_scene(spec)
    raise SceneError(f"scene file not found: {spec}")
