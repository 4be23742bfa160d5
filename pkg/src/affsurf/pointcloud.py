"""Flat plane samples with provenance, and their text interchange format."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Mapping, Optional, Union

import numpy as np

_MAGIC = "# affsurf points 1"


@dataclass(frozen=True)
class PointCloud:
    """A finite plane sample that remembers how it was produced.

    source says which set was sampled, density is the curve sampling rate
    in points per unit length, and truncation carries whatever cutoffs
    shaped the sample (spiral winding, strip depth). The metadata travels
    with the points so later distance comparisons can be judged fairly.
    """

    points: np.ndarray
    source: str
    density: float
    k: Optional[float] = None
    truncation: Mapping[str, float] = field(default_factory=dict)

    def __post_init__(self) -> None:
        pts = np.asarray(self.points, dtype=complex).ravel()
        if pts.size == 0:
            raise ValueError("a point cloud cannot be empty")
        if not np.all(np.isfinite(pts)):
            raise ValueError("point clouds must be finite")
        if not (self.density > 0 and math.isfinite(self.density)):
            raise ValueError(f"sampling density must be positive, got {self.density}")
        if "\n" in self.source or not self.source.strip():
            raise ValueError("source must be a non-empty single line")
        object.__setattr__(self, "points", pts)
        object.__setattr__(self, "truncation", dict(self.truncation))

    def __len__(self) -> int:
        return int(self.points.size)


def write_points(path: Union[str, Path], cloud: PointCloud) -> None:
    """One "x y" pair per line under a '#' header.

    Coordinates are written with 17 significant digits, enough for an
    exact float64 round trip.
    """
    lines = [_MAGIC, f"# source: {cloud.source}"]
    if cloud.k is not None:
        lines.append(f"# k: {float(cloud.k)!r}")
    lines.append(f"# density: {float(cloud.density)!r}")
    for key in sorted(cloud.truncation):
        lines.append(f"# truncation.{key}: {float(cloud.truncation[key])!r}")
    lines.append(f"# count: {len(cloud)}")
    lines.extend("%.17g %.17g" % (z.real, z.imag) for z in cloud.points)
    Path(path).write_text("\n".join(lines) + "\n")


def read_points(path: Union[str, Path]) -> PointCloud:
    path = Path(path)
    lines = path.read_text().splitlines()
    if not lines or lines[0] != _MAGIC:
        raise ValueError(f"{path}: not a point file (bad or missing first line)")
    meta: dict = {}
    trunc: dict = {}
    body = []
    for ln in lines[1:]:
        if ln.startswith("#"):
            key, sep, value = ln[1:].partition(":")
            if not sep:
                raise ValueError(f"{path}: malformed header line {ln!r}")
            key, value = key.strip(), value.strip()
            if key.startswith("truncation."):
                trunc[key[len("truncation."):]] = float(value)
            else:
                meta[key] = value
        elif ln.strip():
            x, y = ln.split()
            body.append(complex(float(x), float(y)))
    for required in ("source", "density"):
        if required not in meta:
            raise ValueError(f"{path}: header lacks {required}")
    cloud = PointCloud(
        np.array(body, dtype=complex),
        meta["source"],
        float(meta["density"]),
        k=float(meta["k"]) if "k" in meta else None,
        truncation=trunc,
    )
    if "count" in meta and int(meta["count"]) != len(cloud):
        raise ValueError(f"{path}: count says {meta['count']}, found {len(cloud)}")
    return cloud
