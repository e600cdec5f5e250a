"""Tunnel cross-sections and whole-tunnel block enumeration.

The tunnel is an infinite prism: a convex polygon in the vertical section
plane swept along a horizontal axis.  Each polygon edge becomes a planar
free face whose inward-to-rock normal points away from the opening.  For
every (facet, block code) pair the sweep classifies the block and, when it
is removable, derives sliding mode, safety factor, and the volume of the
maximal block seeded a short way into the rock.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .mechanics import (
    CLASS_REMOVABLE,
    SlidingMode,
    classify_block,
    joint_pyramid,
    safety_factor,
    sliding_mode,
)
from .orientation import JointPlane
from .volume import block_volume

GRAVITY_DIR = (0.0, 0.0, -1.0)


@dataclass(frozen=True)
class Facet:
    index: int
    inward_normal: np.ndarray  # into the rock, unit
    midpoint: np.ndarray  # 3-D, on the tunnel surface at axis station 0
    angle_deg: float  # position of the midpoint around the section
    edge_length: float
    section_edge: tuple[tuple[float, float], tuple[float, float]]


def _convexity_sign(vertices: Sequence[tuple[float, float]]) -> float:
    n = len(vertices)
    signs = []
    for i in range(n):
        ax, ay = vertices[i]
        bx, by = vertices[(i + 1) % n]
        cx, cy = vertices[(i + 2) % n]
        cross = (bx - ax) * (cy - ay) - (by - ay) * (cx - ax)
        if abs(cross) > 1e-12:
            signs.append(math.copysign(1.0, cross))
    if not signs:
        raise ValueError("section polygon is degenerate")
    if len(set(signs)) != 1:
        raise ValueError("section polygon must be convex")
    return signs[0]


@dataclass(frozen=True)
class TunnelSection:
    """Convex section polygon in (u, w) coordinates plus a horizontal axis.

    u is horizontal within the section plane, w is vertical; for axis trend 0
    (tunnel running north) u points east.
    """

    vertices: tuple[tuple[float, float], ...]
    axis_trend_deg: float = 0.0

    def __post_init__(self) -> None:
        verts = tuple((float(u), float(w)) for u, w in self.vertices)
        if len(verts) < 3:
            raise ValueError("section polygon needs at least 3 vertices")
        if _convexity_sign(verts) < 0:
            verts = tuple(reversed(verts))
            _convexity_sign(verts)
        object.__setattr__(self, "vertices", verts)

    @property
    def axis(self) -> np.ndarray:
        t = math.radians(self.axis_trend_deg)
        return np.array([math.sin(t), math.cos(t), 0.0])

    @property
    def u_hat(self) -> np.ndarray:
        t = math.radians(self.axis_trend_deg)
        return np.array([math.cos(t), -math.sin(t), 0.0])

    @property
    def w_hat(self) -> np.ndarray:
        return np.array([0.0, 0.0, 1.0])

    def to_world(self, u: float, w: float, station: float = 0.0) -> np.ndarray:
        return u * self.u_hat + w * self.w_hat + station * self.axis

    @property
    def centroid(self) -> tuple[float, float]:
        us = [v[0] for v in self.vertices]
        ws = [v[1] for v in self.vertices]
        return (sum(us) / len(us), sum(ws) / len(ws))

    def facets(self) -> list[Facet]:
        cu, cw = self.centroid
        out = []
        n = len(self.vertices)
        for i in range(n):
            a = self.vertices[i]
            b = self.vertices[(i + 1) % n]
            du, dw = b[0] - a[0], b[1] - a[1]
            length = math.hypot(du, dw)
            # CCW polygon: outward (into rock) normal is the edge direction
            # rotated clockwise
            nu, nw = dw / length, -du / length
            mid_u, mid_w = (a[0] + b[0]) / 2.0, (a[1] + b[1]) / 2.0
            angle = math.degrees(math.atan2(mid_w - cw, mid_u - cu)) % 360.0
            e3 = nu * self.u_hat + nw * self.w_hat
            out.append(
                Facet(
                    index=i,
                    inward_normal=e3 / np.linalg.norm(e3),
                    midpoint=self.to_world(mid_u, mid_w),
                    angle_deg=angle,
                    edge_length=length,
                    section_edge=(a, b),
                )
            )
        return out

    def facet_at_angle(self, theta_deg: float) -> tuple[Facet, np.ndarray]:
        """Facet hit by the ray from the section centroid at theta, plus the hit point."""
        cu, cw = self.centroid
        du, dw = math.cos(math.radians(theta_deg)), math.sin(math.radians(theta_deg))
        best = None
        for facet in self.facets():
            (au, aw), (bu, bw) = facet.section_edge
            eu, ew = bu - au, bw - aw
            det = du * (-ew) - dw * (-eu)
            if abs(det) < 1e-12:
                continue
            t = ((au - cu) * (-ew) - (aw - cw) * (-eu)) / det
            s = (du * (aw - cw) - dw * (au - cu)) / det
            if t > 1e-9 and -1e-9 <= s <= 1.0 + 1e-9:
                if best is None or t < best[0]:
                    best = (t, facet, self.to_world(cu + t * du, cw + t * dw))
        if best is None:
            raise ValueError(f"no facet found at angle {theta_deg}")
        return best[1], best[2]

    def section_bbox(
        self, margin: Optional[float] = None, axis_extent: Optional[float] = None
    ) -> tuple[np.ndarray, np.ndarray]:
        """Axis-aligned world box around the section, padded into the rock."""
        us = [v[0] for v in self.vertices]
        ws = [v[1] for v in self.vertices]
        extent = max(max(us) - min(us), max(ws) - min(ws))
        if margin is None:
            margin = extent
        if axis_extent is None:
            axis_extent = 1.5 * extent
        corners = []
        for u in (min(us) - margin, max(us) + margin):
            for w in (min(ws) - margin, max(ws) + margin):
                for s in (-axis_extent, axis_extent):
                    corners.append(self.to_world(u, w, s))
        corners = np.array(corners)
        return corners.min(axis=0), corners.max(axis=0)


@dataclass
class BlockRecord:
    """Outcome of one (facet, code) analysis during the tunnel sweep."""

    facet_index: int
    facet_angle_deg: float
    code: str
    classification: Optional[str] = None
    mode: Optional[SlidingMode] = None
    safety_factor: Optional[float] = None
    volume_m3: Optional[float] = None
    boundary_pyramid: bool = False
    error: Optional[str] = None

    @property
    def mode_label(self) -> str:
        return self.mode.label() if self.mode is not None else ""


def all_codes(n_joints: int) -> list[str]:
    """All 2^n block codes in lexicographic order (L before U)."""
    return ["".join(c) for c in itertools.product("LU", repeat=n_joints)]


def enumerate_tunnel_blocks(
    joints: Sequence[JointPlane],
    tunnel: TunnelSection,
    resultant: Sequence[float] = GRAVITY_DIR,
    seed_offset: Optional[float] = None,
    bbox: Optional[tuple[np.ndarray, np.ndarray]] = None,
) -> list[BlockRecord]:
    """Classify every (facet, code) pair; facet-major, codes lexicographic.

    Removable blocks get mode, safety factor, and the volume of the block
    whose joints all pass through a seed point offset into the rock from the
    facet midpoint (a quarter of the edge length unless overridden).
    Numerical failures are recorded on the affected record and never abort
    the sweep.
    """
    if len(joints) > 8:
        raise ValueError("tunnel sweep supports at most 8 joints (2^n codes)")
    records: list[BlockRecord] = []
    box = bbox if bbox is not None else tunnel.section_bbox()
    frictions = [j.friction_deg for j in joints]
    for facet in tunnel.facets():
        offset = seed_offset if seed_offset is not None else 0.25 * facet.edge_length
        seed_point = facet.midpoint + offset * facet.inward_normal
        for code in all_codes(len(joints)):
            rec = BlockRecord(
                facet_index=facet.index, facet_angle_deg=facet.angle_deg, code=code
            )
            records.append(rec)
            try:
                cls, jp_res, bp_res = classify_block(code, joints, facet.inward_normal)
                rec.classification = cls
                rec.boundary_pyramid = jp_res.boundary_only or bp_res.boundary_only
                if cls != CLASS_REMOVABLE:
                    continue
                jp = joint_pyramid(code, joints)
                mode = sliding_mode(jp, resultant)
                rec.mode = mode
                rec.safety_factor = safety_factor(jp, mode, resultant, frictions)
            except Exception as exc:  # per-block failures stay in the record
                rec.error = f"{type(exc).__name__}: {exc}"
                continue
            try:
                halfspaces = [
                    (s * j.normal, float((s * j.normal) @ seed_point))
                    for s, j in zip(
                        [1.0 if ch == "U" else -1.0 for ch in code], joints
                    )
                ]
                halfspaces.append(
                    (facet.inward_normal, float(facet.inward_normal @ facet.midpoint))
                )
                rec.volume_m3 = block_volume(halfspaces, box, allow_bbox_clip=True)
            except Exception as exc:
                rec.error = f"{type(exc).__name__}: {exc}"
    return records
