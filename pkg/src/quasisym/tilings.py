"""Synthetic (quasi)periodic tiling renderers.

All families are drawn as black line strokes on a white background and
sampled at the 1-based pixel coordinates (x, y) = (column, row) that the
spectral transform uses, so designed symmetry centres sit exactly at the
transform origin.  Rendering is deterministic: identical spec means
bit-identical pixels (no entropy is consumed anywhere).

Families:
  p4/p4mm/p4g        square-lattice motifs (chiral hooks, squares, tilted
                     square pairs with a glide), exact integer period
  penrose            pentagrid (de Bruijn multigrid dual), offsets summing
                     to gamma; gamma = 0 is the canonical tiling
  ammann_beenker     four-grid dual, 8-fold module
  fibonacci_squares  two orthogonal Fibonacci chains of grid lines
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .image import GrayscaleImage

__all__ = [
    "TilingSpec",
    "generate_tiling",
    "basis_guesses",
    "recommended_fl",
    "FAMILIES",
]

FAMILIES = ("p4", "p4mm", "p4g", "penrose", "ammann_beenker", "fibonacci_squares")

GOLDEN = (1.0 + math.sqrt(5.0)) / 2.0

# Fixed generic window placements (tiling units) so quasiperiodic fragments
# contain no special superposability centre by default.
_GENERIC_OFFSET = {
    "penrose": (237.31415, 154.27182),
    "ammann_beenker": (118.16180, 77.41421),
    # Equal offsets on both axes: the two line sets coincide, so the swap
    # mirror is exact and the finite-window x/y amplitude fluctuations match
    # instead of compounding.
    "fibonacci_squares": (17.12358, 17.12358),
}

# Zero-sum regularisation of the pentagrid offsets; keeps the offset sum (the
# one-parameter family invariant) intact while removing the degenerate
# multi-line intersections an all-equal offset vector produces.
_PENTA_EPS = np.array([2.0e-3, -1.3e-3, 0.7e-3, -1.1e-3, 1.7e-3])

# Equal four-grid offsets: the multigrid maps to itself (mod relabelling)
# under the eightfold rotation, which keeps the dual in the octagonal class;
# generic unequal offsets drift into a lower-symmetry local-isomorphism
# class with visibly unequal axis/diagonal peak amplitudes.  Half-integer
# offsets admit no triple intersections (the grid is regular: equalities
# would force an integer to equal a half-integer or an irrational).
_AB_OFFSETS = np.array([0.5, 0.5, 0.5, 0.5])


@dataclass(frozen=True)
class TilingSpec:
    family: str
    size: int = 600
    gamma: float = 0.0
    line_width: float = 2.0
    window_offset: tuple[float, float] | None = None
    seed: int = 0
    period: int | None = None  # periodic families; pixels per lattice cell
    scale: float | None = None  # quasiperiodic families; pixels per tile edge
    antialias: bool = True
    # Stroke edge transition width in px.  Wider ramps decay the stroke
    # spectrum faster, suppressing the square-pixel-grid aliases that
    # otherwise contaminate off-lattice peaks anisotropically.
    softness: float = 2.0

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise ValueError(f"unsupported family {self.family!r}; choose from {FAMILIES}")
        if not 0.0 <= self.gamma < 1.0:
            raise ValueError("gamma must lie in [0, 1)")
        if self.line_width < 1.0:
            raise ValueError("line_width must be >= 1")
        if self.size < 16:
            raise ValueError("size must be >= 16")

    @property
    def cell(self) -> int:
        if self.period is not None:
            return int(self.period)
        return 60 if self.family == "p4g" else 40

    @property
    def unit_scale(self) -> float:
        """Pixels per tiling unit, quasiperiodic families.

        The default snaps the strongest module ring onto an integer radius:
        the plain transform's spectral leakage of the canvas mean vanishes
        at integer frequencies, so on-axis ring members are measured and
        refined as cleanly as the off-axis ones.
        """
        if self.scale is not None:
            return float(self.scale)
        if self.family == "penrose":
            coef = 0.4 * GOLDEN ** 2  # strong-ring cycles per unit
            nominal = 15.0
        elif self.family == "ammann_beenker":
            coef = 0.5 * (1.0 + math.sqrt(2.0))
            nominal = 12.5
        elif self.family == "fibonacci_squares":
            coef = GOLDEN ** 2 / math.sqrt(5.0)
            nominal = 12.0
        else:
            return 20.0
        ring = max(1, round(coef * self.size / nominal))
        return coef * self.size / ring

    @property
    def offset(self) -> tuple[float, float]:
        if self.window_offset is not None:
            return (float(self.window_offset[0]), float(self.window_offset[1]))
        if self.family in _GENERIC_OFFSET:
            return _GENERIC_OFFSET[self.family]
        return (0.0, 0.0)  # periodic families default to the centred position


# ---------------------------------------------------------------------------
# rasterization


def _segment_distance(px_x: np.ndarray, px_y: np.ndarray, seg: np.ndarray) -> np.ndarray:
    """Distance from points to one segment (x0, y0, x1, y1)."""
    x0, y0, x1, y1 = seg
    dx, dy = x1 - x0, y1 - y0
    norm2 = dx * dx + dy * dy
    if norm2 == 0.0:
        return np.hypot(px_x - x0, px_y - y0)
    t = ((px_x - x0) * dx + (px_y - y0) * dy) / norm2
    t = np.clip(t, 0.0, 1.0)
    return np.hypot(px_x - (x0 + t * dx), px_y - (y0 + t * dy))


def _stroke(
    dist: np.ndarray, line_width: float, antialias: bool, softness: float = 2.0
) -> np.ndarray:
    """Distance field -> density: 0 on the stroke, 1 on the background."""
    half = line_width / 2.0
    if antialias:
        # Linear ramp of the given width centred on the stroke boundary.
        return np.clip((dist - half) / softness + 0.5, 0.0, 1.0)
    return (dist > half).astype(np.float64)


def _render_periodic(
    motif: np.ndarray, cell: int, spec: TilingSpec
) -> GrayscaleImage:
    """Render a cell-periodic motif by evaluating one residue grid.

    The distance field is periodic under the cell lattice, so only the
    distinct residues of the sample coordinates (x, y) = (col+1, row+1) plus
    the window offset need evaluating; the motif is tiled 3x3 to cover
    cross-boundary strokes.
    """
    n = spec.size
    wx, wy = spec.offset
    xr = (np.arange(1, n + 1, dtype=np.float64) + wx) % cell
    yr = (np.arange(1, n + 1, dtype=np.float64) + wy) % cell
    ux, inv_x = np.unique(xr, return_inverse=True)
    uy, inv_y = np.unique(yr, return_inverse=True)
    gx, gy = np.meshgrid(ux, uy)
    dist = np.full(gx.shape, np.inf)
    for seg in motif:
        for sx in (-cell, 0, cell):
            for sy in (-cell, 0, cell):
                shifted = seg + np.array([sx, sy, sx, sy], dtype=np.float64)
                np.minimum(dist, _segment_distance(gx, gy, shifted), out=dist)
    values = _stroke(dist, spec.line_width, spec.antialias, spec.softness)
    return GrayscaleImage(values[np.ix_(inv_y, inv_x)])


def _render_segments(segments: np.ndarray, spec: TilingSpec) -> GrayscaleImage:
    """Render an explicit segment soup given in pixel coordinates."""
    n = spec.size
    pad = spec.line_width / 2.0 + 1.5
    dist = np.full((n, n), np.inf)
    for seg in segments:
        x0, y0, x1, y1 = seg
        # Pixel (row a, col b) samples (x, y) = (b+1, a+1).
        bx0 = max(int(math.floor(min(x0, x1) - pad)) - 1, 0)
        bx1 = min(int(math.ceil(max(x0, x1) + pad)) - 1, n - 1)
        by0 = max(int(math.floor(min(y0, y1) - pad)) - 1, 0)
        by1 = min(int(math.ceil(max(y0, y1) + pad)) - 1, n - 1)
        if bx0 > bx1 or by0 > by1:
            continue
        sub_x = np.arange(bx0 + 1, bx1 + 2, dtype=np.float64)[None, :]
        sub_y = np.arange(by0 + 1, by1 + 2, dtype=np.float64)[:, None]
        d = _segment_distance(sub_x, sub_y, seg)
        np.minimum(dist[by0:by1 + 1, bx0:bx1 + 1], d, out=dist[by0:by1 + 1, bx0:bx1 + 1])
    return GrayscaleImage(_stroke(dist, spec.line_width, spec.antialias, spec.softness))


# ---------------------------------------------------------------------------
# periodic motifs (coordinates relative to a cell-lattice point)


def _square_outline(center: tuple[float, float], half_diag: float, tilt_deg: float) -> np.ndarray:
    cx, cy = center
    corners = []
    for p in range(4):
        a = math.radians(tilt_deg + 45.0 + 90.0 * p)
        corners.append((cx + half_diag * math.cos(a), cy + half_diag * math.sin(a)))
    segs = []
    for p in range(4):
        x0, y0 = corners[p]
        x1, y1 = corners[(p + 1) % 4]
        segs.append((x0, y0, x1, y1))
    return np.array(segs, dtype=np.float64)


def _rot90(segs: np.ndarray, times: int) -> np.ndarray:
    out = segs.copy()
    for _ in range(times % 4):
        x0, y0, x1, y1 = out[:, 0].copy(), out[:, 1].copy(), out[:, 2].copy(), out[:, 3].copy()
        # (x, y) -> (y, -x), a quarter turn in the sampling frame.
        out[:, 0], out[:, 1], out[:, 2], out[:, 3] = y0, -x0, y1, -x1
    return out


def _motif_p4mm(cell: int) -> np.ndarray:
    half = 0.30 * cell
    return _square_outline((0.0, 0.0), half * math.sqrt(2.0), 0.0)


def _motif_p4(cell: int) -> np.ndarray:
    # Chiral pinwheel: four arms with flags all turning the same way, fourfold
    # symmetric about the origin, no mirror.
    arm = np.array(
        [
            (0.075 * cell, 0.0, 0.325 * cell, 0.0),
            (0.325 * cell, 0.0, 0.325 * cell, 0.15 * cell),
        ],
        dtype=np.float64,
    )
    return np.concatenate([_rot90(arm, p) for p in range(4)])


def _motif_p4g(cell: int) -> np.ndarray:
    # Tilted square at the origin, oppositely tilted square at the cell
    # centre: fourfold axes at both sites, reflections only combined with the
    # half-cell translation (glide).
    half_diag = 0.22 * cell * math.sqrt(2.0)
    a = _square_outline((0.0, 0.0), half_diag, 15.0)
    b = _square_outline((cell / 2.0, cell / 2.0), half_diag, -15.0)
    return np.concatenate([a, b])


# ---------------------------------------------------------------------------
# multigrid duals (pentagrid / four-grid)


def _multigrid_segments(
    spec: TilingSpec, directions: np.ndarray, offsets: np.ndarray
) -> np.ndarray:
    """Tiling edges of the dual of a multigrid, in pixel coordinates.

    Grid j is the line family {z : z . e_j + gamma_j in Z}.  Each pairwise
    intersection dualises to a rhombus with vertices sum_l K_l(z) e_l where
    K_l jumps across grid-l lines; the four corner index vectors differ by
    one unit in the two intersecting grids.
    """
    n = spec.size
    s = spec.unit_scale
    wx, wy = spec.offset
    m = len(directions)
    # Dual vertices sit near (m/2) * z (sum_l e_l e_l^T = (m/2) I for these
    # direction stars), so intersections feeding the canvas window live in
    # the window scaled down by that factor; the ceil fractional parts shift
    # vertices by at most sum_l |e_l| = m units, covered by the margin.
    blow = m / 2.0
    margin = m / blow + 2.0
    lo = np.array([1.0 / s + wx, 1.0 / s + wy]) / blow - margin
    hi = np.array([n / s + wx, n / s + wy]) / blow + margin
    corners = np.array(
        [[lo[0], lo[1]], [lo[0], hi[1]], [hi[0], lo[1]], [hi[0], hi[1]]]
    )
    segments: list[np.ndarray] = []
    for j in range(m):
        for k in range(j + 1, m):
            ej, ek = directions[j], directions[k]
            det = ej[0] * ek[1] - ej[1] * ek[0]
            if abs(det) < 1e-12:
                continue
            proj_j = corners @ ej + offsets[j]
            proj_k = corners @ ek + offsets[k]
            pj = np.arange(math.ceil(proj_j.min()) - 1, math.floor(proj_j.max()) + 2)
            pk = np.arange(math.ceil(proj_k.min()) - 1, math.floor(proj_k.max()) + 2)
            PJ, PK = np.meshgrid(pj, pk, indexing="ij")
            rj = (PJ - offsets[j]).ravel()
            rk = (PK - offsets[k]).ravel()
            # Solve z . e_j = rj, z . e_k = rk.
            zx = (rj * ek[1] - rk * ej[1]) / det
            zy = (rk * ej[0] - rj * ek[0]) / det
            keep = (zx >= lo[0]) & (zx <= hi[0]) & (zy >= lo[1]) & (zy <= hi[1])
            if not keep.any():
                continue
            zx, zy = zx[keep], zy[keep]
            pj_sel = PJ.ravel()[keep].astype(np.float64)
            pk_sel = PK.ravel()[keep].astype(np.float64)
            # Index functions for the other grids; the two intersecting
            # grids take their exact line indices to dodge roundoff.
            base = np.zeros((zx.size, 2))
            for l in range(m):
                if l == j or l == k:
                    continue
                kl = np.ceil(zx * directions[l][0] + zy * directions[l][1] + offsets[l])
                base += kl[:, None] * directions[l][None, :]
            base += pj_sel[:, None] * ej[None, :] + pk_sel[:, None] * ek[None, :]
            # Rhombus corners base, base+ej, base+ej+ek, base+ek; emit edges.
            v0 = base
            v1 = base + ej[None, :]
            v2 = base + ej[None, :] + ek[None, :]
            v3 = base + ek[None, :]
            for a, b in ((v0, v1), (v1, v2), (v3, v2), (v0, v3)):
                segments.append(np.concatenate([a, b], axis=1))
    all_segs = np.concatenate(segments, axis=0)
    # Tiling units -> pixel coordinates.
    px = np.empty_like(all_segs)
    px[:, 0] = (all_segs[:, 0] - wx) * s
    px[:, 1] = (all_segs[:, 1] - wy) * s
    px[:, 2] = (all_segs[:, 2] - wx) * s
    px[:, 3] = (all_segs[:, 3] - wy) * s
    # Drop segments far outside the canvas.
    pad = 4.0 * s
    inside = (
        (np.minimum(px[:, 0], px[:, 2]) < n + pad)
        & (np.maximum(px[:, 0], px[:, 2]) > -pad)
        & (np.minimum(px[:, 1], px[:, 3]) < n + pad)
        & (np.maximum(px[:, 1], px[:, 3]) > -pad)
    )
    return px[inside]


def _penrose_directions() -> np.ndarray:
    ang = 2.0 * np.pi * np.arange(5) / 5.0
    return np.stack([np.cos(ang), np.sin(ang)], axis=1)


def _ab_directions() -> np.ndarray:
    ang = np.pi * np.arange(4) / 4.0
    return np.stack([np.cos(ang), np.sin(ang)], axis=1)


def penrose_offsets(gamma: float) -> np.ndarray:
    """Pentagrid offsets: sum equals gamma, slightly desymmetrised."""
    return gamma / 5.0 + _PENTA_EPS


# ---------------------------------------------------------------------------
# Fibonacci chain


def fibonacci_word(min_length_units: float) -> np.ndarray:
    """Tile lengths of the substitution word a -> ab, b -> a from axiom a.

    Returns the segment lengths (1 for a, 1/golden for b) until their sum
    exceeds the requested span.
    """
    word = [True]  # True = a
    total = 1.0
    short = 1.0 / GOLDEN
    while total < min_length_units:
        word = [w for t in word for w in ((True, False) if t else (True,))]
        total = sum(1.0 if t else short for t in word)
    return np.array([1.0 if t else short for t in word])


def _fibonacci_positions(span: float) -> np.ndarray:
    lengths = fibonacci_word(span + 2.0)
    return np.concatenate([[0.0], np.cumsum(lengths)])


def _render_fibonacci(spec: TilingSpec) -> GrayscaleImage:
    n, s = spec.size, spec.unit_scale
    wx, wy = spec.offset
    span = n / s + 4.0
    pos = _fibonacci_positions(max(wx, wy) + span)

    def axis_distance(offset: float) -> np.ndarray:
        coords = np.arange(1, n + 1, dtype=np.float64) / s + offset
        idx = np.searchsorted(pos, coords)
        left = pos[np.clip(idx - 1, 0, len(pos) - 1)]
        right = pos[np.clip(idx, 0, len(pos) - 1)]
        return np.minimum(np.abs(coords - left), np.abs(coords - right)) * s

    dx = axis_distance(wx)
    dy = axis_distance(wy)
    dist = np.minimum(dx[None, :], dy[:, None])
    return GrayscaleImage(_stroke(dist, spec.line_width, spec.antialias, spec.softness))


# ---------------------------------------------------------------------------
# public API


def generate_tiling(spec: TilingSpec) -> GrayscaleImage:
    if spec.family == "p4mm":
        return _render_periodic(_motif_p4mm(spec.cell), spec.cell, spec)
    if spec.family == "p4":
        return _render_periodic(_motif_p4(spec.cell), spec.cell, spec)
    if spec.family == "p4g":
        return _render_periodic(_motif_p4g(spec.cell), spec.cell, spec)
    if spec.family == "penrose":
        segs = _multigrid_segments(spec, _penrose_directions(), penrose_offsets(spec.gamma))
        return _render_segments(segs, spec)
    if spec.family == "ammann_beenker":
        segs = _multigrid_segments(spec, _ab_directions(), _AB_OFFSETS)
        return _render_segments(segs, spec)
    if spec.family == "fibonacci_squares":
        return _render_fibonacci(spec)
    raise ValueError(f"unsupported family {spec.family!r}")


def basis_guesses(spec: TilingSpec) -> np.ndarray:
    """Theoretical fundamental-frequency guesses (cycles per image width).

    These are starting points for refinement, not exact peak positions; the
    pipeline refines them before analysis.
    """
    n = spec.size
    if spec.family in ("p4", "p4mm"):
        f = n / spec.cell
        return np.array([[f, 0.0], [0.0, f]])
    if spec.family == "p4g":
        f = n / spec.cell
        # Axis frequencies are extinguished by the glide; the detectable
        # generators sit on the diagonal ring.
        return np.array([[f, f], [2 * f, f]])
    if spec.family == "penrose":
        # Module fundamentals are (2/5) e_j cycles per edge; the strong ring
        # sits a golden-squared factor up (multiplication by the unit
        # golden^2 is unimodular on the module, so the ring is still a basis).
        f = 0.4 * GOLDEN ** 2 * n / spec.unit_scale
        return f * _penrose_directions()[:4]
    if spec.family == "ammann_beenker":
        # Fundamentals (1/2) e_j cycles per edge; silver-mean ring up.
        f = 0.5 * (1.0 + math.sqrt(2.0)) * n / spec.unit_scale
        return f * _ab_directions()
    if spec.family == "fibonacci_squares":
        # Per-axis module (Z + golden*Z)/sqrt(5) in cycles per tile unit;
        # the two strongest generators per axis (golden and golden^2, an
        # unimodular pair).
        u1 = GOLDEN / math.sqrt(5.0)
        u2 = GOLDEN ** 2 / math.sqrt(5.0)
        f = n / spec.unit_scale
        return np.array([[u1 * f, 0.0], [u2 * f, 0.0], [0.0, u1 * f], [0.0, u2 * f]])
    raise ValueError(f"unsupported family {spec.family!r}")


def recommended_fl(spec: TilingSpec) -> int:
    """Per-family default combination depth for the analysis set."""
    if spec.family in ("p4", "p4mm", "p4g"):
        return 6
    if spec.family == "fibonacci_squares":
        return 4
    return 6
