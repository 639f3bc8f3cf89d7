"""Raster atlases: dynamic and parameter plane scans, census, image/CSV output.

Rendering partitions the grid into fixed-size row blocks processed on a
thread pool; block boundaries depend only on the image height, never on the
worker count, and every cell is classified independently, so output is
byte-identical across worker counts.  The compiled kernel releases the GIL,
so threads give real parallelism when it is available.

Pixel geometry: column ix has re = x0 + (ix+0.5)*(x1-x0)/W, row iy has
im = y1 - (iy+0.5)*(y1-y0)/H (top row first, matching PPM order).
"""

from __future__ import annotations

import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np
import scipy.ndimage as ndi

from . import kernels
from .core import FamilyParams
from .kernels import (
    DYN_CYCLE,
    DYN_NEUTRAL,
    DYN_POLE,
    DYN_UNDECIDED,
    DYN_ZERO,
    PAR_CAPTURE,
    PAR_SHELL,
    PAR_UNDECIDED,
)
from .orbits import R_MAX, iterate_orbit, trap_radius

FOUR_CONN = np.array([[0, 1, 0], [1, 1, 1], [0, 1, 0]], dtype=np.uint8)

DYN_CLASS_NAMES = {
    DYN_UNDECIDED: "undecided",
    DYN_ZERO: "zero",
    DYN_CYCLE: "cycle",
    DYN_POLE: "pole",
    DYN_NEUTRAL: "neutral",
}
PAR_CLASS_NAMES = {
    PAR_UNDECIDED: "undecided",
    PAR_CAPTURE: "capture",
    PAR_SHELL: "shell",
}


class InvalidConfigError(ValueError):
    pass


@dataclass
class RunConfig:
    """Scan configuration shared by the dynamic and parameter renderers."""

    p: int
    q: int
    lam: complex | None = None          # required for dynamic scans
    window: tuple = (-2.0, 2.0, -2.0, 2.0)   # x0, x1, y0, y1
    width: int = 512
    height: int = 512
    max_iter: int = 2000
    mode: str = "fast"                  # capture-index procedure for single lambdas
    workers: int = 1
    aa: int = 1                         # N x N subsampling with majority vote
    seed_rng: int = 0

    def validate(self):
        if self.p < 1 or self.q < 1 or self.p * self.q <= 1:
            raise InvalidConfigError("need p, q >= 1 with p*q > 1")
        if self.width < 16 or self.height < 16:
            raise InvalidConfigError("resolution must be at least 16x16")
        x0, x1, y0, y1 = self.window
        if not (x0 < x1 and y0 < y1):
            raise InvalidConfigError("window must satisfy x0 < x1 and y0 < y1")
        if self.max_iter < 1:
            raise InvalidConfigError("max_iter must be >= 1")
        if self.mode not in ("fast", "exact"):
            raise InvalidConfigError("mode must be fast or exact")
        if self.workers < 1 or self.aa < 1:
            raise InvalidConfigError("workers and aa must be >= 1")
        return self


@dataclass
class Raster:
    window: tuple
    width: int
    height: int
    kind: str              # "dynamic" | "param"
    tag: np.ndarray        # (H, W) uint8
    aux1: np.ndarray       # (H, W) int32: steps / period / capture index
    aux2: np.ndarray       # (H, W) float64: multiplier modulus or final radius
    meta: dict = field(default_factory=dict)

    def class_name(self, iy: int, ix: int) -> str:
        names = DYN_CLASS_NAMES if self.kind == "dynamic" else PAR_CLASS_NAMES
        return names[int(self.tag[iy, ix])]

    def cell_center(self, iy: int, ix: int) -> complex:
        x0, x1, y0, y1 = self.window
        re = x0 + (ix + 0.5) * (x1 - x0) / self.width
        im = y1 - (iy + 0.5) * (y1 - y0) / self.height
        return complex(re, im)

    def cell_of(self, z: complex):
        """(iy, ix) of the cell containing z, or None when outside."""
        x0, x1, y0, y1 = self.window
        ix = int(math.floor((z.real - x0) / (x1 - x0) * self.width))
        iy = int(math.floor((y1 - z.imag) / (y1 - y0) * self.height))
        if 0 <= ix < self.width and 0 <= iy < self.height:
            return iy, ix
        return None


def _grid_rows(window, width, height, aa=1):
    """Cell-center coordinates, optionally subsampled aa x aa per cell."""
    x0, x1, y0, y1 = window
    w, h = width * aa, height * aa
    xs = x0 + (np.arange(w) + 0.5) * (x1 - x0) / w
    ys = y1 - (np.arange(h) + 0.5) * (y1 - y0) / h
    return xs, ys


def _block_rows(height, backend):
    # fixed per-backend block size; never a function of the worker count
    return 4 if backend == "compiled" else 64


def _run_blocks(height, workers, backend, job):
    rows_per_block = _block_rows(height, backend)
    blocks = [(r, min(r + rows_per_block, height)) for r in range(0, height, rows_per_block)]
    if workers == 1:
        for b in blocks:
            job(b)
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            list(pool.map(job, blocks))


def _majority_reduce(tag_f, aux1_f, aux2_f, aa):
    """aa x aa majority vote on tags; aux taken from the first winning subcell."""
    H, W = tag_f.shape[0] // aa, tag_f.shape[1] // aa
    t4 = tag_f.reshape(H, aa, W, aa).transpose(0, 2, 1, 3).reshape(H, W, aa * aa)
    a14 = aux1_f.reshape(H, aa, W, aa).transpose(0, 2, 1, 3).reshape(H, W, aa * aa)
    a24 = aux2_f.reshape(H, aa, W, aa).transpose(0, 2, 1, 3).reshape(H, W, aa * aa)
    counts = np.zeros((H, W, 5), np.int32)
    for t in range(5):
        counts[:, :, t] = (t4 == t).sum(axis=2)
    win = counts.argmax(axis=2).astype(np.uint8)   # ties: smallest tag
    first = (t4 == win[:, :, None]).argmax(axis=2)
    ii, jj = np.ix_(np.arange(H), np.arange(W))
    return win, a14[ii, jj, first], a24[ii, jj, first]


def render_dynamic(config: RunConfig) -> Raster:
    """Per-cell orbit classification of the dynamic plane at fixed lambda."""
    config.validate()
    if config.lam is None:
        raise InvalidConfigError("dynamic scan needs a lambda")
    params = FamilyParams(config.lam, config.p, config.q)
    r_trap = trap_radius(params)
    aa = config.aa
    xs, ys = _grid_rows(config.window, config.width, config.height, aa)
    H, W = config.height * aa, config.width * aa
    tag = np.zeros((H, W), np.uint8)
    aux1 = np.zeros((H, W), np.int32)
    aux2 = np.zeros((H, W), np.float64)

    def job(block):
        r0, r1 = block
        ya, yb = r0 * aa, r1 * aa
        zs = (xs[None, :] + 1j * ys[ya:yb, None]).ravel()
        t, a1, a2 = kernels.classify_dynamic(params.lam, params.p, params.q,
                                             zs, config.max_iter, r_trap)
        rows = yb - ya
        tag[ya:yb] = t.reshape(rows, W)
        aux1[ya:yb] = a1.reshape(rows, W)
        aux2[ya:yb] = a2.reshape(rows, W)

    _run_blocks(config.height, config.workers, kernels.BACKEND, job)
    if aa > 1:
        tag, aux1, aux2 = _majority_reduce(tag, aux1, aux2, aa)
    meta = {"p": config.p, "q": config.q, "lambda": [params.lam.real, params.lam.imag],
            "max_iter": config.max_iter, "trap_radius": r_trap,
            "backend": kernels.BACKEND, "aa": aa}
    return Raster(config.window, config.width, config.height, "dynamic",
                  tag, aux1, aux2, meta)


def render_param(config: RunConfig) -> Raster:
    """Per-cell parameter classification over a lambda window."""
    config.validate()
    aa = config.aa
    xs, ys = _grid_rows(config.window, config.width, config.height, aa)
    H, W = config.height * aa, config.width * aa
    tag = np.zeros((H, W), np.uint8)
    aux1 = np.zeros((H, W), np.int32)
    aux2 = np.zeros((H, W), np.float64)

    def job(block):
        r0, r1 = block
        ya, yb = r0 * aa, r1 * aa
        lams = (xs[None, :] + 1j * ys[ya:yb, None]).ravel()
        t, a1, a2 = kernels.classify_param(config.p, config.q, lams, config.max_iter)
        rows = yb - ya
        tag[ya:yb] = t.reshape(rows, W)
        aux1[ya:yb] = a1.reshape(rows, W)
        aux2[ya:yb] = a2.reshape(rows, W)

    _run_blocks(config.height, config.workers, kernels.BACKEND, job)
    if aa > 1:
        tag, aux1, aux2 = _majority_reduce(tag, aux1, aux2, aa)
    meta = {"p": config.p, "q": config.q, "max_iter": config.max_iter,
            "backend": kernels.BACKEND, "aa": aa}
    return Raster(config.window, config.width, config.height, "param",
                  tag, aux1, aux2, meta)


# cells whose estimated Julia-set distance falls below this multiple of the
# cell size are treated as boundary walls before component labeling
DEM_WALL_FACTOR = 2.0


def exact_capture_index(params: FamilyParams, max_iter: int = 2000,
                        resolution: int = 2048, window=None, workers=None):
    """Minimal k with f^k(v) in the raster-connected component of 0.

    The immediate basin is approximated on a grid: trap-entering cells form
    the basin set, but a cell is kept only when its Milnor distance estimate
    to the basin boundary exceeds a couple of cell widths (otherwise the
    thin Julia boundary between basin components leaks through at any
    resolution, since for a capture parameter almost every cell converges).
    Returns None when the orbit of v never reached the trap (not a capture
    parameter).  The answer is a resolution-dependent approximation.
    """
    r_trap = trap_radius(params)
    orbit = iterate_orbit(params, params.v, max_iter, trap_radius=r_trap)
    last = orbit[-1]
    if not (abs(last) < r_trap):
        return None
    if abs(params.lam) < (math.pi / 4.0) ** (1.0 / params.q):
        return 0  # disk certificate: v lies in the contracting disk inside B0
    if window is None:
        radius = 1.25 * max(abs(z) for z in orbit if abs(z) < R_MAX)
        radius = max(radius, 1.0)
        window = (-radius, radius, -radius, radius)
    x0, x1, y0, y1 = window
    xs = x0 + (np.arange(resolution) + 0.5) * (x1 - x0) / resolution
    ys = y1 - (np.arange(resolution) + 0.5) * (y1 - y0) / resolution
    entered = np.zeros((resolution, resolution), np.uint8)
    dem = np.zeros((resolution, resolution), np.float64)
    if workers is None:
        workers = 1

    def job(block):
        r0, r1 = block
        zs = (xs[None, :] + 1j * ys[r0:r1, None]).ravel()
        ent, _, dm = kernels.basin_dem(params.lam, params.p, params.q,
                                       zs, max_iter, r_trap)
        entered[r0:r1] = ent.reshape(r1 - r0, resolution)
        dem[r0:r1] = dm.reshape(r1 - r0, resolution)

    _run_blocks(resolution, workers, kernels.BACKEND, job)
    cell = math.hypot((x1 - x0) / resolution, (y1 - y0) / resolution)
    mask = (entered == 1) & (dem >= DEM_WALL_FACTOR * cell)
    labels, _ = ndi.label(mask, structure=FOUR_CONN)

    def cell_of(z):
        ix = int(math.floor((z.real - x0) / (x1 - x0) * resolution))
        iy = int(math.floor((y1 - z.imag) / (y1 - y0) * resolution))
        if 0 <= ix < resolution and 0 <= iy < resolution:
            return iy, ix
        return None

    home = cell_of(0j)
    if home is None:
        return None
    b0 = labels[home]
    if b0 == 0:
        return None
    for k, z in enumerate(orbit):
        c = cell_of(z)
        if c is None:
            continue
        if labels[c] == b0:
            return k
        # boundary quantization: accept if most of the 3x3 patch is B0
        iy, ix = c
        patch = labels[max(0, iy - 1):iy + 2, max(0, ix - 1):ix + 2]
        if (patch == b0).sum() > patch.size // 2:
            return k
    return None


def component_census(raster: Raster):
    """Connected components per class (4-connectivity), largest first.

    Capture components are keyed by (class, index) so Capture{0} is separate
    from Capture{n >= 1}; shells and cycles are keyed by period.
    """
    entries = []
    x0, x1, y0, y1 = raster.window
    sx = (x1 - x0) / raster.width
    sy = (y1 - y0) / raster.height
    keyed = raster.kind == "param"
    idx_classes = {PAR_CAPTURE, PAR_SHELL} if keyed else {DYN_CYCLE, DYN_NEUTRAL}
    for t in sorted(np.unique(raster.tag)):
        names = PAR_CLASS_NAMES if raster.kind == "param" else DYN_CLASS_NAMES
        name = names[int(t)]
        if int(t) in idx_classes:
            idx_values = sorted(np.unique(raster.aux1[raster.tag == t]))
        else:
            idx_values = [None]
        for iv in idx_values:
            mask = raster.tag == t
            if iv is not None:
                mask &= raster.aux1 == iv
            labels, ncomp = ndi.label(mask, structure=FOUR_CONN)
            if ncomp == 0:
                continue
            objects = ndi.find_objects(labels)
            sizes = np.bincount(labels.ravel())
            for ci, sl in enumerate(objects, start=1):
                ys_, xs_ = sl
                cells = int(sizes[ci])
                bw = ((ys_.stop - ys_.start) * sy, (xs_.stop - xs_.start) * sx)
                diameter = math.hypot(*bw)
                inside = np.argwhere(labels[sl] == ci)
                iy = int(inside[0][0]) + ys_.start
                ix = int(inside[0][1]) + xs_.start
                rep = raster.cell_center(iy, ix)
                touches = (ys_.start == 0 or xs_.start == 0
                           or ys_.stop == raster.height or xs_.stop == raster.width)
                entries.append({
                    "class": name,
                    "index": int(iv) if iv is not None else None,
                    "size_cells": cells,
                    "bbox_cells": [int(xs_.start), int(xs_.stop),
                                   int(ys_.start), int(ys_.stop)],
                    "diameter": diameter,
                    "representative": [rep.real, rep.imag],
                    "touches_boundary": bool(touches),
                })
    entries.sort(key=lambda e: (-e["size_cells"], e["class"],
                                -1 if e["index"] is None else e["index"],
                                e["bbox_cells"]))
    return entries


# ---------------------------------------------------------------------------
# colors and output
# ---------------------------------------------------------------------------

def _shade(rgb, f):
    f = min(max(f, 0.0), 1.0)
    return tuple(int(round(c * f)) for c in rgb)


def _dyn_color(tag, aux1):
    if tag == DYN_ZERO:
        return _shade((236, 64, 208), 0.55 + 0.45 * (0.9 ** min(int(aux1), 40)))
    if tag == DYN_CYCLE:
        base = {1: (24, 24, 24), 2: (40, 60, 120), 3: (130, 40, 40)}
        return base.get(int(aux1), ((int(aux1) * 47) % 140 + 30,
                                    (int(aux1) * 91) % 140 + 30,
                                    (int(aux1) * 29) % 140 + 30))
    if tag == DYN_POLE:
        return (0, 0, 0)
    if tag == DYN_NEUTRAL:
        return (255, 165, 0)
    return (255, 255, 255)


def _par_color(tag, aux1):
    if tag == PAR_CAPTURE:
        if aux1 == 0:
            return (199, 21, 133)
        g = 200 - 14 * min(int(aux1), 10)
        return (36, g, 64)
    if tag == PAR_SHELL:
        base = {1: (240, 208, 48), 2: (72, 196, 200), 3: (204, 60, 60)}
        return base.get(int(aux1), ((int(aux1) * 67) % 160 + 60,
                                    (int(aux1) * 31) % 160 + 60,
                                    (int(aux1) * 101) % 160 + 60))
    return (255, 255, 255)


def raster_rgb(raster: Raster) -> np.ndarray:
    """(H, W, 3) uint8 legend colors for the raster."""
    color = _dyn_color if raster.kind == "dynamic" else _par_color
    keys = raster.tag.astype(np.int64) * (1 << 32) + raster.aux1.astype(np.int64)
    uniq, inverse = np.unique(keys.ravel(), return_inverse=True)
    palette = np.zeros((uniq.size, 3), np.uint8)
    for i, key in enumerate(uniq):
        palette[i] = color(int(key >> 32), int(key & 0xFFFFFFFF))
    return palette[inverse].reshape(raster.height, raster.width, 3)


def write_ppm(raster: Raster, path):
    """Binary PPM (P6), top row first: the canonical diffable output."""
    rgb = raster_rgb(raster)
    with open(path, "wb") as fh:
        fh.write(f"P6\n{raster.width} {raster.height}\n255\n".encode("ascii"))
        fh.write(rgb.tobytes())


def write_csv(raster: Raster, path):
    """Cell dump: ix,iy,re,im,class,aux1,aux2 in row-major order."""
    names = DYN_CLASS_NAMES if raster.kind == "dynamic" else PAR_CLASS_NAMES
    with open(path, "w", encoding="ascii", newline="\n") as fh:
        fh.write("ix,iy,re,im,class,aux1,aux2\n")
        for iy in range(raster.height):
            for ix in range(raster.width):
                z = raster.cell_center(iy, ix)
                fh.write(f"{ix},{iy},{z.real:.17g},{z.imag:.17g},"
                         f"{names[int(raster.tag[iy, ix])]},"
                         f"{int(raster.aux1[iy, ix])},"
                         f"{raster.aux2[iy, ix]:.17g}\n")


def write_census_jsonl(entries, path):
    with open(path, "w", encoding="ascii", newline="\n") as fh:
        for e in entries:
            fh.write(json.dumps(e, sort_keys=True) + "\n")
