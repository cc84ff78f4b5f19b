"""
Relay-placement maps: classify every cell of a grid of relay positions by the
regime each feedback configuration reaches there.
"""

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
import csv
import io

from . import regimes as rg
from .channel_model import DegenerateGeometry, attenuation_from_geometry, fading_model

DEGENERATE = "Degenerate"
CSV = "CSV"
PGM = "PGM"
GRAY_LEVELS = {rg.NEITHER: 0, rg.SI_NOT_VSI: 128, rg.VSI: 255, DEGENERATE: 0}


def default_bbox(layout, margin=3.0):
    """Box around the four terminals, each half-extent scaled by ``margin``."""
    xs = [p[0] for p in layout.nodes().values()]
    ys = [p[1] for p in layout.nodes().values()]
    cx, cy = 0.5 * (min(xs) + max(xs)), 0.5 * (min(ys) + max(ys))
    hx = 0.5 * (max(xs) - min(xs)) or 1.0
    hy = 0.5 * (max(ys) - min(ys)) or 1.0
    return (cx - margin * hx, cx + margin * hx, cy - margin * hy, cy + margin * hy)


@dataclass
class PlacementGrid:
    """``cells[iy][ix]`` maps config -> regime; row 0 is the top (largest y)."""

    bbox: tuple
    resolution: int
    configs: tuple
    regime_kind: str
    model: str
    cells: list = field(default_factory=list)

    def centers(self):
        """Cell centers in the same row-major, top-to-bottom order as ``cells``."""
        xmin, xmax, ymin, ymax = self.bbox
        n = self.resolution
        dx, dy = (xmax - xmin) / n, (ymax - ymin) / n
        return [[(xmin + (ix + 0.5) * dx, ymax - (iy + 0.5) * dy) for ix in range(n)]
                for iy in range(n)]

    def cell_set(self, config, regimes=(rg.VSI,)):
        """Set of (iy, ix) indices where ``config`` reaches one of ``regimes``."""
        return {(iy, ix) for iy, row in enumerate(self.cells)
                for ix, cell in enumerate(row) if cell[config] in regimes}


def _classify_row(args):
    layout, powers, model, configs, kind, row, settings = args
    out = []
    for pos in row:
        try:
            params = attenuation_from_geometry(layout, pos, powers)
        except DegenerateGeometry:
            out.append({c: DEGENERATE for c in configs})
            continue
        cell = {}
        for c in configs:
            if kind == rg.VSI:
                ok = rg.check_vsi(c, model, params, settings).overall
                cell[c] = rg.VSI if ok else rg.NEITHER
            else:
                cell[c] = rg.classify(c, model, params, settings)
        out.append(cell)
    return out


def scan_placement(layout, powers, model, configs, regime_kind=rg.VSI, bbox=None,
                   resolution=100, settings=rg.DEFAULT_SETTINGS, workers=1):
    """Classify relay positions at the centers of a ``resolution``^2 grid.

    With ``regime_kind`` VSI each cell is VSI or Neither; with SI the full
    three-way classification is kept. Cells whose center coincides with a
    terminal are marked Degenerate. Results do not depend on ``workers``.
    """
    configs = tuple(rg.feedback_config(c) for c in configs)
    if not configs:
        raise ValueError("at least one feedback configuration is required")
    if resolution < 2:
        raise ValueError("resolution must be at least 2")
    if regime_kind not in (rg.VSI, "SI"):
        raise ValueError("regime_kind must be 'VSI' or 'SI'")
    model = fading_model(model)
    bbox = tuple(float(v) for v in (bbox or default_bbox(layout)))
    if not (bbox[0] < bbox[1] and bbox[2] < bbox[3]):
        raise ValueError("bbox must satisfy xmin < xmax and ymin < ymax")
    grid = PlacementGrid(bbox, int(resolution), configs, regime_kind, model)
    jobs = [(layout, tuple(powers), model, configs, regime_kind, row, settings)
            for row in grid.centers()]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as ex:
            grid.cells = list(ex.map(_classify_row, jobs))
    else:
        grid.cells = [_classify_row(j) for j in jobs]
    return grid


def export_map(grid, fmt=CSV):
    """Serialize a grid.

    CSV returns one byte string with rows ``x,y,config,regime``. PGM returns a
    dict config -> binary P5 image, gray 0 / 128 / 255 for Neither /
    SI_not_VSI / VSI, rows top to bottom.
    """
    fmt = fmt.upper()
    if fmt == CSV:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["x", "y", "config", "regime"])
        for row_c, row in zip(grid.centers(), grid.cells):
            for (x, y), cell in zip(row_c, row):
                for c in grid.configs:
                    w.writerow([f"{x:.12g}", f"{y:.12g}", c, cell[c]])
        return buf.getvalue().encode("ascii")
    if fmt == PGM:
        n = grid.resolution
        out = {}
        for c in grid.configs:
            header = f"P5\n{n} {n}\n255\n".encode("ascii")
            pixels = bytes(GRAY_LEVELS[cell[c]] for row in grid.cells for cell in row)
            out[c] = header + pixels
        return out
    raise ValueError(f"unknown export format {fmt!r}")
