"""Existence and zig-zag regions in the (k, l) plane on a uniform cell grid."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .coeffs import delta_zz_closed
from .errors import ConfigurationError
from .parallel import pmap
from .rolls import DomainClass

EXTENT = 1.05
MIN_RESOLUTION = 64
CLASS_ORDER = [DomainClass.outside_D, DomainClass.D_plus, DomainClass.D_minus,
               DomainClass.boundary_existence, DomainClass.boundary_zz]


def classify_array(k, l, tol: float = 1e-9) -> np.ndarray:
    """Vectorized ``rolls.classify``: integer codes indexing CLASS_ORDER."""
    q2 = k * k + l * l
    dzz = delta_zz_closed(k, l)
    code = np.where(dzz < 0, 2, 1)
    code = np.where(np.abs(dzz) <= tol, 4, code)
    code = np.where(q2 > 1.0, 0, code)
    code = np.where(np.abs(1.0 - q2) <= tol, 3, code)
    return code


@dataclass
class RegionMap:
    resolution: int
    k: np.ndarray        # cell centres, 1-D
    l: np.ndarray
    codes: np.ndarray    # (resolution, resolution), rows indexed by l
    delta_zz: np.ndarray

    @property
    def cell(self) -> float:
        return 2 * EXTENT / self.resolution

    def radii(self) -> np.ndarray:
        K, L = np.meshgrid(self.k, self.l)
        return np.hypot(K, L)

    def _interface(self, inside, outside) -> float:
        r = self.radii()
        return 0.5 * (r[inside].max() + r[outside].min())

    def inner_radius(self) -> float:
        """Midpoint between the outermost D_plus cell and the innermost D_minus cell."""
        return self._interface(self.codes == 1, self.codes == 2)

    def outer_radius(self) -> float:
        return self._interface(np.isin(self.codes, (1, 2)), self.codes == 0)

    def area_fraction(self) -> float:
        """Share of the existence disc occupied by D_minus."""
        n_minus = np.count_nonzero(self.codes == 2)
        n_disc = np.count_nonzero(np.isin(self.codes, (1, 2, 3, 4)))
        return n_minus / n_disc

    def rows(self):
        for i, lv in enumerate(self.l):
            for j, kv in enumerate(self.k):
                yield kv, lv, self.delta_zz[i, j], CLASS_ORDER[self.codes[i, j]].value

    def summary(self) -> dict:
        return {"resolution": self.resolution, "cell_size": self.cell,
                "inner_radius": float(self.inner_radius()), "outer_radius": float(self.outer_radius()),
                "inner_radius_exact": float(1 / np.sqrt(3.0)), "outer_radius_exact": 1.0,
                "D_minus_area_fraction": self.area_fraction()}


def region_map(resolution: int = 512, workers: int | None = None) -> RegionMap:
    if resolution < MIN_RESOLUTION:
        raise ConfigurationError(f"resolution must be at least {MIN_RESOLUTION}")
    h = 2 * EXTENT / resolution
    centres = -EXTENT + h * (np.arange(resolution) + 0.5)

    def row_block(idx):
        K, L = np.meshgrid(centres, centres[idx])
        return classify_array(K, L), delta_zz_closed(K, L)

    blocks = pmap(row_block, np.array_split(np.arange(resolution), 8), workers)
    codes = np.vstack([b[0] for b in blocks])
    dzz = np.vstack([b[1] for b in blocks])
    return RegionMap(resolution, centres, centres.copy(), codes, dzz)
