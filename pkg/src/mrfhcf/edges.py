"""Edge labeling on images: site lattice, potentials, likelihoods, fixtures.

An edge site sits between two adjacent pixels and takes one of two labels,
non-edge (0) or edge (1). Vertical sites separate horizontally adjacent
pixels and are numbered first, row-major; horizontal sites separate
vertically adjacent pixels and follow, also row-major. Every site has a
second-order neighborhood: the six other sites sharing one of its two
endpoints plus the two nearest parallel sites of the same orientation, so
interior sites have exactly eight neighbors.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .core import Clique, DataTerm, Field

NON_EDGE = 0
EDGE = 1
LABEL_LETTERS = ("n", "e")


class Image:
    """8-bit greyscale image; ``pixels[y, x]`` in 0..255, frozen after construction."""

    def __init__(self, pixels):
        p = np.asarray(pixels)
        if p.ndim != 2 or p.shape[0] < 1 or p.shape[1] < 1:
            raise ValueError("image pixels must form a non-empty 2-D array")
        if p.dtype != np.uint8:
            if not np.issubdtype(p.dtype, np.integer):
                raise ValueError("image pixels must be integers")
            if p.min() < 0 or p.max() > 255:
                raise ValueError("image pixels must lie in 0..255")
            p = p.astype(np.uint8)
        else:
            p = p.copy()
        p.setflags(write=False)
        self.pixels = p

    @property
    def height(self) -> int:
        return self.pixels.shape[0]

    @property
    def width(self) -> int:
        return self.pixels.shape[1]

    def __repr__(self):
        return f"Image({self.width}x{self.height})"


@dataclass(frozen=True)
class EdgePotentials:
    """Clique energies of the edge prior; only all-edge entries are nonzero.

    ``continuity`` rewards collinear edge pairs (expected negative);
    ``turn`` penalizes perpendicular endpoint-sharing edge pairs,
    ``parallel`` penalizes close parallel edge pairs, and ``edge_prior``
    is the unary cost of declaring an edge at all (all expected positive).
    Unexpected signs only warn: they are legal, just unusual.
    """
    continuity: float = -0.5
    turn: float = 0.3
    parallel: float = 0.3
    edge_prior: float = 0.4

    def __post_init__(self):
        for name in ("continuity", "turn", "parallel", "edge_prior"):
            if not math.isfinite(getattr(self, name)):
                raise ValueError(f"{name} must be finite")
        if self.continuity >= 0:
            warnings.warn("continuity is usually negative (it rewards collinear edges)")
        for name in ("turn", "parallel", "edge_prior"):
            if getattr(self, name) <= 0:
                warnings.warn(f"{name} is usually positive (it discourages clutter)")


@dataclass(frozen=True)
class EdgeModel:
    """Two-Gaussian step model behind the log likelihood ratio.

    ``mu_e`` is the expected absolute intensity step across a true edge and
    ``sigma`` the pixel noise standard deviation. The defaults match the
    default checkerboard generator (contrast 192 - 64, noise 8).
    """
    mu_e: float = 128.0
    sigma: float = 8.0

    def __post_init__(self):
        if not (math.isfinite(self.mu_e) and self.mu_e > 0):
            raise ValueError("mu_e must be a positive real")
        if not (math.isfinite(self.sigma) and self.sigma > 0):
            raise ValueError("sigma must be a positive real")


class EdgeLattice:
    """Site indexing for the edge lattice of a ``width`` x ``height`` image.

    Vertical site (x, y) sits between pixels (x, y) and (x+1, y) and has id
    ``y*(width-1) + x``; horizontal site (x, y) sits between pixels (x, y)
    and (x, y+1) and has id ``num_vertical + y*width + x``.
    """

    def __init__(self, width: int, height: int):
        if width < 2 or height < 2:
            raise ValueError("edge lattice needs width and height of at least 2")
        self.width = int(width)
        self.height = int(height)
        self.num_vertical = (self.width - 1) * self.height
        self.num_horizontal = self.width * (self.height - 1)
        self.num_sites = self.num_vertical + self.num_horizontal

    def vertical_id(self, x: int, y: int) -> int:
        if not (0 <= x < self.width - 1 and 0 <= y < self.height):
            raise ValueError(f"no vertical site at ({x}, {y})")
        return y * (self.width - 1) + x

    def horizontal_id(self, x: int, y: int) -> int:
        if not (0 <= x < self.width and 0 <= y < self.height - 1):
            raise ValueError(f"no horizontal site at ({x}, {y})")
        return self.num_vertical + y * self.width + x

    def site_info(self, site: int) -> tuple[str, int, int]:
        """Orientation ("v" or "h") and lattice coordinates of a site id."""
        if not 0 <= site < self.num_sites:
            raise ValueError(f"site {site} out of range")
        if site < self.num_vertical:
            return ("v", site % (self.width - 1), site // (self.width - 1))
        rest = site - self.num_vertical
        return ("h", rest % self.width, rest // self.width)

    def pixel_pair(self, site: int) -> tuple[tuple[int, int], tuple[int, int]]:
        """The two (x, y) pixels the site separates."""
        kind, x, y = self.site_info(site)
        if kind == "v":
            return ((x, y), (x + 1, y))
        return ((x, y), (x, y + 1))

    def neighbors(self, site: int) -> tuple[int, ...]:
        """Second-order neighborhood: 6 endpoint-sharing sites + 2 parallels."""
        kind, x, y = self.site_info(site)
        w, h = self.width, self.height
        out = []
        if kind == "v":
            if y > 0:
                out.append(self.vertical_id(x, y - 1))
                out.append(self.horizontal_id(x, y - 1))
                out.append(self.horizontal_id(x + 1, y - 1))
            if y < h - 1:
                out.append(self.vertical_id(x, y + 1))
                out.append(self.horizontal_id(x, y))
                out.append(self.horizontal_id(x + 1, y))
            if x > 0:
                out.append(self.vertical_id(x - 1, y))
            if x < w - 2:
                out.append(self.vertical_id(x + 1, y))
        else:
            if x > 0:
                out.append(self.horizontal_id(x - 1, y))
                out.append(self.vertical_id(x - 1, y))
                out.append(self.vertical_id(x - 1, y + 1))
            if x < w - 1:
                out.append(self.horizontal_id(x + 1, y))
                out.append(self.vertical_id(x, y))
                out.append(self.vertical_id(x, y + 1))
            if y > 0:
                out.append(self.horizontal_id(x, y - 1))
            if y < h - 2:
                out.append(self.horizontal_id(x, y + 1))
        return tuple(sorted(out))


def build_edge_field(width: int, height: int,
                     potentials: EdgePotentials | None = None) -> Field:
    """Edge-labeling field for a ``width`` x ``height`` image.

    Instantiates one unary clique per site (edge prior), pair cliques for
    collinear continuations, endpoint-sharing turns, and nearest parallel
    runs. The four potential tables are shared across all cliques of their
    family.
    """
    if potentials is None:
        potentials = EdgePotentials()
    lattice = EdgeLattice(width, height)
    w, h = lattice.width, lattice.height

    unary = np.array([0.0, potentials.edge_prior])
    cont = np.zeros((2, 2))
    cont[EDGE, EDGE] = potentials.continuity
    turn = np.zeros((2, 2))
    turn[EDGE, EDGE] = potentials.turn
    par = np.zeros((2, 2))
    par[EDGE, EDGE] = potentials.parallel

    cliques = [Clique((s,), unary) for s in range(lattice.num_sites)]
    for y in range(h - 1):
        for x in range(w - 1):
            cliques.append(Clique((lattice.vertical_id(x, y),
                                   lattice.vertical_id(x, y + 1)), cont))
    for y in range(h - 1):
        for x in range(w - 1):
            cliques.append(Clique((lattice.horizontal_id(x, y),
                                   lattice.horizontal_id(x + 1, y)), cont))
    for y in range(h):
        for x in range(w - 1):
            v = lattice.vertical_id(x, y)
            for hx, hy in ((x, y - 1), (x + 1, y - 1), (x, y), (x + 1, y)):
                if 0 <= hy < h - 1:
                    cliques.append(Clique((v, lattice.horizontal_id(hx, hy)), turn))
    for y in range(h):
        for x in range(w - 2):
            cliques.append(Clique((lattice.vertical_id(x, y),
                                   lattice.vertical_id(x + 1, y)), par))
    for y in range(h - 2):
        for x in range(w):
            cliques.append(Clique((lattice.horizontal_id(x, y),
                                   lattice.horizontal_id(x, y + 1)), par))

    adjacency = [lattice.neighbors(s) for s in range(lattice.num_sites)]
    return Field(lattice.num_sites, 2, adjacency, cliques)


def edge_llr(image: Image, model: EdgeModel) -> np.ndarray:
    """Log likelihood ratio edge vs non-edge per site, in site-id order.

    With absolute pixel difference d across the site, the ratio of the two
    Gaussians N(d; mu_e, sigma) and N(d; 0, sigma) reduces to
    mu_e * (2d - mu_e) / (2 sigma^2): negative at d = 0, zero at d = mu_e/2,
    positive at d = mu_e.
    """
    img = image.pixels.astype(np.int64)
    dv = np.abs(np.diff(img, axis=1)).ravel()
    dh = np.abs(np.diff(img, axis=0)).ravel()
    d = np.concatenate([dv, dh]).astype(np.float64)
    return model.mu_e * (2.0 * d - model.mu_e) / (2.0 * model.sigma ** 2)


def llr_data_term(llr) -> DataTerm:
    """Data term from per-site log likelihood ratios: D(e) = -LLR, D(n) = 0."""
    arr = np.asarray(llr, dtype=np.float64)
    if arr.ndim != 1:
        raise ValueError("llr must be a flat per-site array")
    values = np.zeros((arr.shape[0], 2))
    values[:, EDGE] = -arr
    return DataTerm(values)


def compute_llr(image: Image, model: EdgeModel | None = None) -> DataTerm:
    """Edge/non-edge data term of an image under the step model."""
    if model is None:
        model = EdgeModel()
    return llr_data_term(edge_llr(image, model))


def make_checkerboard(width: int, height: int, square: int, low: int, high: int,
                      noise_sigma: float, seed: int) -> Image:
    """Checkerboard test image with seeded Gaussian noise.

    The square at the origin has intensity ``low``; noise is added before
    rounding and clamping to 0..255, so the same seed always reproduces the
    same image byte for byte.
    """
    if width < 1 or height < 1:
        raise ValueError("width and height must be positive")
    if square < 1:
        raise ValueError("square must be a positive integer")
    if not (0 <= low < high <= 255):
        raise ValueError("need 0 <= low < high <= 255")
    if not (math.isfinite(noise_sigma) and noise_sigma >= 0):
        raise ValueError("noise_sigma must be non-negative")
    yy = np.arange(height)[:, None] // square
    xx = np.arange(width)[None, :] // square
    board = np.where((yy + xx) % 2 == 0, float(low), float(high))
    if noise_sigma > 0:
        board = board + np.random.default_rng(seed).normal(0.0, noise_sigma, board.shape)
    return Image(np.clip(np.rint(board), 0, 255).astype(np.uint8))


_CHAIN_LLR = (4.0, -0.2, -0.4, -0.5, -0.3, 0.1, -0.3, -0.4)


def make_chain_fixture() -> tuple[Field, DataTerm]:
    """Eight-site chain with hand-checkable energies, used by golden tests.

    Consecutive sites are neighbors joined by a shared pair potential that
    rewards agreement (-0.5 on (n,n) and (e,e)) and penalizes breaks (+1 on
    (n,e) and (e,n)); there are no unary cliques. The data term encodes the
    fixed log likelihood ratios 4, -0.2, -0.4, -0.5, -0.3, 0.1, -0.3, -0.4
    as D(e) = -LLR, D(n) = 0.
    """
    n = len(_CHAIN_LLR)
    adjacency = [tuple(r for r in (s - 1, s + 1) if 0 <= r < n) for s in range(n)]
    table = np.array([[-0.5, 1.0], [1.0, -0.5]])
    cliques = [Clique((s, s + 1), table) for s in range(n - 1)]
    values = np.zeros((n, 2))
    values[:, EDGE] = [-llr for llr in _CHAIN_LLR]
    return Field(n, 2, adjacency, cliques), DataTerm(values)


def render_overlay(image: Image, config) -> Image:
    """Edge labeling drawn as black pixels on a doubled grid.

    Pixel (x, y) lands at (2x+1, 2y+1); a site labeled edge blackens the
    cell between its two pixels; everything else is white.
    """
    h, w = image.height, image.width
    lattice = EdgeLattice(w, h)
    cfg = np.asarray(config)
    if cfg.shape != (lattice.num_sites,):
        raise ValueError(f"configuration has {cfg.shape} entries for "
                         f"{lattice.num_sites} sites")
    canvas = np.full((2 * h + 1, 2 * w + 1), 255, dtype=np.uint8)
    canvas[1::2, 1::2] = image.pixels
    for s in np.flatnonzero(cfg == EDGE):
        kind, x, y = lattice.site_info(int(s))
        if kind == "v":
            canvas[2 * y + 1, 2 * x + 2] = 0
        else:
            canvas[2 * y + 2, 2 * x + 1] = 0
    return Image(canvas)
