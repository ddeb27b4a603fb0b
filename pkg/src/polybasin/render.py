"""Basin-of-attraction rendering for complex polynomials.

Every pixel of a window is used as a starting point for the chosen
iteration scheme; converged pixels are labeled with the nearest root
(roots come from the simultaneous root finder, in deterministic order)
and shaded by iteration count, non-converged pixels are black.

The per-pixel contract is exactly `schemes.run_orbit`, but running 360k
pure-Python orbits is too slow, so the grid engine below re-implements
each scheme step with flat numpy arrays of real and imaginary parts. The
formulas copy CPython's complex arithmetic operation for operation
(including Smith's algorithm for division), which makes the grid results
bit-identical to scalar orbits; the test suite cross-checks the two paths
pixel by pixel. For the same reason magnitudes use sqrt(re^2+im^2) and
integer powers use the binary multiply chain from `schemes`.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .poly import Polynomial, find_roots
from .schemes import (FLOOR_SCALE, Chain, NewtonMap, Sen, SenMap, SHybrid,
                      StopRule, build_map)


@dataclass(frozen=True)
class Window:
    re_min: float
    re_max: float
    im_min: float
    im_max: float

    def __post_init__(self):
        if not (self.re_min < self.re_max and self.im_min < self.im_max):
            raise ValueError(f"degenerate window {self}")


# The square the experiments use.
PAPER_WINDOW = Window(-1.5, 1.5, -1.5, 1.5)


@dataclass(frozen=True)
class RenderConfig:
    polynomial: Polynomial
    scheme: object
    window: Window = PAPER_WINDOW
    width: int = 600
    height: int = 600
    stop: StopRule = StopRule(criterion="displacement", eps=1e-3, max_iter=12)
    root_tol: float = 1e-12

    def __post_init__(self):
        if self.width < 1 or self.height < 1:
            raise ValueError("raster must be at least 1x1")
        if self.polynomial.degree < 1:
            raise ValueError("polynomial degree >= 1 required")


@dataclass(frozen=True, eq=False)
class BasinImage:
    """Per-pixel (root index, iteration count) grid.

    root_index is -1 where the orbit did not converge within the cap; such
    cells carry iterations == max_iter. Arrays are row-major with row 0 at
    the top of the window.
    """

    width: int
    height: int
    root_index: np.ndarray
    iterations: np.ndarray
    roots: tuple = field(default=())

    def cell(self, row: int, col: int):
        r = int(self.root_index[row, col])
        return (None if r < 0 else r), int(self.iterations[row, col])

    def basin_count(self) -> int:
        return len(np.unique(self.root_index[self.root_index >= 0]))

    def __eq__(self, other):
        if not isinstance(other, BasinImage):
            return NotImplemented
        return (self.width == other.width and self.height == other.height
                and np.array_equal(self.root_index, other.root_index)
                and np.array_equal(self.iterations, other.iterations)
                and self.roots == other.roots)


def _axes(config: RenderConfig):
    w = config.window
    hre = (w.re_max - w.re_min) / config.width
    him = (w.im_max - w.im_min) / config.height
    cre = (w.re_min + w.re_max) / 2.0
    cim = (w.im_min + w.im_max) / 2.0
    return hre, him, cre, cim


def pixel_to_point(config: RenderConfig, col: int, row: int) -> complex:
    """Center of pixel (col, row); row 0 is the top of the window.

    Computed as an offset from the window center so that mirror rows of a
    symmetric window land on exactly conjugate points.
    """
    if not (0 <= col < config.width and 0 <= row < config.height):
        raise IndexError(f"pixel ({col}, {row}) outside "
                         f"{config.width}x{config.height}")
    hre, him, cre, cim = _axes(config)
    re = cre + ((col + 0.5) - config.width / 2.0) * hre
    im = cim + ((config.height / 2.0 - row) - 0.5) * him
    return complex(re, im)


def nearest_root_index(roots, z: complex) -> int:
    """Index of the root closest to z (squared distance, first wins ties)."""
    best = 0
    best_d = None
    for i, r in enumerate(roots):
        dre = z.real - r.real
        dim = z.imag - r.imag
        d = dre * dre + dim * dim
        if best_d is None or d < best_d:
            best, best_d = i, d
    return best


# ---------------------------------------------------------------------------
# Grid engine: numpy mirror of the scalar steps in schemes.py.
# ---------------------------------------------------------------------------

def _v_mag(re, im):
    return np.sqrt(re * re + im * im)


def _v_ipow(x, n: int):
    r = np.ones_like(x)
    b = x
    while n:
        if n & 1:
            r = r * b
        n >>= 1
        if n:
            b = b * b
    return r


def _v_horner(coeffs, zre, zim):
    c = coeffs[-1]
    vre = np.full_like(zre, c.real)
    vim = np.full_like(zre, c.imag)
    for c in coeffs[-2::-1]:
        t = vre * zre - vim * zim
        vim = vre * zim + vim * zre
        vre = t
        if c.real != 0.0:
            vre = vre + c.real
        if c.imag != 0.0:
            vim = vim + c.imag
    return vre, vim


def _v_div(are, aim, bre, bim):
    # Smith's algorithm, branch and operation order as in CPython.
    cond = np.abs(bre) >= np.abs(bim)
    r1 = bim / bre
    d1 = bre + bim * r1
    qre1 = (are + aim * r1) / d1
    qim1 = (aim - are * r1) / d1
    r2 = bre / bim
    d2 = bre * r2 + bim
    qre2 = (are * r2 + aim) / d2
    qim2 = (aim * r2 - are) / d2
    return np.where(cond, qre1, qre2), np.where(cond, qim1, qim2)


def _v_floor(map_, zre, zim):
    return FLOOR_SCALE * (1.0 + _v_ipow(_v_mag(zre, zim), map_.p.degree - 1))


def _v_newton(map_, zre, zim):
    pre, pim = _v_horner(map_.p.coeffs, zre, zim)
    dre, dim = _v_horner(map_.dp.coeffs, zre, zim)
    ok = _v_mag(dre, dim) > _v_floor(map_, zre, zim)
    qre, qim = _v_div(pre, pim, dre, dim)
    return zre - qre, zim - qim, ok


def _v_convex(t, zre, zim, nre, nim):
    s = 1.0 - t
    return s * zre + t * nre, s * zim + t * nim


def _v_step(scheme, map_, zre, zim):
    """One outer scheme iteration on flat arrays; ok=False marks lanes that
    hit the derivative floor at any stage (their values are garbage)."""
    if isinstance(scheme, Chain):
        ok = np.ones(zre.shape, dtype=bool)
        for t in scheme.weights:
            nre, nim, ok_s = _v_newton(map_, zre, zim)
            ok &= ok_s
            zre, zim = _v_convex(t, zre, zim, nre, nim)
        return zre, zim, ok
    if isinstance(scheme, SHybrid):
        nre, nim, ok = _v_newton(map_, zre, zim)
        yre, yim = _v_convex(scheme.beta, zre, zim, nre, nim)
        mre, mim, ok_y = _v_newton(map_, yre, yim)
        ok = ok & ok_y
        s = 1.0 - scheme.alpha
        return (s * nre + scheme.alpha * mre,
                s * nim + scheme.alpha * mim, ok)
    if isinstance(scheme, Sen):
        if not isinstance(map_, SenMap):
            raise TypeError("Sen scheme requires a SenMap")
        pre, pim = _v_horner(map_.p.coeffs, zre, zim)
        dre, dim = _v_horner(map_.dp.coeffs, zre, zim)
        floor = _v_floor(map_, zre, zim)
        ok = _v_mag(dre, dim) > floor
        sign = np.sign(dre)
        den_re = dre + sign * map_.m_bound
        ok &= _v_mag(den_re, dim) > floor
        qre, qim = _v_div(2.0 * pre, 2.0 * pim, den_re, dim)
        return zre - qre, zim - qim, ok
    raise TypeError(f"unknown scheme {scheme!r}")


def _grid_orbit(scheme, map_, zre, zim, stop: StopRule):
    """Run orbits for a flat array of starting points.

    Returns (converged, iterations, final_re, final_im); non-converged
    lanes (cap reached or derivative floor) report iterations = max_iter.
    """
    n_pix = zre.shape[0]
    converged = np.zeros(n_pix, dtype=bool)
    iters = np.full(n_pix, stop.max_iter, dtype=np.int32)
    fre = zre.copy()
    fim = zim.copy()
    active = np.arange(n_pix)
    with np.errstate(all="ignore"):
        for n in range(1, stop.max_iter + 1):
            z1re, z1im, ok = _v_step(scheme, map_, zre, zim)
            if stop.criterion == "displacement":
                dre = z1re - zre
                dim = z1im - zim
                hit = _v_mag(dre, dim) < stop.eps
            else:
                pre, pim = _v_horner(map_.p.coeffs, z1re, z1im)
                hit = _v_mag(pre, pim) < stop.eps
            hit &= ok
            if hit.any():
                lanes = active[hit]
                converged[lanes] = True
                iters[lanes] = n
                fre[lanes] = z1re[hit]
                fim[lanes] = z1im[hit]
            keep = ok & ~hit
            if not keep.any():
                break
            active = active[keep]
            zre = z1re[keep]
            zim = z1im[keep]
    return converged, iters, fre, fim


def _label(roots, converged, fre, fim):
    idx = np.full(converged.shape, -1, dtype=np.int32)
    if converged.any():
        cre = fre[converged]
        cim = fim[converged]
        d2 = np.empty((len(roots), cre.shape[0]))
        for i, r in enumerate(roots):
            dre = cre - r.real
            dim = cim - r.imag
            d2[i] = dre * dre + dim * dim
        idx[converged] = np.argmin(d2, axis=0).astype(np.int32)
    return idx


def render(config: RenderConfig, workers: int = 1) -> BasinImage:
    """Render the basin image for config.

    ``workers`` > 1 evaluates horizontal bands of rows concurrently; the
    output is byte-identical for any worker count because every pixel's
    orbit is independent of banding.
    """
    rootset = find_roots(config.polynomial, config.root_tol)
    map_ = build_map(config.scheme, config.polynomial)
    hre, him, cre_c, cim_c = _axes(config)
    W, H = config.width, config.height
    cols = np.arange(W, dtype=np.float64)
    rows = np.arange(H, dtype=np.float64)
    revals = cre_c + ((cols + 0.5) - W / 2.0) * hre
    imvals = cim_c + ((H / 2.0 - rows) - 0.5) * him

    converged = np.empty(W * H, dtype=bool)
    iters = np.empty(W * H, dtype=np.int32)
    fre = np.empty(W * H, dtype=np.float64)
    fim = np.empty(W * H, dtype=np.float64)

    def do_band(r0: int, r1: int):
        zre = np.tile(revals, r1 - r0)
        zim = np.repeat(imvals[r0:r1], W)
        c, it, fr, fi = _grid_orbit(config.scheme, map_, zre, zim, config.stop)
        lo, hi = r0 * W, r1 * W
        converged[lo:hi] = c
        iters[lo:hi] = it
        fre[lo:hi] = fr
        fim[lo:hi] = fi

    workers = max(1, int(workers))
    bounds = [(H * i // workers, H * (i + 1) // workers) for i in range(workers)]
    bounds = [(r0, r1) for r0, r1 in bounds if r1 > r0]
    if len(bounds) == 1:
        do_band(*bounds[0])
    else:
        with ThreadPoolExecutor(max_workers=len(bounds)) as pool:
            list(pool.map(lambda b: do_band(*b), bounds))

    root_index = _label(rootset.roots, converged, fre, fim)
    return BasinImage(width=W, height=H,
                      root_index=root_index.reshape(H, W),
                      iterations=iters.reshape(H, W),
                      roots=rootset.roots)


# ---------------------------------------------------------------------------
# Coloring and output.
# ---------------------------------------------------------------------------

def hsv_to_rgb8(h: float, s: float, v: float):
    """Standard HSV sector formula, channels rounded half-up to 0..255."""
    h6 = h / 60.0
    sector = int(math.floor(h6)) % 6
    f = h6 - math.floor(h6)
    p = v * (1.0 - s)
    q = v * (1.0 - f * s)
    t = v * (1.0 - (1.0 - f) * s)
    rgb = ((v, t, p), (q, v, p), (p, v, t),
           (p, q, v), (t, p, v), (v, p, q))[sector]
    return tuple(int(math.floor(255.0 * c + 0.5)) for c in rgb)


def colorize(image: BasinImage, k: int, degree: int) -> np.ndarray:
    """RGB grid: hue from root index, brightness fading with iteration
    count (v = 1 - 0.7*n/k); non-converged cells are black."""
    if int(image.root_index.max(initial=-1)) >= degree:
        raise ValueError("root index out of range for given degree")
    lut = np.zeros((degree, k + 1, 3), dtype=np.uint8)
    for r in range(degree):
        hue = 360.0 * r / degree
        for n in range(k + 1):
            v = 1.0 - 0.7 * (n / k)
            lut[r, n] = hsv_to_rgb8(hue, 1.0, v)
    rgb = np.zeros((image.height, image.width, 3), dtype=np.uint8)
    mask = image.root_index >= 0
    rgb[mask] = lut[image.root_index[mask], np.minimum(image.iterations[mask], k)]
    return rgb


def write_ppm(rgb: np.ndarray, sink=None) -> bytes:
    """Binary PPM (P6, maxval 255): rows top to bottom, pixels left to
    right, 3 bytes each. Returns the bytes; also writes them when sink is
    a path or a binary file object."""
    if rgb.ndim != 3 or rgb.shape[2] != 3 or rgb.dtype != np.uint8:
        raise ValueError("expected a (height, width, 3) uint8 array")
    h, w, _ = rgb.shape
    data = f"P6\n{w} {h}\n255\n".encode("ascii") + rgb.tobytes()
    if sink is not None:
        if hasattr(sink, "write"):
            sink.write(data)
        else:
            with open(sink, "wb") as fh:
                fh.write(data)
    return data


def basin_dump(image: BasinImage) -> str:
    """Plain-text dump: one `row col root_index iterations` line per pixel,
    '-' as the root index of non-converged pixels."""
    lines = []
    for row in range(image.height):
        for col in range(image.width):
            r, n = image.cell(row, col)
            lines.append(f"{row} {col} {'-' if r is None else r} {n}")
    return "\n".join(lines) + "\n"
