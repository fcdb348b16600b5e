"""Boundary signals as truncated Fourier coefficients.

Signals on the unit circle (or the 2-torus) are represented canonically by
truncated Fourier coefficient arrays; uniform boundary sample grids are
derived views computed with the FFT.  Under this representation the Hardy
space condition is simply that negative-frequency coefficients vanish, and
all inner products reduce to coefficient dot products by Parseval.

The module also houses the polar search grid and the deterministic
grid-argmax engine shared by every maximal-selection routine in the package.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConfigError, DegenerateInputError, DimensionMismatchError, DomainError

__all__ = [
    "FourierCoeffs1D",
    "FourierCoeffs2D",
    "BoundaryGrid",
    "QuadrantParts",
    "GridSpec",
    "next_pow2",
    "inner_product_1d",
    "inner_product_2d",
    "hilbert_transform",
    "analytic_part",
    "quadrant_split",
    "real_reconstruct_2d",
    "grid_points",
    "grid_argmax",
    "grid_argmax_pairs",
]


def next_pow2(n):
    """Smallest power of two >= n."""
    p = 1
    while p < n:
        p *= 2
    return p


def _boundary_nodes(size):
    return 2.0 * np.pi * np.arange(size) / size


class FourierCoeffs1D:
    """Truncated Fourier coefficients of a boundary signal on the circle.

    Layout: Hardy instances store ``data[k] = c_k`` for ``k = 0..N``; full
    instances store ``data[k + N] = c_k`` for ``k = -N..N``.  Instances are
    treated as immutable; operations return new objects.

    Parameters
    ----------
    data : array_like of complex
        Coefficient array in the layout above.
    hardy : bool
        Whether the instance represents a Hardy-space signal (no negative
        frequencies stored).
    """

    __slots__ = ("data", "hardy")

    def __init__(self, data, hardy=False):
        data = np.asarray(data, dtype=complex)
        if data.ndim != 1 or data.size == 0:
            raise DimensionMismatchError("expected a nonempty 1-d coefficient array")
        if not hardy and data.size % 2 == 0:
            raise DimensionMismatchError(
                "full-range coefficients must have odd length 2N+1, got %d" % data.size
            )
        self.data = data
        self.hardy = bool(hardy)

    @property
    def order(self):
        """Truncation order N."""
        if self.hardy:
            return self.data.size - 1
        return (self.data.size - 1) // 2

    @classmethod
    def zeros(cls, order, hardy=False):
        size = order + 1 if hardy else 2 * order + 1
        return cls(np.zeros(size, dtype=complex), hardy=hardy)

    @classmethod
    def from_terms(cls, order, terms, hardy=False):
        """Build coefficients from a ``{frequency: value}`` mapping."""
        out = cls.zeros(order, hardy=hardy)
        for k, val in terms.items():
            if hardy and not 0 <= k <= order:
                raise DomainError("frequency %d outside Hardy range 0..%d" % (k, order))
            if not hardy and abs(k) > order:
                raise DomainError("frequency %d outside range -%d..%d" % (k, order, order))
            out.data[k if hardy else k + order] = val
        return out

    def get(self, k):
        """Coefficient c_k, zero outside the stored range."""
        if self.hardy:
            if 0 <= k <= self.order:
                return complex(self.data[k])
            return 0j
        if abs(k) <= self.order:
            return complex(self.data[k + self.order])
        return 0j

    def energy(self):
        """Squared norm sum(|c_k|^2)."""
        return float(np.sum(np.abs(self.data) ** 2))

    def norm(self):
        return float(np.sqrt(self.energy()))

    def copy(self):
        return FourierCoeffs1D(self.data.copy(), hardy=self.hardy)

    def to_full(self):
        """Re-embed into the full -N..N layout."""
        if not self.hardy:
            return self.copy()
        n = self.order
        data = np.zeros(2 * n + 1, dtype=complex)
        data[n:] = self.data
        return FourierCoeffs1D(data, hardy=False)

    def eval_interior(self, points):
        """Evaluate the holomorphic extension at points inside the disc.

        Hardy instances only; uses direct power-series summation of the
        stored coefficients (Horner), valid for |point| < 1.
        """
        if not self.hardy:
            raise DomainError("interior evaluation requires Hardy coefficients")
        pts = np.asarray(points, dtype=complex)
        return np.polynomial.polynomial.polyval(pts, self.data)

    def boundary_samples(self, size):
        """Samples at t_j = 2 pi j / size via the inverse FFT."""
        n = self.order
        needed = n + 1 if self.hardy else 2 * n + 1
        if size < needed:
            raise DimensionMismatchError(
                "grid size %d too small for order %d" % (size, n)
            )
        spectrum = np.zeros(size, dtype=complex)
        if self.hardy:
            spectrum[: n + 1] = self.data
        else:
            spectrum[: n + 1] = self.data[n:]
            spectrum[size - n :] = self.data[:n]
        return np.fft.ifft(spectrum) * size

    @classmethod
    def from_samples(cls, samples, order, hardy=False):
        """FFT of uniform boundary samples, truncated to the given order.

        Exact whenever the sampled signal is bandlimited to ``order`` and
        ``len(samples) >= 2*order + 1``; higher content aliases.
        """
        samples = np.asarray(samples)
        size = samples.size
        if size < 2 * order + 1:
            raise DimensionMismatchError(
                "need at least %d samples for order %d, got %d"
                % (2 * order + 1, order, size)
            )
        spectrum = np.fft.fft(samples) / size
        if hardy:
            return cls(spectrum[: order + 1].copy(), hardy=True)
        data = np.concatenate([spectrum[size - order :], spectrum[: order + 1]])
        return cls(data, hardy=False)

    def __add__(self, other):
        self._check_compatible(other)
        return FourierCoeffs1D(self.data + other.data, hardy=self.hardy)

    def __sub__(self, other):
        self._check_compatible(other)
        return FourierCoeffs1D(self.data - other.data, hardy=self.hardy)

    def __mul__(self, scalar):
        return FourierCoeffs1D(self.data * complex(scalar), hardy=self.hardy)

    __rmul__ = __mul__

    def _check_compatible(self, other):
        if not isinstance(other, FourierCoeffs1D):
            raise TypeError("expected FourierCoeffs1D")
        if other.order != self.order or other.hardy != self.hardy:
            raise DimensionMismatchError("mixed truncation orders or layouts")

    def __repr__(self):
        return "FourierCoeffs1D(order=%d, hardy=%s)" % (self.order, self.hardy)


class FourierCoeffs2D:
    """Truncated Fourier coefficients on the 2-torus.

    Hardy instances store the quadrant block ``data[k, l] = c_kl`` for
    ``0 <= k, l <= N``; full instances store ``data[k + N, l + N]`` over
    ``[-N, N]^2``.  First index pairs with the variable t, second with s.
    """

    __slots__ = ("data", "hardy")

    def __init__(self, data, hardy=False):
        data = np.asarray(data, dtype=complex)
        if data.ndim != 2 or data.shape[0] != data.shape[1] or data.size == 0:
            raise DimensionMismatchError("expected a square coefficient matrix")
        if not hardy and data.shape[0] % 2 == 0:
            raise DimensionMismatchError("full-range matrix must have odd side 2N+1")
        self.data = data
        self.hardy = bool(hardy)

    @property
    def order(self):
        if self.hardy:
            return self.data.shape[0] - 1
        return (self.data.shape[0] - 1) // 2

    @classmethod
    def zeros(cls, order, hardy=False):
        side = order + 1 if hardy else 2 * order + 1
        return cls(np.zeros((side, side), dtype=complex), hardy=hardy)

    @classmethod
    def from_terms(cls, order, terms, hardy=False):
        out = cls.zeros(order, hardy=hardy)
        for (k, l), val in terms.items():
            if hardy and not (0 <= k <= order and 0 <= l <= order):
                raise DomainError("frequency (%d, %d) outside Hardy quadrant" % (k, l))
            if not hardy and (abs(k) > order or abs(l) > order):
                raise DomainError("frequency (%d, %d) outside range" % (k, l))
            if hardy:
                out.data[k, l] = val
            else:
                out.data[k + order, l + order] = val
        return out

    def get(self, k, l):
        n = self.order
        if self.hardy:
            if 0 <= k <= n and 0 <= l <= n:
                return complex(self.data[k, l])
            return 0j
        if abs(k) <= n and abs(l) <= n:
            return complex(self.data[k + n, l + n])
        return 0j

    def energy(self):
        return float(np.sum(np.abs(self.data) ** 2))

    def norm(self):
        return float(np.sqrt(self.energy()))

    def copy(self):
        return FourierCoeffs2D(self.data.copy(), hardy=self.hardy)

    def to_full(self):
        if not self.hardy:
            return self.copy()
        n = self.order
        data = np.zeros((2 * n + 1, 2 * n + 1), dtype=complex)
        data[n:, n:] = self.data
        return FourierCoeffs2D(data, hardy=False)

    def eval_interior(self, a_points, b_points):
        """Holomorphic extension at interior point pairs.

        Returns the matrix ``f(a_i, b_j)`` for Hardy instances.
        """
        if not self.hardy:
            raise DomainError("interior evaluation requires Hardy coefficients")
        n = self.order
        a = np.asarray(a_points, dtype=complex).ravel()
        b = np.asarray(b_points, dtype=complex).ravel()
        pa = a[:, None] ** np.arange(n + 1)[None, :]
        pb = b[:, None] ** np.arange(n + 1)[None, :]
        return pa @ self.data @ pb.T

    def boundary_samples(self, size):
        n = self.order
        needed = n + 1 if self.hardy else 2 * n + 1
        if size < needed:
            raise DimensionMismatchError("grid size %d too small for order %d" % (size, n))
        spectrum = np.zeros((size, size), dtype=complex)
        if self.hardy:
            spectrum[: n + 1, : n + 1] = self.data
        else:
            idx = np.r_[n : 2 * n + 1, 0:n]
            rows = np.r_[0 : n + 1, size - n : size]
            block = self.data[idx][:, idx]
            spectrum[np.ix_(rows, rows)] = block
        return np.fft.ifft2(spectrum) * size * size

    @classmethod
    def from_samples(cls, samples, order, hardy=False):
        samples = np.asarray(samples)
        size = samples.shape[0]
        if samples.ndim != 2 or samples.shape[0] != samples.shape[1]:
            raise DimensionMismatchError("expected a square sample grid")
        if size < 2 * order + 1:
            raise DimensionMismatchError(
                "need a grid side of at least %d for order %d" % (2 * order + 1, order)
            )
        spectrum = np.fft.fft2(samples) / (size * size)
        if hardy:
            return cls(spectrum[: order + 1, : order + 1].copy(), hardy=True)
        idx = np.r_[size - order : size, 0 : order + 1]
        return cls(spectrum[np.ix_(idx, idx)].copy(), hardy=False)

    def __add__(self, other):
        self._check_compatible(other)
        return FourierCoeffs2D(self.data + other.data, hardy=self.hardy)

    def __sub__(self, other):
        self._check_compatible(other)
        return FourierCoeffs2D(self.data - other.data, hardy=self.hardy)

    def __mul__(self, scalar):
        return FourierCoeffs2D(self.data * complex(scalar), hardy=self.hardy)

    __rmul__ = __mul__

    def _check_compatible(self, other):
        if not isinstance(other, FourierCoeffs2D):
            raise TypeError("expected FourierCoeffs2D")
        if other.order != self.order or other.hardy != self.hardy:
            raise DimensionMismatchError("mixed truncation orders or layouts")

    def __repr__(self):
        return "FourierCoeffs2D(order=%d, hardy=%s)" % (self.order, self.hardy)


@dataclass
class BoundaryGrid:
    """Uniform boundary samples, the derived view of a coefficient array."""

    samples: np.ndarray

    @property
    def size(self):
        return self.samples.shape[0]

    def nodes(self):
        return _boundary_nodes(self.size)


@dataclass
class QuadrantParts:
    """Quadrant frequency projections of a real signal on the 2-torus.

    Axis coefficients (k = 0 or l = 0) belong to every adjacent quadrant;
    the overlap is corrected exactly by the marginal means ``F``, ``G`` and
    the mean ``c00`` through the identity  f + F + G + c00 = fpp + fpm +
    fmp + fmm  (in coefficients).
    """

    fpp: FourierCoeffs2D
    fpm: FourierCoeffs2D
    fmp: FourierCoeffs2D
    fmm: FourierCoeffs2D
    F: FourierCoeffs1D
    G: FourierCoeffs1D
    c00: complex

    def hardy_pp(self):
        """The (k, l) >= 0 part as a Hardy coefficient block."""
        n = self.fpp.order
        return FourierCoeffs2D(self.fpp.data[n:, n:].copy(), hardy=True)

    def hardy_pm(self):
        """The reflected part [f(., -.)]^{++}, a Hardy coefficient block."""
        n = self.fpm.order
        block = self.fpm.data[n:, : n + 1][:, ::-1]
        return FourierCoeffs2D(block.copy(), hardy=True)


def _aligned_1d(f, g):
    if f.order != g.order:
        raise DimensionMismatchError(
            "mismatched truncation orders %d and %d" % (f.order, g.order)
        )
    if f.hardy == g.hardy:
        return f.data, g.data
    lhs = f.to_full().data if f.hardy else f.data
    rhs = g.to_full().data if g.hardy else g.data
    return lhs, rhs


def inner_product_1d(f, g):
    """Hermitian inner product sum_k c_k(f) conj(c_k(g)).

    By Parseval this equals (1/2pi) int f conj(g) dt on the boundary.
    """
    fd, gd = _aligned_1d(f, g)
    return complex(np.vdot(gd, fd))


def inner_product_2d(f, g):
    """Double-sum inner product, the 2-torus analogue of inner_product_1d."""
    if f.order != g.order:
        raise DimensionMismatchError(
            "mismatched truncation orders %d and %d" % (f.order, g.order)
        )
    if f.hardy == g.hardy:
        fd, gd = f.data, g.data
    else:
        fd = f.to_full().data if f.hardy else f.data
        gd = g.to_full().data if g.hardy else g.data
    return complex(np.vdot(gd.ravel(), fd.ravel()))


def hilbert_transform(f):
    """Fourier multiplier -i sgn(k) applied coefficientwise; sgn(0) = 0."""
    n = f.order
    k = np.arange(0, n + 1) if f.hardy else np.arange(-n, n + 1)
    mult = -1j * np.sign(k)
    return FourierCoeffs1D(f.data * mult, hardy=f.hardy)


def _hermitian_defect_1d(data):
    return float(np.max(np.abs(data - np.conj(data[::-1]))))


def _hermitian_defect_2d(data):
    return float(np.max(np.abs(data - np.conj(data[::-1, ::-1]))))


def analytic_part(f, tol=1e-9):
    """Project a real-valued signal onto its analytic (Hardy) part.

    Keeps the coefficients with k >= 0, which realizes (f + iHf)/2 + c_0/2.
    The original signal is recovered on the grid as 2 Re f^+ - c_0.

    Raises
    ------
    DomainError
        If the input is not in the full layout or the coefficients fail the
        Hermitian symmetry c_{-k} = conj(c_k) beyond ``tol`` (relative).
    """
    if f.hardy:
        raise DomainError("analytic_part expects full-range coefficients")
    scale = max(1.0, float(np.max(np.abs(f.data))))
    if _hermitian_defect_1d(f.data) > tol * scale:
        raise DomainError("coefficients are not Hermitian symmetric (signal not real)")
    n = f.order
    return FourierCoeffs1D(f.data[n:].copy(), hardy=True)


def quadrant_split(f, tol=1e-9):
    """Split a real signal on the 2-torus into quadrant projections.

    Returns the four quadrant restrictions (axes included in every adjacent
    quadrant) together with the marginal means F (average over s), G
    (average over t) and the scalar mean c00.
    """
    if f.hardy:
        raise DomainError("quadrant_split expects full-range coefficients")
    scale = max(1.0, float(np.max(np.abs(f.data))))
    if _hermitian_defect_2d(f.data) > tol * scale:
        raise DomainError("coefficients are not Hermitian symmetric (signal not real)")
    n = f.order
    d = f.data

    def _mask(rows, cols):
        out = np.zeros_like(d)
        out[np.ix_(rows, cols)] = d[np.ix_(rows, cols)]
        return FourierCoeffs2D(out, hardy=False)

    pos = np.arange(n, 2 * n + 1)
    neg = np.arange(0, n + 1)
    fpp = _mask(pos, pos)
    fpm = _mask(pos, neg)
    fmp = _mask(neg, pos)
    fmm = _mask(neg, neg)
    F = FourierCoeffs1D(d[:, n].copy(), hardy=False)
    G = FourierCoeffs1D(d[n, :].copy(), hardy=False)
    return QuadrantParts(fpp, fpm, fmp, fmm, F, G, complex(d[n, n]))


def real_reconstruct_2d(parts, size=None):
    """Rebuild the real signal from its quadrant parts on a boundary grid.

    Evaluates  2 Re{f^{++}}(t, s) + 2 Re{[f(., -.)]^{++}}(t, -s)
    - 2 Re{F^+}(t) - 2 Re{G^+}(s) + c00.
    """
    n = parts.fpp.order
    if size is None:
        size = next_pow2(2 * n + 2)
    app = parts.hardy_pp().boundary_samples(size)
    apm = parts.hardy_pm().boundary_samples(size)
    apm_neg_s = apm[:, (-np.arange(size)) % size]
    fp = analytic_part(parts.F).boundary_samples(size)
    gp = analytic_part(parts.G).boundary_samples(size)
    recon = (
        2.0 * app.real
        + 2.0 * apm_neg_s.real
        - 2.0 * fp.real[:, None]
        - 2.0 * gp.real[None, :]
        + parts.c00.real
    )
    return BoundaryGrid(recon)


@dataclass(frozen=True)
class GridSpec:
    """Polar search grid over the unit disc.

    Radii are Chebyshev-spaced in (0, max_radius] (clustered near both 0 and
    max_radius), angles are uniform, and the center point 0 is always
    included.  Refinement levels halve the local cell around the running
    argmax.  Candidate order, and hence every tie-break, is lexicographic in
    (radius, angle).
    """

    radial_count: int = 48
    angular_count: int = 96
    refine_levels: int = 2
    max_radius: float = 0.995

    def __post_init__(self):
        if self.radial_count < 1 or self.angular_count < 1:
            raise ConfigError("grid needs at least one radius and one angle")
        if self.refine_levels < 0:
            raise ConfigError("refine_levels must be nonnegative")
        if not 0.0 < self.max_radius < 1.0:
            raise ConfigError("max_radius must lie strictly inside (0, 1)")


def grid_radii(spec):
    """Chebyshev-spaced radii in (0, max_radius], ascending."""
    i = np.arange(spec.radial_count)
    radii = spec.max_radius * (1.0 + np.cos(np.pi * i / spec.radial_count)) / 2.0
    return radii[::-1].copy()


def grid_points(spec):
    """Coarse grid points in deterministic (radius, angle) order.

    The center 0 comes first, then each radius in ascending order with its
    full ring of angles ascending in [0, 2 pi).
    """
    radii = grid_radii(spec)
    angles = 2.0 * np.pi * np.arange(spec.angular_count) / spec.angular_count
    ring = np.exp(1j * angles)
    pts = (radii[:, None] * ring[None, :]).ravel()
    return np.concatenate([[0j], pts])


def _eval_objective(objective, pts):
    try:
        vals = np.asarray(objective(pts), dtype=float)
        if vals.shape == pts.shape:
            return vals
    except Exception:
        pass
    return np.asarray([float(objective(p)) for p in pts], dtype=float)


def _refine_offsets():
    return np.array([-2.0, -1.0, 0.0, 1.0, 2.0])


def _local_candidates(center, step_r, step_t, max_radius):
    r0 = abs(center)
    t0 = float(np.angle(center)) % (2.0 * np.pi)
    cands = []
    for dr in _refine_offsets() * step_r:
        r = min(max(r0 + dr, 0.0), max_radius)
        for dt in _refine_offsets() * step_t:
            t = (t0 + dt) % (2.0 * np.pi)
            cands.append((r, t if r > 0 else 0.0))
    cands = sorted(set(cands))
    return np.array([r * np.exp(1j * t) for r, t in cands])


def grid_argmax(objective, spec):
    """Deterministic argmax of a nonnegative objective over the polar grid.

    The objective may be vectorized (called with an array of complex grid
    points) or scalar.  Evaluation may be batched freely; the reduction is
    deterministic: ties go to the first candidate in (radius, angle) order,
    and refinement moves only on strict improvement.

    Returns
    -------
    (point, value)
    """
    pts = grid_points(spec)
    vals = _eval_objective(objective, pts)
    idx = int(np.argmax(vals))
    best, best_val = complex(pts[idx]), float(vals[idx])

    step_r = spec.max_radius / spec.radial_count
    step_t = 2.0 * np.pi / spec.angular_count
    for _ in range(spec.refine_levels):
        step_r /= 2.0
        step_t /= 2.0
        cands = _local_candidates(best, step_r, step_t, spec.max_radius)
        cvals = _eval_objective(objective, cands)
        j = int(np.argmax(cvals))
        if cvals[j] > best_val:
            best, best_val = complex(cands[j]), float(cvals[j])
    return best, best_val


def grid_argmax_pairs(objective, spec):
    """Deterministic argmax of a pair objective over the product grid.

    ``objective(a_pts, b_pts)`` must return the matrix of values for all
    combinations.  Tie-breaking is lexicographic in the pair, each component
    ordered by (radius, angle).

    Returns
    -------
    (a, b, value)
    """
    pts = grid_points(spec)
    table = np.asarray(objective(pts, pts), dtype=float)
    if table.shape != (pts.size, pts.size):
        raise ConfigError("pair objective must return a len(a) x len(b) matrix")
    flat = int(np.argmax(table))
    ia, ib = divmod(flat, pts.size)
    best = (complex(pts[ia]), complex(pts[ib]))
    best_val = float(table[ia, ib])

    step_r = spec.max_radius / spec.radial_count
    step_t = 2.0 * np.pi / spec.angular_count
    for _ in range(spec.refine_levels):
        step_r /= 2.0
        step_t /= 2.0
        ca = _local_candidates(best[0], step_r, step_t, spec.max_radius)
        cb = _local_candidates(best[1], step_r, step_t, spec.max_radius)
        tab = np.asarray(objective(ca, cb), dtype=float)
        flat = int(np.argmax(tab))
        ja, jb = divmod(flat, cb.size)
        if tab[ja, jb] > best_val:
            best = (complex(ca[ja]), complex(cb[jb]))
            best_val = float(tab[ja, jb])
    return best[0], best[1], best_val


def require_nonzero(energy, what="input signal"):
    """Shared guard for selection routines."""
    if not energy > 0.0:
        raise DegenerateInputError("%s has zero energy" % what)
