"""Convolution operators on the weighted line via Fourier transform.

On the zero Fourier mode of a cusp, an admissible operator acts as a
convolution in r = log y.  Conjugating by the weight e^{rho r} and taking
the discrete Fourier transform turns application and inversion into
pointwise matrix algebra on the frequency grid; contour shifts between
weight lines produce exponential-polynomial corrections carried by the
residues of the inverse family.
"""

import math
import warnings
from dataclasses import dataclass, field, replace

import numpy as np

from .errors import InvalidInputError, InvalidWeightError, ResolutionError
from .polymat import indicial_roots
from .residues import meromorphic_inverse, pole_order, residue_range_profiles

_ALIAS_TOL = 1e-10
_NEAR_ROOT_GUARD = 1e-3


# ---------------------------------------------------------------------------
# fields on the r-line
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ModeZeroField:
    """Vector-valued samples on a uniform periodic r-grid.

    ``samples[k, i]`` holds component i of the *weighted representative*
    e^{-weight r} u(r) at the k-th node, which stays bounded when u grows
    like e^{weight r}.
    """

    r0: float
    dr: float
    samples: np.ndarray
    weight: float = 0.0
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        s = np.asarray(self.samples, dtype=complex)
        if s.ndim == 1:
            s = s[:, None]
        if s.shape[0] < 64:
            raise InvalidInputError("mode-zero grid needs at least 64 samples")
        object.__setattr__(self, "samples", s)

    @property
    def grid(self):
        return self.r0 + self.dr * np.arange(self.samples.shape[0])

    @property
    def ncomp(self):
        return self.samples.shape[1]

    def values(self):
        """Unweighted samples of the actual function u(r)."""
        return self.samples * np.exp(self.weight * self.grid)[:, None]

    def with_weight(self, rho):
        """Re-express the same function relative to another weight."""
        fac = np.exp((self.weight - rho) * self.grid)[:, None]
        return replace(self, samples=self.samples * fac, weight=rho)

    def __add__(self, other):
        o = other.with_weight(self.weight)
        return replace(self, samples=self.samples + o.samples)

    def __sub__(self, other):
        o = other.with_weight(self.weight)
        return replace(self, samples=self.samples - o.samples)


def line_grid(r_half=48.0, n=4096):
    """Symmetric periodic grid on [-r_half, r_half); includes r = 0."""
    dr = 2.0 * r_half / n
    return -r_half, dr


def smooth_step(t):
    """C-infinity step: 0 for t<=0, 1 for t>=1."""
    t = np.clip(t, 0.0, 1.0)
    with np.errstate(divide="ignore", over="ignore", invalid="ignore"):
        fa = np.where(t > 0, np.exp(-1.0 / np.where(t > 0, t, 1.0)), 0.0)
        fb = np.where(t < 1, np.exp(-1.0 / np.where(t < 1, 1.0 - t, 1.0)), 0.0)
    return fa / (fa + fb)


def window_profile(grid, r_half=None, flat=0.8, zero=0.9):
    """Smooth bump: 1 on |r| <= flat * r_half, 0 beyond zero * r_half."""
    if r_half is None:
        r_half = max(abs(grid[0]), abs(grid[-1]))
    a, b = flat * r_half, zero * r_half
    return smooth_step((b - np.abs(grid)) / (b - a))


def windowed(fld, flat=0.8, zero=0.9):
    w = window_profile(fld.grid, flat=flat, zero=zero)
    return replace(fld, samples=fld.samples * w[:, None])


def make_field(fun, r_half=48.0, n=4096, weight=0.0, ncomp=None):
    """Sample a callable (vectorized over r) into a ModeZeroField."""
    r0, dr = line_grid(r_half, n)
    r = r0 + dr * np.arange(n)
    vals = np.asarray(fun(r), dtype=complex)
    if vals.ndim == 1:
        vals = vals[:, None]
    if vals.shape[0] != n:
        vals = vals.T
    if ncomp is not None and vals.shape[1] != ncomp:
        raise InvalidInputError("component count mismatch")
    return ModeZeroField(r0, dr, vals, weight=weight)


def bump(t):
    """Standard compactly supported C-infinity bump on |t| < 1."""
    t = np.asarray(t, dtype=float)
    out = np.zeros_like(t)
    inside = np.abs(t) < 1.0
    x = t[inside]
    out[inside] = np.exp(1.0 - 1.0 / (1.0 - x * x))
    return out


# ---------------------------------------------------------------------------
# transforms
# ---------------------------------------------------------------------------


def _frequencies(fld):
    n = fld.samples.shape[0]
    return 2.0 * np.pi * np.fft.fftfreq(n, d=fld.dr)


def _check_aliasing(sam, what):
    spec = np.fft.fft(sam, axis=0)
    n = spec.shape[0]
    band = n // 10
    tail = np.sum(np.abs(spec[n // 2 - band : n // 2 + band]) ** 2)
    total = np.sum(np.abs(spec) ** 2)
    if total > 0 and tail > _ALIAS_TOL * total:
        raise ResolutionError(
            f"{what}: spectral tail fraction {tail / total:.2e} exceeds {_ALIAS_TOL}",
            diagnostics={"tail_fraction": float(tail / total)},
        )


def apply_indicial(fam, fld):
    """Apply the convolution operator along the weight line of the field.

    Shift by the weight, transform, multiply by the family evaluated on
    Re(lambda) = weight, transform back.
    """
    if fam.shape[1] != fld.ncomp:
        raise InvalidInputError("family/field component mismatch")
    _check_aliasing(fld.samples, "apply_indicial input")
    xi = _frequencies(fld)
    lam = fld.weight + 1j * xi
    mats = fam(lam)
    what = np.fft.fft(fld.samples, axis=0)
    out_hat = np.einsum("kij,kj->ki", mats, what)
    out = np.fft.ifft(out_hat, axis=0)
    return ModeZeroField(fld.r0, fld.dr, out, weight=fld.weight)


def invert_on_line(fam, f, rho, near_root_guard=_NEAR_ROOT_GUARD):
    """Solve (convolution operator) u = f on the weight line Re(lambda)=rho.

    Returns (u, info); u carries weight rho, info reports per-node condition
    statistics.  The solution only depends on the connected component of rho
    in the complement of the singular weight set.
    """
    if not fam.is_square:
        raise InvalidInputError("line inversion needs a square family")
    roots = indicial_roots(fam)
    gaps = [abs(r.lam.real - rho) for r in roots]
    if gaps and min(gaps) < 1e-12:
        raise InvalidWeightError(f"weight {rho} lies on a root line")
    if gaps and min(gaps) < near_root_guard:
        warnings.warn(
            f"weight {rho} is within {min(gaps):.2e} of a root line; "
            "inversion is ill-conditioned",
            stacklevel=2,
        )
    g = f.with_weight(rho)
    _check_aliasing(g.samples, "invert_on_line data")
    xi = _frequencies(g)
    lam = rho + 1j * xi
    mats = fam(lam)
    what = np.fft.fft(g.samples, axis=0)
    sol_hat = np.linalg.solve(mats, what[..., None])[..., 0]
    sol = np.fft.ifft(sol_hat, axis=0)
    conds = np.linalg.cond(mats)
    info = {
        "condition_max": float(np.max(conds)),
        "condition_median": float(np.median(conds)),
        "root_line_distance": float(min(gaps)) if gaps else np.inf,
    }
    return ModeZeroField(g.r0, g.dr, sol, weight=rho), info


def l2_norm(fld):
    """L2(dr) norm of the weighted representative."""
    return float(np.sqrt(np.sum(np.abs(fld.samples) ** 2) * fld.dr))


def spectral_l2_norm(fld):
    """Same norm computed on the transform side (Plancherel)."""
    what = np.fft.fft(fld.samples, axis=0)
    n = what.shape[0]
    return float(np.sqrt(np.sum(np.abs(what) ** 2) * fld.dr / n))


# ---------------------------------------------------------------------------
# asymptotic (exponential-polynomial) elements
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class AsymptoticElement:
    """Profile r^k e^{lam r} v, the building block of residue ranges."""

    lam: complex
    k: int
    coefficient_vector: np.ndarray
    tail: tuple = ()

    def evaluate(self, r):
        r = np.asarray(r, dtype=float)
        vec = np.asarray(self.coefficient_vector, dtype=complex)
        out = (r**self.k * np.exp(self.lam * r))[:, None] * vec[None, :]
        for k2, v2 in self.tail:
            out += (r**k2 * np.exp(self.lam * r))[:, None] * np.asarray(v2)[None, :]
        return out


def kernel_elements(fam, root):
    """Basis of the asymptotic kernel attached to an indicial root, as
    exponential-polynomial profiles annihilated by the operator."""
    lam0 = complex(getattr(root, "lam", root))
    profiles = residue_range_profiles(fam, lam0)
    return [
        AsymptoticElement(lam0, k, vec, tuple((k2, v2) for k2, v2 in tail))
        for k, vec, tail in profiles
    ]


def evaluate_elements(elements, fld_like, weight=None):
    """Sum asymptotic elements on the grid of a reference field, stored at
    the requested weight."""
    rho = fld_like.weight if weight is None else weight
    r = fld_like.grid
    total = np.zeros((r.size, elements[0].coefficient_vector.size), dtype=complex)
    for el in elements:
        total += el.evaluate(r)
    rep = total * np.exp(-rho * r)[:, None]
    return ModeZeroField(fld_like.r0, fld_like.dr, rep, weight=rho)


def _finite_transform(f, lam_values):
    """Entire transform \\int e^{-lam r} f(r) dr of a compactly supported
    field, evaluated at the given complex points."""
    vals = f.values()
    mask = np.max(np.abs(vals), axis=1) > 0
    r = f.grid[mask]
    v = vals[mask]
    out = np.empty((len(lam_values), v.shape[1]), dtype=complex)
    for i, lam in enumerate(lam_values):
        out[i] = f.dr * np.sum(np.exp(-lam * r)[:, None] * v, axis=0)
    return out


def cross_root_correction(fam, f, rho_from, rho_to, nodes=64):
    """Difference of line inverses across intervening roots.

    Returns (difference field, residue contributions); the difference of
    the two inversions equals the evaluated sum of the contributions, each
    an exponential-polynomial profile attached to a crossed root.
    """
    u_from, _ = invert_on_line(fam, f, rho_from)
    u_to, _ = invert_on_line(fam, f, rho_to)
    diff = u_to - u_from.with_weight(rho_to)

    lo, hi = sorted((rho_from, rho_to))
    sign = 1.0 if rho_to >= rho_from else -1.0
    contributions = []
    minv = meromorphic_inverse(fam)
    for root in indicial_roots(fam):
        if not (lo < root.lam.real < hi):
            continue
        p = pole_order(fam, root.lam)
        others = [
            abs(r2.lam - root.lam)
            for r2 in indicial_roots(fam)
            if abs(r2.lam - root.lam) > 1e-8
        ]
        rad = min(1e-2, (min(others) / 3.0) if others else 1e-2)
        phi = 2.0 * np.pi * np.arange(nodes) / nodes
        lam = root.lam + rad * np.exp(1j * phi)
        fhat = _finite_transform(f, lam)
        mats = minv(lam)
        g = np.einsum("kij,kj->ki", mats, fhat)
        for k in range(1, p + 1):
            w = np.exp(1j * k * phi) * (rad**k) / nodes
            gk = np.tensordot(w, g, axes=(0, 0))
            coeff = sign * gk / math.factorial(k - 1)
            if np.linalg.norm(coeff) < 1e-14 * max(1.0, np.linalg.norm(g)):
                continue
            contributions.append(AsymptoticElement(root.lam, k - 1, coeff))
    return diff, contributions


# ---------------------------------------------------------------------------
# tail rate estimation
# ---------------------------------------------------------------------------


def fit_decay_rate(fld, side="+", flat=0.8, band=(1e-11, 1e-2)):
    """Least-squares slope of log ||u(r)|| over the tail on the requested
    side.

    The fit window is selected by magnitude: nodes whose norm lies in
    ``band`` relative to the global maximum, keeping the regression inside
    the true exponential regime and above the transform's roundoff floor.
    """
    r = fld.grid
    mags = np.linalg.norm(fld.values(), axis=1)
    r_half = max(abs(r[0]), abs(r[-1]))
    edge = flat * r_half
    peak = np.max(mags)
    if side == "+":
        region = (r > 0) & (r < edge)
    else:
        region = (r < 0) & (r > -edge)
    region &= (mags > band[0] * peak) & (mags < band[1] * peak)
    if np.sum(region) < 16 or np.ptp(r[region]) < 2.0:
        raise InvalidInputError("not enough tail samples above the noise floor")
    coef = np.polyfit(r[region], np.log(mags[region]), 1)
    return float(coef[0])
