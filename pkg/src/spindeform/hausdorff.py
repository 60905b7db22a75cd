"""Grid box-counting estimator for s-dimensional measure scaling.

Coverings are uniform grids of side delta anchored at the origin; each
occupied cell contributes its diagonal diameter to the s-power sum.  The
dimension-dependent diagonal factor d^{s/2} is divided out so that
axis-aligned boxes report their Euclidean content (the scaling claims
under test are invariant under this normalization).  The limit in the
measure definition is approximated by the value at the smallest delta
plus the reported trend; no extrapolation is attempted.

An equipped local set is a finite union of disjoint boxes, each carrying
its own constant contraction value phi in (0,1); shrinking a piece by
(1-phi) about the origin multiplies its s-measure by (1-phi)^s, which is
the closed form checked here against direct counting.
"""

import itertools
from dataclasses import dataclass

import numpy as np

_ROUND_GUARD = 1e-9  # protects grid-index arithmetic from float boundaries


@dataclass(frozen=True)
class Box:
    """Axis-aligned box [lo, hi) in up to four dimensions."""

    lo: tuple
    hi: tuple

    def __post_init__(self):
        lo = tuple(float(v) for v in np.atleast_1d(self.lo))
        hi = tuple(float(v) for v in np.atleast_1d(self.hi))
        if len(lo) != len(hi) or not 1 <= len(lo) <= 4:
            raise ValueError("box needs matching lo/hi in 1..4 dimensions")
        if not all(np.isfinite(lo)) or not all(np.isfinite(hi)):
            raise ValueError("box must be bounded")
        if any(h <= l for l, h in zip(lo, hi)):
            raise ValueError("box must have positive extent in every dimension")
        object.__setattr__(self, "lo", lo)
        object.__setattr__(self, "hi", hi)

    @property
    def dim(self):
        return len(self.lo)

    @property
    def widths(self):
        return tuple(h - l for l, h in zip(self.lo, self.hi))

    @property
    def volume(self):
        return float(np.prod(self.widths))


@dataclass(frozen=True)
class CoveringSpec:
    """Strictly decreasing positive covering sides down to delta_min."""

    deltas: tuple

    def __post_init__(self):
        d = tuple(float(v) for v in self.deltas)
        if not d or any(v <= 0 for v in d):
            raise ValueError("deltas must be positive")
        if any(b >= a for a, b in zip(d, d[1:])):
            raise ValueError("deltas must be strictly decreasing")
        object.__setattr__(self, "deltas", d)

    @staticmethod
    def geometric(delta_max, delta_min, factor=2.0):
        out = [float(delta_max)]
        while out[-1] / factor > delta_min * (1 + 1e-12):
            out.append(out[-1] / factor)
        if out[-1] > delta_min:
            out.append(float(delta_min))
        return CoveringSpec(deltas=tuple(out))


@dataclass(frozen=True)
class EquippedLocalSet:
    """Disjoint boxes, each with a constant contraction value phi in (0,1)."""

    pieces: tuple  # of (Box, phi)

    def __post_init__(self):
        pieces = tuple((box, float(phi)) for box, phi in self.pieces)
        if not pieces:
            raise ValueError("equipped set needs at least one piece")
        dim = pieces[0][0].dim
        for box, phi in pieces:
            if box.dim != dim:
                raise ValueError("pieces must share a dimension")
            if not 0.0 < phi < 1.0:
                raise ValueError(f"phi={phi} outside (0,1); phi -> 1 collapses the piece")
        _require_disjoint([b for b, _ in pieces], "equipped set pieces overlap")
        object.__setattr__(self, "pieces", pieces)


def _boxes_intersect(a, b):
    return all(al < bh and bl < ah
               for al, ah, bl, bh in zip(a.lo, a.hi, b.lo, b.hi))


def _require_disjoint(boxes, msg):
    for a, b in itertools.combinations(boxes, 2):
        if _boxes_intersect(a, b):
            raise ValueError(msg)


def diameter(obj):
    """Supremum of pairwise distances: box diagonal, or max over points."""
    if isinstance(obj, Box):
        return float(np.linalg.norm(obj.widths))
    pts = np.atleast_2d(np.asarray(obj, dtype=float))
    if pts.size == 0:
        raise ValueError("diameter of an empty set")
    if len(pts) == 1:
        return 0.0
    diff = pts[:, None, :] - pts[None, :, :]
    return float(np.max(np.linalg.norm(diff, axis=-1)))


def _index_range(lo, hi, delta):
    """Occupied grid-cell index range [j0, j1) along one axis."""
    j0 = int(np.floor(lo / delta + _ROUND_GUARD))
    j1 = int(np.ceil(hi / delta - _ROUND_GUARD))
    return j0, max(j1, j0 + 1)


def _occupied_count(boxes, delta):
    """Number of grid cells of side delta meeting the union of boxes.

    Inclusion-exclusion over per-axis index-range intersections; exact
    because each box occupies a product range of cells.
    """
    total = 0
    n = len(boxes)
    for r in range(1, n + 1):
        sign = 1 if r % 2 == 1 else -1
        for combo in itertools.combinations(range(n), r):
            count = 1
            for axis in range(boxes[0].dim):
                j0_max = max(_index_range(boxes[i].lo[axis], boxes[i].hi[axis], delta)[0]
                             for i in combo)
                j1_min = min(_index_range(boxes[i].lo[axis], boxes[i].hi[axis], delta)[1]
                             for i in combo)
                cells = j1_min - j0_max
                if cells <= 0:
                    count = 0
                    break
                count *= cells
            total += sign * count
    return total


@dataclass(frozen=True)
class MeasureSeries:
    deltas: tuple
    estimates: tuple

    @property
    def value(self):
        return self.estimates[-1]

    @property
    def trend(self):
        if len(self.estimates) < 2:
            return "flat"
        step = self.estimates[-1] - self.estimates[-2]
        scale = max(abs(self.estimates[-1]), 1e-300)
        if abs(step) <= 1e-9 * scale:
            return "flat"
        return "decreasing" if step < 0 else "increasing"


def measure_estimate(K, s, spec):
    """Per-delta power sums over occupied grid cells, diagonal-normalized.

    K may be a Box or an iterable of disjoint boxes.  Each estimate is
    N(delta) * delta^s after the d^{s/2} diagonal normalization.
    """
    if s < 0:
        raise ValueError("s must be nonnegative")
    boxes = [K] if isinstance(K, Box) else list(K)
    if not boxes:
        raise ValueError("empty set")
    _require_disjoint(boxes, "boxes must be disjoint")
    if len(boxes) > 20:
        raise ValueError("inclusion-exclusion capped at 20 pieces")
    estimates = tuple(
        _occupied_count(boxes, d) * d**s for d in spec.deltas
    )
    return MeasureSeries(deltas=spec.deltas, estimates=estimates)


def scale_set(box, phi):
    """Homothety of a box by (1 - phi) about the origin."""
    if not 0.0 < phi < 1.0:
        raise ValueError(f"phi={phi} outside (0,1); phi = 1 shrinks to the empty set")
    f = 1.0 - phi
    return Box(lo=tuple(f * v for v in box.lo), hi=tuple(f * v for v in box.hi))


@dataclass(frozen=True)
class ScalingCheck:
    lhs: float
    rhs: float

    @property
    def gap(self):
        return abs(self.lhs - self.rhs) / max(abs(self.rhs), 1e-300)


def scaling_law_check(box, phi, s, spec):
    """Measured vs closed-form scaling of a contracted box.

    lhs measures the contracted box at the spec deltas; rhs is
    (1-phi)^s times the original measured at the matched resolution
    delta / (1-phi), mirroring the covering substitution that proves the
    law (and making the s = 0 counting case exact).
    """
    scaled = scale_set(box, phi)
    lhs = measure_estimate(scaled, s, spec).value
    matched = CoveringSpec(deltas=tuple(d / (1.0 - phi) for d in spec.deltas))
    rhs = (1.0 - phi) ** s * measure_estimate(box, s, matched).value
    return ScalingCheck(lhs=lhs, rhs=rhs)


@dataclass(frozen=True)
class EquippedMeasure:
    total: float            # closed form: sum (1-phi_i)^s H^s(U_i)
    per_piece: tuple
    direct: float           # measured on the scaled union

    @property
    def gap(self):
        return abs(self.total - self.direct) / max(abs(self.total), 1e-300)


def equipped_measure(equipped, s, spec):
    """Closed-form total for an all-constant equipped set, with direct check.

    total applies the per-piece (1-phi)^s factors to measures estimated at
    matched resolutions; direct measures the union of contracted boxes at
    the spec deltas.  The two agree up to grid granularity.
    """
    per_piece = []
    scaled_boxes = []
    for box, phi in equipped.pieces:
        matched = CoveringSpec(deltas=tuple(d / (1.0 - phi) for d in spec.deltas))
        est = measure_estimate(box, s, matched).value
        per_piece.append((1.0 - phi) ** s * est)
        scaled_boxes.append(scale_set(box, phi))
    _require_disjoint(scaled_boxes, "contracted pieces overlap; closed form invalid")
    direct = measure_estimate(scaled_boxes, s, spec).value
    return EquippedMeasure(total=float(sum(per_piece)), per_piece=tuple(per_piece),
                           direct=direct)


def slowly_varying_check(phi_samples, tol=1e-2):
    """Pieces qualify when max |phi - mean| / mean <= tol.

    Returns (all_in_set, offending_indices): offenders are the pieces
    whose sampled deformation is not constant at the tolerance.
    """
    offenders = []
    for idx, samples in enumerate(phi_samples):
        arr = np.asarray(samples, dtype=float)
        if arr.size == 0:
            raise ValueError(f"piece {idx} has no samples")
        mean = float(arr.mean())
        if mean <= 0:
            raise ValueError(f"piece {idx} has non-positive mean deformation")
        if float(np.max(np.abs(arr - mean))) / mean > tol:
            offenders.append(idx)
    return len(offenders) == 0, offenders
