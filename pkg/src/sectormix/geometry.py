"""Per-pixel angle fields and sector masks for clock-style mixing.

Pixel coordinates follow image convention: row index i grows downward,
column index j grows rightward, origin at the top-left corner.  Angles are
measured counter-clockwise from the rightward (east) ray, in degrees, and
always normalized to [0, 360).
"""

from functools import lru_cache
from typing import NamedTuple

import numpy as np

from .errors import DomainError


class FaceCenter(NamedTuple):
    """Pivot point of the sector layout, in pixel coordinates (column, row)."""

    delta_x: float
    delta_y: float


def default_center(height, width):
    """Geometric center of the pixel grid, used when no face center is given."""
    return FaceCenter((width - 1) / 2.0, (height - 1) / 2.0)


def _validate_grid(height, width):
    if height < 1 or width < 1:
        raise DomainError(f"grid must be at least 1x1, got {height}x{width}")


def _validate_center(height, width, center):
    dx, dy = center
    if not (0 <= dx < width and 0 <= dy < height):
        raise DomainError(
            f"center ({dx}, {dy}) outside grid of width {width}, height {height}"
        )


def compute_angle_matrix(height, width, center):
    """Angle of every pixel around `center`, as an HxW float64 matrix.

    Entry (i, j) is ``(180/pi * atan2(dy - i, j - dx)) mod 360``.  The pixel
    exactly at the center (atan2(0, 0)) gets angle 0 by convention.

    Parameters
    ----------
    height, width : int
        Grid dimensions in pixels.
    center : FaceCenter
        Pivot point; must lie inside the grid.

    Returns
    -------
    ndarray
        HxW matrix of degrees in [0, 360).
    """
    _validate_grid(height, width)
    _validate_center(height, width, center)
    dx, dy = float(center[0]), float(center[1])
    rows = dy - np.arange(height, dtype=np.float64)
    cols = np.arange(width, dtype=np.float64) - dx
    # atan2(0, 0) == 0.0, which realizes the center-pixel convention directly
    m = np.degrees(np.arctan2(rows[:, None], cols[None, :]))
    np.mod(m, 360.0, out=m)
    m[m >= 360.0] = 0.0
    return m


@lru_cache(maxsize=64)
def _cached_angle_matrix(height, width, dx, dy):
    m = compute_angle_matrix(height, width, FaceCenter(dx, dy))
    m.flags.writeable = False
    return m


def angle_matrix(height, width, center):
    """Cached, read-only variant of :func:`compute_angle_matrix`.

    The matrix depends only on (shape, center) and rebasing is a cheap scalar
    shift, so repeated mixes over same-shaped images share one field.
    """
    return _cached_angle_matrix(height, width, float(center[0]), float(center[1]))


def rebase_angles(m, rho_base):
    """Shift an angle matrix so the zero ray points along the base direction.

    Parameters
    ----------
    m : ndarray
        Angle matrix with entries in [0, 360).
    rho_base : float
        Base-ray angle in [0, 360).

    Returns
    -------
    ndarray
        ``(m - rho_base) mod 360``, entries again in [0, 360).
    """
    if not (0 <= rho_base < 360):
        raise DomainError(f"rho_base must lie in [0, 360), got {rho_base}")
    # with both operands already in [0, 360) the mod reduces to one wrap,
    # which avoids a full floating-mod pass over the matrix
    out = m - rho_base
    out[out < 0.0] += 360.0
    out[out >= 360.0] = 0.0
    return out


def sector_mask(m_base, rho):
    """Boolean mask of pixels whose rebased angle is at most `rho`.

    Boundary pixels with angle exactly `rho` are selected; the complement is
    exactly the ``> rho`` region, so the two always partition the grid.

    Parameters
    ----------
    m_base : ndarray
        Rebased angle matrix.
    rho : float
        Sweep angle in (0, 360), exclusive at both ends.

    Returns
    -------
    ndarray
        HxW boolean mask.
    """
    if not (0 < rho < 360):
        raise DomainError(f"rho must lie in (0, 360), got {rho}")
    return m_base <= rho
