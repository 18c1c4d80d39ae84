"""Spherical geometry on WGS84 coordinates (mean-radius sphere)."""

from __future__ import annotations

import math
from typing import TypeAlias

import numpy as np
import numpy.typing as npt

EARTH_RADIUS_M = 6_371_000.0

LatLon: TypeAlias = tuple[float, float]
FloatArray: TypeAlias = npt.NDArray[np.float64]


def haversine_m(a: LatLon, b: LatLon) -> float:
    """Great-circle distance in meters between two (lat, lon) pairs given in degrees."""
    lat1, lon1 = math.radians(a[0]), math.radians(a[1])
    lat2, lon2 = math.radians(b[0]), math.radians(b[1])
    dphi = lat2 - lat1
    dlmb = lon2 - lon1
    h = math.sin(dphi / 2) ** 2 + math.cos(lat1) * math.cos(lat2) * math.sin(dlmb / 2) ** 2
    return EARTH_RADIUS_M * 2 * math.atan2(math.sqrt(h), math.sqrt(max(0.0, 1 - h)))


def haversine_array(
    lat1: FloatArray, lon1: FloatArray, lat2: FloatArray, lon2: FloatArray
) -> FloatArray:
    """Vectorised `haversine_m`; same formula, element-wise."""
    p1, p2 = np.radians(lat1), np.radians(lat2)
    dphi = p2 - p1
    dlmb = np.radians(lon2) - np.radians(lon1)
    h = np.sin(dphi / 2) ** 2 + np.cos(p1) * np.cos(p2) * np.sin(dlmb / 2) ** 2
    h = np.clip(h, 0.0, 1.0)
    return EARTH_RADIUS_M * 2 * np.arctan2(np.sqrt(h), np.sqrt(1 - h))


def forward_azimuth_deg(
    lat1: FloatArray, lon1: FloatArray, lat2: FloatArray, lon2: FloatArray
) -> FloatArray:
    """Initial bearing from point 1 to point 2, degrees clockwise from north in [0, 360)."""
    p1, p2 = np.radians(lat1), np.radians(lat2)
    dlmb = np.radians(lon2) - np.radians(lon1)
    y = np.sin(dlmb) * np.cos(p2)
    x = np.cos(p1) * np.sin(p2) - np.sin(p1) * np.cos(p2) * np.cos(dlmb)
    return np.mod(np.degrees(np.arctan2(y, x)), 360.0)


def project_local_m(
    lat: FloatArray, lon: FloatArray, origin: LatLon
) -> tuple[FloatArray, FloatArray]:
    """Equirectangular projection to meters around `origin` (x east, y north)."""
    lat0 = math.radians(origin[0])
    x = np.radians(lon - origin[1]) * EARTH_RADIUS_M * math.cos(lat0)
    y = np.radians(lat - origin[0]) * EARTH_RADIUS_M
    return x, y


def offset_latlon(
    origin: LatLon, east_m: FloatArray, north_m: FloatArray
) -> tuple[FloatArray, FloatArray]:
    """Inverse of `project_local_m`: meters around `origin` back to degrees."""
    lat0 = math.radians(origin[0])
    lat = origin[0] + np.degrees(north_m / EARTH_RADIUS_M)
    lon = origin[1] + np.degrees(east_m / (EARTH_RADIUS_M * math.cos(lat0)))
    return lat, lon
