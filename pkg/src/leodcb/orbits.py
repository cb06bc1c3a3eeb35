"""Circular LEO orbit propagation and ground-to-satellite visibility.

Satellites move on circular Keplerian orbits in an Earth-centered inertial
frame. Terminals live on a flat tangent plane touching the equator at a
reference longitude; Earth rotation is ignored (the timeline is an hour,
the constellation near-equatorial). All functions here are pure.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError

TWO_PI = 2.0 * math.pi


@dataclass(frozen=True)
class PhysicalConstants:
    """Earth constants shared by every orbit in a scenario."""

    earth_radius: float = 6.371e6              # m
    gravitational_constant: float = 6.674e-11  # m^3 kg^-1 s^-2
    earth_mass: float = 5.972e24               # kg

    def __post_init__(self):
        for name in ("earth_radius", "gravitational_constant", "earth_mass"):
            if getattr(self, name) <= 0.0:
                raise DomainError(f"{name} must be strictly positive")

    @property
    def mu(self) -> float:
        """Standard gravitational parameter G * M_e."""
        return self.gravitational_constant * self.earth_mass


def wrap_angle(theta: float) -> float:
    """Map an angle into [0, 2*pi)."""
    wrapped = float(theta) % TWO_PI
    # Tiny negative inputs round up to exactly 2*pi under fmod.
    return 0.0 if wrapped == TWO_PI else wrapped


@dataclass(frozen=True)
class OrbitalElements:
    """Keplerian tuple of one circular LEO satellite.

    Eccentricity is pinned to zero and the semi-major axis must equal
    altitude + earth radius exactly; use :func:`circular_orbit` to build
    instances with that invariant satisfied.
    """

    inclination: float          # rad
    raan: float                 # rad
    arg_perigee: float          # rad, initial in-plane phase
    eccentricity: float         # always 0 in scope
    semi_major_axis: float      # m, orbit radius for circular orbits
    true_anomaly: float         # rad
    altitude: float             # m above the surface

    def __post_init__(self):
        if self.eccentricity != 0.0:
            raise DomainError("only circular orbits are supported (eccentricity must be 0)")
        if self.semi_major_axis <= 0.0:
            raise DomainError("semi-major axis must be strictly positive")
        for name in ("inclination", "raan", "arg_perigee", "true_anomaly"):
            angle = getattr(self, name)
            if not (0.0 <= angle < TWO_PI):
                raise DomainError(f"{name} must lie in [0, 2*pi); got {angle}")


def circular_orbit(
    inclination: float,
    raan: float,
    arg_perigee: float,
    true_anomaly: float,
    altitude: float,
    constants: PhysicalConstants,
) -> OrbitalElements:
    """Build circular elements with radius = altitude + earth radius."""
    if altitude <= 0.0:
        raise DomainError("altitude must be strictly positive")
    return OrbitalElements(
        inclination=wrap_angle(inclination),
        raan=wrap_angle(raan),
        arg_perigee=wrap_angle(arg_perigee),
        eccentricity=0.0,
        semi_major_axis=altitude + constants.earth_radius,
        true_anomaly=wrap_angle(true_anomaly),
        altitude=altitude,
    )


@dataclass(frozen=True)
class SatellitePosition:
    """Earth-centered Cartesian position of one satellite at one slot."""

    x: float
    y: float
    z: float
    slot_index: float

    def as_array(self) -> np.ndarray:
        return np.array([self.x, self.y, self.z])


def angular_velocity(elements: OrbitalElements, constants: PhysicalConstants) -> float:
    """Mean angular rate sqrt(mu / H^3) of a circular orbit, rad/s."""
    radius = elements.semi_major_axis
    if radius <= 0.0:
        raise DomainError("orbit radius must be strictly positive")
    return math.sqrt(constants.mu / radius**3)


def orbital_period(elements: OrbitalElements, constants: PhysicalConstants) -> float:
    """Orbital period 2*pi / angular_velocity, seconds."""
    return TWO_PI / angular_velocity(elements, constants)


def position_at(
    elements: OrbitalElements,
    t: float,
    slot_seconds: float,
    constants: PhysicalConstants,
) -> SatellitePosition:
    """Propagate to slot ``t`` (slots of ``slot_seconds`` each).

    The in-plane phase advances from the initial perigee argument by
    t * slot_seconds * angular_velocity, taken modulo one revolution, and
    is then rotated by the plane orientation (inclination, RAAN).
    """
    if t < 0:
        raise DomainError("slot index must be non-negative")
    rate = angular_velocity(elements, constants)
    phase = (elements.arg_perigee + t * slot_seconds * rate) % TWO_PI
    u = phase + elements.true_anomaly
    radius = elements.semi_major_axis
    cos_u, sin_u = math.cos(u), math.sin(u)
    cos_raan, sin_raan = math.cos(elements.raan), math.sin(elements.raan)
    cos_inc = math.cos(elements.inclination)
    x = radius * (cos_u * cos_raan - sin_u * cos_inc * sin_raan)
    y = radius * (cos_u * sin_raan + sin_u * cos_inc * cos_raan)
    z = radius * (sin_u * math.sin(elements.inclination))
    return SatellitePosition(x=x, y=y, z=z, slot_index=t)


@dataclass(frozen=True)
class GroundFrame:
    """Flat tangent plane touching the equator at ``reference_longitude``.

    Local axes: x east, y north, z up. Terminal ground points are
    (x, y, 0) in this frame; satellite inertial positions are converted
    with :meth:`to_local` once per slot.
    """

    reference_longitude: float
    constants: PhysicalConstants

    def _basis(self):
        lam = self.reference_longitude
        up = np.array([math.cos(lam), math.sin(lam), 0.0])
        east = np.array([-math.sin(lam), math.cos(lam), 0.0])
        north = np.array([0.0, 0.0, 1.0])
        return east, north, up

    def origin(self) -> np.ndarray:
        east, north, up = self._basis()
        return self.constants.earth_radius * up

    def to_local(self, point_eci) -> np.ndarray:
        """Inertial -> local (east, north, up) coordinates."""
        east, north, up = self._basis()
        offset = np.asarray(point_eci, dtype=float) - self.origin()
        return np.stack(
            [offset @ east, offset @ north, offset @ up], axis=-1
        )


def elevation_angle(sat_local, terminal_local) -> float:
    """Angle between the local horizontal plane and the terminal->satellite ray.

    Both points must be in the same tangent-plane frame (z up). Result in
    [-pi/2, pi/2]; negative when the satellite sits below the plane.
    """
    delta = np.asarray(sat_local, dtype=float) - np.asarray(terminal_local, dtype=float)
    dist = float(np.linalg.norm(delta))
    if dist == 0.0:
        raise DomainError("satellite and terminal positions coincide")
    return math.asin(max(-1.0, min(1.0, delta[2] / dist)))


def is_geometrically_visible(sat_local, terminal_local, min_elevation: float) -> bool:
    """True iff the elevation angle reaches the threshold (inclusive)."""
    return elevation_angle(sat_local, terminal_local) >= min_elevation
