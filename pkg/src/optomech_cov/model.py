"""Laboratory parameters and the effective constants of the four-mode model.

All frequencies are angular (rad/s). The four modes are the cavity field,
the Bogoliubov modes of the two condensates (sides 1 and 2 of the membrane)
and the membrane itself.
"""

from dataclasses import dataclass, fields, replace
import math

from scipy.constants import hbar, k as k_B

from .errors import InvalidParameterError, MissingGeometryError

__all__ = [
    "Geometry",
    "PhysicalParams",
    "DerivedParams",
    "ValidityReport",
    "derive_params",
    "thermal_occupancy",
    "drive_rate_from_power",
    "sw_frequency_from_geometry",
    "lamb_dicke_parameter",
    "validity_check",
    "swap_sides",
]

LAMB_DICKE_THRESHOLD = 0.1
WEAK_INTERACTION_FACTOR = 10.0


@dataclass(frozen=True)
class Geometry:
    """Optional microscopic description of the setup (SI units).

    Every field may be left as ``None``; operations that need a missing field
    raise :class:`MissingGeometryError`.
    """

    cavity_half_length: float | None = None
    atom_mass: float | None = None
    scattering_length: float | None = None
    waist_1: float | None = None
    waist_2: float | None = None
    membrane_mass: float | None = None
    wavelength: float | None = None
    laser_power: float | None = None
    pump_angular_frequency: float | None = None


@dataclass(frozen=True)
class PhysicalParams:
    kappa: float
    omega_R: float
    omega_m: float
    gamma_m: float
    gamma_c: float
    g0: float
    delta_a: float
    n_atoms_1: float
    n_atoms_2: float
    temperature: float
    eta: float
    xi: float
    delta_c: float
    omega_sw_1: float
    omega_sw_2: float
    n_ph: float = 0.0
    geometry: Geometry | None = None

    def __post_init__(self):
        for name in ("kappa", "omega_m", "gamma_m", "gamma_c", "omega_R"):
            _require(name, getattr(self, name) > 0, "must be > 0")
        for name in ("n_atoms_1", "n_atoms_2"):
            _require(name, getattr(self, name) >= 1, "must be >= 1")
        _require("temperature", self.temperature >= 0, "must be >= 0")
        for name in ("omega_sw_1", "omega_sw_2"):
            _require(name, getattr(self, name) >= 0, "must be >= 0")
        _require("n_ph", self.n_ph >= 0, "must be >= 0")
        _require("delta_a", self.delta_a != 0, "must be nonzero (dispersive regime)")
        for f in fields(self):
            value = getattr(self, f.name)
            if isinstance(value, float) and not math.isfinite(value):
                raise InvalidParameterError(f.name, "must be finite")

    def with_changes(self, **changes):
        return replace(self, **changes)


@dataclass(frozen=True)
class DerivedParams:
    u0: float
    zeta_c_1: float
    zeta_c_2: float
    chi_1: float
    chi_2: float
    omega_1: float
    omega_2: float
    zeta_1: float
    zeta_2: float
    n_c_1: float
    n_c_2: float
    n_m: float

    def side(self, j):
        """Return ``(omega_j, zeta_j, n_c_j)`` for side 1 or 2."""
        if j == 1:
            return self.omega_1, self.zeta_1, self.n_c_1
        if j == 2:
            return self.omega_2, self.zeta_2, self.n_c_2
        raise ValueError(f"side must be 1 or 2, got {j!r}")


@dataclass(frozen=True)
class ValidityReport:
    weak_interaction: bool
    interaction_shift: float
    interaction_bound: float
    lamb_dicke: bool | None
    lamb_dicke_parameter: float | None
    lamb_dicke_threshold: float = LAMB_DICKE_THRESHOLD

    def as_dict(self):
        return {
            "weak_interaction": self.weak_interaction,
            "interaction_shift": self.interaction_shift,
            "interaction_bound": self.interaction_bound,
            "lamb_dicke": "unknown" if self.lamb_dicke is None else self.lamb_dicke,
            "lamb_dicke_parameter": self.lamb_dicke_parameter,
            "lamb_dicke_threshold": self.lamb_dicke_threshold,
        }


def _require(name, ok, message):
    if not ok:
        raise InvalidParameterError(name, message)


def thermal_occupancy(omega, temperature):
    """Bose-Einstein occupancy ``1 / (exp(hbar*omega / (k_B*T)) - 1)``.

    Returns exactly 0 at zero temperature.
    """
    _require("omega", omega > 0, "must be > 0")
    _require("temperature", temperature >= 0, "must be >= 0")
    if temperature == 0:
        return 0.0
    x = hbar * omega / (k_B * temperature)
    return 1.0 / math.expm1(x)


def _bogoliubov(omega_R, omega_sw, zeta_c):
    # Omega^(+/-) = 4 omega_R + omega_sw +/- omega_sw / 2
    big_omega = 4.0 * omega_R + omega_sw
    plus = big_omega + 0.5 * omega_sw
    minus = big_omega - 0.5 * omega_sw
    chi = (plus / minus) ** 0.25
    return chi, math.sqrt(plus * minus), zeta_c / chi


def derive_params(p):
    """Compute the effective model constants from laboratory parameters.

    Parameters
    ----------
    p : PhysicalParams

    Returns
    -------
    DerivedParams
    """
    if not isinstance(p, PhysicalParams):
        raise TypeError(f"expected PhysicalParams, got {type(p).__name__}")
    u0 = p.g0**2 / p.delta_a
    zeta_c_1 = 0.5 * math.sqrt(p.n_atoms_1) * u0
    zeta_c_2 = 0.5 * math.sqrt(p.n_atoms_2) * u0
    chi_1, omega_1, zeta_1 = _bogoliubov(p.omega_R, p.omega_sw_1, zeta_c_1)
    chi_2, omega_2, zeta_2 = _bogoliubov(p.omega_R, p.omega_sw_2, zeta_c_2)
    return DerivedParams(
        u0=u0,
        zeta_c_1=zeta_c_1,
        zeta_c_2=zeta_c_2,
        chi_1=chi_1,
        chi_2=chi_2,
        omega_1=omega_1,
        omega_2=omega_2,
        zeta_1=zeta_1,
        zeta_2=zeta_2,
        n_c_1=thermal_occupancy(omega_1, p.temperature),
        n_c_2=thermal_occupancy(omega_2, p.temperature),
        n_m=thermal_occupancy(p.omega_m, p.temperature),
    )


def drive_rate_from_power(power, kappa, omega_p):
    """Pump rate ``sqrt(2 P kappa / (hbar omega_p))`` in rad/s."""
    _require("laser_power", power >= 0, "must be >= 0")
    _require("kappa", kappa > 0, "must be > 0")
    _require("pump_angular_frequency", omega_p > 0, "must be > 0")
    return math.sqrt(2.0 * power * kappa / (hbar * omega_p))


def _geometry_field(p, name):
    g = p.geometry
    value = None if g is None else getattr(g, name)
    if value is None:
        raise MissingGeometryError(f"geometry.{name} is required")
    return value


def sw_frequency_from_geometry(p, side):
    """s-wave scattering frequency ``8 pi hbar a_s N_j / (m_a L w_j^2)``."""
    if side not in (1, 2):
        raise ValueError(f"side must be 1 or 2, got {side!r}")
    a_s = _geometry_field(p, "scattering_length")
    length = _geometry_field(p, "cavity_half_length")
    mass = _geometry_field(p, "atom_mass")
    waist = _geometry_field(p, f"waist_{side}")
    _require("geometry.scattering_length", a_s >= 0, "must be >= 0")
    for name, value in (("cavity_half_length", length), ("atom_mass", mass),
                        (f"waist_{side}", waist)):
        _require(f"geometry.{name}", value > 0, "must be > 0")
    n_atoms = p.n_atoms_1 if side == 1 else p.n_atoms_2
    return 8.0 * math.pi * hbar * a_s * n_atoms / (mass * length * waist**2)


def lamb_dicke_parameter(p):
    """``(4 pi / lambda_0) * sqrt(pi hbar / (m omega_m))`` for the membrane."""
    wavelength = _geometry_field(p, "wavelength")
    mass = _geometry_field(p, "membrane_mass")
    return 4.0 * math.pi / wavelength * math.sqrt(math.pi * hbar / (mass * p.omega_m))


def validity_check(p, d, intensity):
    """Diagnose the weak-interaction and Lamb-Dicke conditions.

    Never raises on physics grounds; the Lamb-Dicke flag is ``None`` when the
    geometry needed to evaluate it is absent.
    """
    shift = abs(d.u0) * intensity
    bound = WEAK_INTERACTION_FACTOR * p.omega_R
    try:
        sigma = lamb_dicke_parameter(p)
    except MissingGeometryError:
        sigma = None
    return ValidityReport(
        weak_interaction=shift <= bound,
        interaction_shift=shift,
        interaction_bound=bound,
        lamb_dicke=None if sigma is None else sigma < LAMB_DICKE_THRESHOLD,
        lamb_dicke_parameter=sigma,
    )


def swap_sides(p):
    """Exchange every side-1 parameter with its side-2 counterpart."""
    geometry = p.geometry
    if geometry is not None:
        geometry = replace(geometry, waist_1=geometry.waist_2, waist_2=geometry.waist_1)
    return replace(
        p,
        n_atoms_1=p.n_atoms_2,
        n_atoms_2=p.n_atoms_1,
        omega_sw_1=p.omega_sw_2,
        omega_sw_2=p.omega_sw_1,
        geometry=geometry,
    )
