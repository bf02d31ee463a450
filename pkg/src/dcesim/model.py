"""Physical model: qubit trajectory, time-dependent coupling, Hamiltonians.

Internal units: ħ = 1 and the mode frequency ω = 1, so every frequency is
in units of ω and time in units of 1/ω. The qubit bounces between the
cavity walls at constant speed; composed with the mode profile cos(πx/L)
this drives the coupling as g(t) = g₀ cos(ω_d t) exactly (for x₀ = 0),
with ω_d = π v / L.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .errors import ConfigInvalid, VariantMismatch
from .qspace import HilbertSpace, Operator, build_operator

VARIANTS = ("full", "rwa", "anti_rwa")


@dataclass(frozen=True)
class BounceTrajectory:
    """Triangle-wave motion between the cavity walls x = 0 and x = L."""

    length: float
    speed: float
    x0: float = 0.0

    def __post_init__(self):
        if self.length <= 0:
            raise ConfigInvalid(f"cavity length must be positive, got {self.length}")
        if self.speed < 0:
            raise ConfigInvalid(f"speed must be non-negative, got {self.speed}")
        if not 0 <= self.x0 <= self.length:
            raise ConfigInvalid(f"x0={self.x0} outside the cavity [0, {self.length}]")

    @property
    def period(self) -> float:
        """Full back-and-forth period 2L/v (inf for a static qubit)."""
        return math.inf if self.speed == 0 else 2.0 * self.length / self.speed

    def position(self, t) -> float:
        """Triangle-wave position at time t ≥ 0; vectorized over t."""
        if self.speed == 0:
            return self.x0 + 0.0 * np.asarray(t) if np.ndim(t) else self.x0
        L = self.length
        phase = np.mod(self.x0 + self.speed * np.asarray(t, dtype=float), 2.0 * L)
        x = np.where(phase <= L, phase, 2.0 * L - phase)
        return float(x) if np.ndim(t) == 0 else x


def position(traj: BounceTrajectory, t) -> float:
    """Position along the bounce trajectory (free-function form)."""
    return traj.position(t)


@dataclass(frozen=True)
class ModelParams:
    """Model parameters in units of the mode frequency.

    ``delta`` (= Omega - omega) and ``k`` (= π/L) are derived properties,
    kept consistent by construction.
    """

    Omega: float
    omega_d: float
    g0: float
    omega: float = 1.0
    L: float = 1.0
    variant: str = "full"
    fock_cutoff: int = 7

    def __post_init__(self):
        if self.omega <= 0:
            raise ConfigInvalid(f"omega must be positive, got {self.omega}")
        if self.g0 < 0:
            raise ConfigInvalid(f"g0 must be non-negative, got {self.g0}")
        if self.omega_d < 0:
            raise ConfigInvalid(f"omega_d must be non-negative, got {self.omega_d}")
        if self.variant not in VARIANTS:
            raise ConfigInvalid(f"variant {self.variant!r} not one of {VARIANTS}")
        if self.fock_cutoff < 1:
            raise ConfigInvalid(f"fock_cutoff must be >= 1, got {self.fock_cutoff}")

    @property
    def delta(self) -> float:
        return self.Omega - self.omega

    @property
    def k(self) -> float:
        return math.pi / self.L

    @property
    def bounce_speed(self) -> float:
        """Speed realizing the driving frequency: v = ω_d L / π."""
        return self.omega_d * self.L / math.pi

    def trajectory(self, x0: float = 0.0) -> BounceTrajectory:
        return BounceTrajectory(length=self.L, speed=self.bounce_speed, x0=x0)

    def with_(self, **kwargs) -> "ModelParams":
        return replace(self, **kwargs)

    def to_json(self) -> dict:
        return {
            "omega": self.omega,
            "Omega": self.Omega,
            "omega_d": self.omega_d,
            "g0": self.g0,
            "L": self.L,
            "variant": self.variant,
            "fock_cutoff": self.fock_cutoff,
        }

    @classmethod
    def from_json(cls, obj: dict) -> "ModelParams":
        try:
            return cls(
                omega=float(obj["omega"]),
                Omega=float(obj["Omega"]),
                omega_d=float(obj["omega_d"]),
                g0=float(obj["g0"]),
                L=float(obj["L"]),
                variant=str(obj["variant"]),
                fock_cutoff=int(obj["fock_cutoff"]),
            )
        except KeyError as e:
            raise ConfigInvalid(f"model params missing key {e}") from e

    def space(self) -> HilbertSpace:
        return HilbertSpace(fock_cutoff=self.fock_cutoff)


_SPEED_MATCH_RTOL = 1e-12


def coupling(params: ModelParams, traj: BounceTrajectory, t) -> float:
    """g(t) = g₀ cos(k x(t)) along the given trajectory.

    The trajectory speed must realize the driving frequency
    (v = ω_d L / π); for x₀ = 0 the result equals g₀ cos(ω_d t) exactly.
    """
    v_expected = params.bounce_speed
    if abs(traj.speed - v_expected) > _SPEED_MATCH_RTOL * max(1.0, v_expected):
        raise ConfigInvalid(
            f"trajectory speed {traj.speed} does not realize omega_d="
            f"{params.omega_d} (expected v={v_expected})"
        )
    x = traj.position(t)
    g = params.g0 * np.cos(params.k * np.asarray(x))
    return float(g) if np.ndim(t) == 0 else g


def coupling_closed_form(params: ModelParams, t):
    """g₀ cos(ω_d t): the exact coupling for the bounce trajectory with x₀=0.

    Integrators use this form; it avoids event detection at the bounce
    instants (cosine evenness makes the reflections seamless).
    """
    return params.g0 * np.cos(params.omega_d * np.asarray(t))


def coupling_operator(space: HilbertSpace, variant: str = "full") -> Operator:
    """Bare (Schrödinger-picture) coupling operator for a variant.

    full:     σ_x (a† + a)
    rwa:      σ⁺a + σ⁻a†   (excitation-conserving terms only)
    anti_rwa: σ⁺a† + σ⁻a   (counter-rotating terms only)
    """
    a = build_operator(space, "a").matrix
    a_dag = build_operator(space, "a_dag").matrix
    sp = build_operator(space, "sigma_plus").matrix
    sm = build_operator(space, "sigma_minus").matrix
    if variant == "full":
        m = (sp + sm) @ (a_dag + a)
    elif variant == "rwa":
        m = sp @ a + sm @ a_dag
    elif variant == "anti_rwa":
        m = sp @ a_dag + sm @ a
    else:
        raise ConfigInvalid(f"variant {variant!r} not one of {VARIANTS}")
    return Operator(space, m, hermitian=True)


def static_hamiltonian(params: ModelParams, space: HilbertSpace) -> Operator:
    """H₀ = Ω S_z + ω a†a (diagonal in the product basis)."""
    s_z = build_operator(space, "s_z").matrix
    number = build_operator(space, "number").matrix
    return Operator(space, params.Omega * s_z + params.omega * number, hermitian=True)


def hamiltonian(
    params: ModelParams, traj: BounceTrajectory, t: float, space: HilbertSpace
) -> Operator:
    """Full Schrödinger-picture H(t) = Ω S_z + ω a†a + g(t) σ_x(a† + a)."""
    if params.variant != "full":
        raise VariantMismatch(
            f"hamiltonian() is defined for the full variant, got {params.variant!r}"
        )
    h0 = static_hamiltonian(params, space).matrix
    v = coupling_operator(space, "full").matrix
    g = coupling(params, traj, t)
    return Operator(space, h0 + g * v, hermitian=True)


def interaction_hamiltonian(
    params: ModelParams, t: float, space: HilbertSpace
) -> Operator:
    """Interaction-picture H_I(t) w.r.t. the static H₀.

    H_I(t) = g(t) (σ⁺e^{iΩt} + σ⁻e^{-iΩt})(a†e^{iωt} + a e^{-iωt}),
    restricted to the variant's terms. Equals e^{iH₀t} H_int(t) e^{-iH₀t}
    for the full variant.
    """
    a = build_operator(space, "a").matrix
    a_dag = build_operator(space, "a_dag").matrix
    sp = build_operator(space, "sigma_plus").matrix
    sm = build_operator(space, "sigma_minus").matrix
    w, W = params.omega, params.Omega
    g = float(coupling_closed_form(params, t))

    terms = {
        "pp": np.exp(1j * (W + w) * t) * (sp @ a_dag),
        "pm": np.exp(1j * (W - w) * t) * (sp @ a),
        "mp": np.exp(-1j * (W - w) * t) * (sm @ a_dag),
        "mm": np.exp(-1j * (W + w) * t) * (sm @ a),
    }
    if params.variant == "full":
        keep = ("pp", "pm", "mp", "mm")
    elif params.variant == "rwa":
        keep = ("pm", "mp")
    else:  # anti_rwa
        keep = ("pp", "mm")
    m = g * sum(terms[k] for k in keep)
    return Operator(space, m, hermitian=True)
