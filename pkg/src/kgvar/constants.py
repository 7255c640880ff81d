from __future__ import annotations

from dataclasses import dataclass

from scipy import constants as sc

from .errors import ArgumentError


@dataclass(frozen=True)
class PhysicalConstants:
    """Mass (kg), speed of light (m/s), reduced Planck constant (J s) and the
    curvature coupling gamma (J m^2), which defaults to hbar^2 / m."""

    m: float
    c: float
    hbar: float
    gamma: float | None = None

    def __post_init__(self):
        if self.gamma is None:
            object.__setattr__(self, "gamma", self.hbar**2 / self.m)
        for name in ("m", "c", "hbar", "gamma"):
            val = getattr(self, name)
            if not (val > 0 and val < float("inf")):
                raise ArgumentError(f"{name} must be positive and finite, got {val!r}")

    @classmethod
    def nondimensional(cls):
        return cls(1.0, 1.0, 1.0, 1.0)

    @classmethod
    def si(cls, m=sc.m_e):
        return cls(float(m), sc.c, sc.hbar)

    @property
    def rest_energy(self):
        return self.m * self.c**2

    def to_dict(self):
        return {"m": self.m, "c": self.c, "hbar": self.hbar, "gamma": self.gamma}
