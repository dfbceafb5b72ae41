from typing import Literal, Optional

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from config.settings import settings
from config.tolerances import PAPER_BANDS


def _hbar_field():
    return Field(default_factory=lambda: settings.HBAR, gt=0)


def _is_integer_ratio(numerator: float, denominator: float) -> bool:
    ratio = numerator / denominator
    return abs(ratio - round(ratio)) <= 1e-9 * max(1.0, ratio)


class ScenarioParams(BaseModel):
    model_config = ConfigDict(extra="forbid", frozen=True)

    hbar: float = _hbar_field()


class DiffractionConfig(ScenarioParams):
    momentum: float = Field(1.0, gt=0, description="incident momentum p along x")
    mass: float = Field(default_factory=lambda: settings.MASS, gt=0)
    slit_width: float = Field(5.0, gt=0, description="slit opening delta_l")
    screen_distance: float = Field(1000.0, gt=0, description="slit-to-screen distance L")
    detector_size: float = Field(2.0, gt=0, description="detector width delta_y (ring width delta_rho)")
    detector_position: float = Field(100.0, ge=0, description="detector offset y (ring radius rho)")
    angular_profile: Literal["isotropic", "gaussian"] = "isotropic"
    angular_width: float = Field(0.5, gt=0, description="width of a gaussian f(theta), radians")
    aperture: Literal["uniform", "gaussian"] = "uniform"
    simulate_grid: bool = True
    grid_points: Optional[int] = Field(None, ge=16)

    @model_validator(mode="after")
    def check_geometry(self):
        if self.slit_width < self.reduced_wavelength * (1 - 1e-12):
            raise ValueError(
                f"slit_width {self.slit_width} is below the reduced wavelength {self.reduced_wavelength}"
            )
        return self

    @property
    def reduced_wavelength(self) -> float:
        return self.hbar / self.momentum

    @property
    def relative_position(self) -> float:
        return self.detector_position / self.screen_distance

    @property
    def relative_detector_size(self) -> float:
        return self.detector_size / self.screen_distance

    @property
    def flight_time(self) -> float:
        """Paraxial time of flight t = m L / p."""
        return self.mass * self.screen_distance / self.momentum

    @property
    def wide_slit(self) -> bool:
        return self.slit_width > PAPER_BANDS['slit_width_warning'] * self.reduced_wavelength


class OzawaPositionParams(ScenarioParams):
    box_length: float = Field(10.0, gt=0, description="q ranges over [-L, L)")
    packet_width: float = Field(0.1, gt=0, description="alpha")
    conditioning: Literal["none", "favorable"] = "favorable"
    pointer_width: Optional[float] = Field(None, gt=0, description="width of the x2 packet")
    grid_points: Optional[int] = Field(None, ge=16)
    seed: int = Field(default_factory=lambda: settings.SEED)
    mc_samples: int = Field(default_factory=lambda: settings.MC_SAMPLES, ge=0)

    @model_validator(mode="after")
    def check_packets(self):
        if not _is_integer_ratio(2 * self.box_length, self.packet_width) or \
                round(2 * self.box_length / self.packet_width) < 2:
            raise ValueError("2 * box_length / packet_width must be an integer >= 2")
        return self


class PacketBoxParams(ScenarioParams):
    box_length: float = Field(10.0, gt=0, description="x2 ranges over [-L/2, L/2)")
    packet_width: float = Field(0.1, gt=0, description="alpha")
    c: float = Field(0.0, description="constant added to the q pointer")
    relative_width: Optional[float] = Field(None, gt=0, description="width of the q packet")
    grid_points: Optional[int] = Field(None, ge=16)

    @model_validator(mode="after")
    def check_packets(self):
        if not _is_integer_ratio(self.box_length, self.packet_width) or \
                round(self.box_length / self.packet_width) < 2:
            raise ValueError("box_length / packet_width must be an integer >= 2")
        return self


class OzawaCommutingParams(PacketBoxParams):
    box_length: float = Field(20.0, gt=0, description="x2 ranges over [-L/2, L/2)")


class BoxModelParams(PacketBoxParams):
    box_length: float = Field(100.0, gt=0, description="periodic box length L")
    packet_width: float = Field(0.5, gt=0, description="alpha")


class SlitTwoBodyParams(ScenarioParams):
    diffraction: DiffractionConfig = Field(default_factory=lambda: DiffractionConfig(aperture="gaussian"))
    mass_ratio: float = Field(1e4, gt=0, description="m2 / m1")
    c: float = Field(0.0, description="transverse constant added to the y2 pointer")
    packet_width: Optional[float] = Field(None, gt=0, description="alpha; defaults to detector_size")
    longitudinal_width: Optional[float] = Field(None, gt=0, description="spread of q_x around L")
    grid_points: Optional[int] = Field(None, ge=16)

    @field_validator("diffraction", mode="before")
    @classmethod
    def gaussian_aperture_by_default(cls, value):
        if isinstance(value, dict):
            return {"aperture": "gaussian", **value}
        return value

    @model_validator(mode="after")
    def check_regime(self):
        if self.mass_ratio < PAPER_BANDS['min_mass_ratio']:
            raise ValueError(
                f"mass_ratio {self.mass_ratio} below {PAPER_BANDS['min_mass_ratio']:g}; the slit recoil is not negligible"
            )
        return self

    @property
    def alpha(self) -> float:
        return self.packet_width or self.diffraction.detector_size


class PreparationParams(ScenarioParams):
    packet_width: float = Field(0.1, gt=0, description="alpha: width of the q preparation")
    preparation_width: float = Field(0.1, gt=0, description="delta_x2: width of the x2 preparation")
    grid_points: Optional[int] = Field(None, ge=16)


class SpinEPRParams(ScenarioParams):
    pass
