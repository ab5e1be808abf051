"""Probability flux of a Gaussian wave packet driven by a field plus white noise."""

from ._wpflux import (
    ConfigurationError,
    DomainError,
    Field,
    IoError,
    NumericalError,
    Packet,
    RangeError,
    UsageError,
    WpfluxError,
    __version__,
    averaged_flux,
    classical_moments,
    ensemble_flux,
    gaussian_density,
    gaussian_flux,
    plane_wave_flux,
    sample_path,
    tdse_flux,
    zero_flux_point,
)
from . import _wpflux


def _settings(settings):
    """Config values as the text the key parser expects."""
    out = {}
    for key, value in settings.items():
        if isinstance(value, bool):
            value = "true" if value else "false"
        elif isinstance(value, (list, tuple)):
            value = ",".join(repr(v) if isinstance(v, float) else str(v) for v in value)
        elif isinstance(value, float):
            value = repr(value)
        out[key] = str(value)
    return out


def run(command, **settings):
    """Run a CLI experiment ("figure1", "flux", ...) with config keys as keywords.

    Dotted keys such as noise.dt are passed through a dict: run("flux", **{"noise.dt": 0.02}).
    """
    return _wpflux.run(command, _settings(settings))


def validate(**settings):
    """Run the cross-route checks; returns one dict per check."""
    return _wpflux.validate(_settings(settings))


__all__ = [
    "ConfigurationError",
    "DomainError",
    "Field",
    "IoError",
    "NumericalError",
    "Packet",
    "RangeError",
    "UsageError",
    "WpfluxError",
    "__version__",
    "averaged_flux",
    "classical_moments",
    "ensemble_flux",
    "gaussian_density",
    "gaussian_flux",
    "plane_wave_flux",
    "run",
    "sample_path",
    "tdse_flux",
    "validate",
    "zero_flux_point",
]
