"""
Benchmark curves and point-source resolution for experiments.

Epitrochoid and Vivaldi t-ranges are read in degrees, the spiral's in
radians; `degrees=` overrides either. Samples are equally spaced in t and
include both range endpoints.

Generators are exact. `load_points` adds seeded Gaussian measurement noise
per coordinate, sized per curve; `noise_sigma=0` gives the exact samples.
"""

import math
from typing import Dict

import numpy as np

from app.core.errors import DomainError
from app.harness.io import load_csv
from app.models import CurveKind, CurveSpec

CURVE_DEFAULTS: Dict[CurveKind, dict] = {
    CurveKind.EPITROCHOID: {
        "parameters": {"a": 5.0, "b": 1.0, "h": 4.0},
        "t_min": -180.0,
        "t_max": 180.0,
        "degrees": True,
        "sample_count": 361,
        "noise_sigma": 0.15,
    },
    CurveKind.ARCHIMEDEAN_SPIRAL: {
        "parameters": {"a": 2.0},
        "t_min": 0.0,
        "t_max": math.pi,
        "degrees": False,
        "sample_count": 100,
        "noise_sigma": 0.08,
    },
    CurveKind.VIVALDI: {
        "parameters": {"a": 0.5},
        "t_min": -360.0,
        "t_max": 360.0,
        "degrees": True,
        "sample_count": 241,
        "noise_sigma": 0.04,
    },
}


def _samples(t_min: float, t_max: float, count: int, degrees: bool) -> np.ndarray:
    if count < 2:
        raise DomainError("a curve needs at least two samples")
    if not t_min < t_max:
        raise DomainError("t_min must be below t_max")
    t = np.linspace(t_min, t_max, count)
    return np.radians(t) if degrees else t


def generate_epitrochoid(
    a: float = 5.0,
    b: float = 1.0,
    h: float = 4.0,
    t_min_deg: float = -180.0,
    t_max_deg: float = 180.0,
    count: int = 361,
    degrees: bool = True,
) -> np.ndarray:
    """x = (a+b) cos t - h cos((a/b + 1) t), y = (a+b) sin t - h sin((a/b + 1) t)."""
    if b == 0:
        raise DomainError("epitrochoid needs b != 0")
    t = _samples(t_min_deg, t_max_deg, count, degrees)
    k = a / b + 1.0
    x = (a + b) * np.cos(t) - h * np.cos(k * t)
    y = (a + b) * np.sin(t) - h * np.sin(k * t)
    return np.column_stack([x, y])


def generate_archimedean_spiral(
    a: float = 2.0,
    t_min: float = 0.0,
    t_max: float = math.pi,
    count: int = 100,
    degrees: bool = False,
) -> np.ndarray:
    """r = a t, x = r cos t, y = r sin t."""
    t = _samples(t_min, t_max, count, degrees)
    r = a * t
    return np.column_stack([r * np.cos(t), r * np.sin(t)])


def generate_vivaldi(
    a: float = 0.5,
    t_min_deg: float = -360.0,
    t_max_deg: float = 360.0,
    count: int = 241,
    degrees: bool = True,
) -> np.ndarray:
    """x = a (1 + cos t), y = a sin t, z = 2 a sin(t / 2)."""
    t = _samples(t_min_deg, t_max_deg, count, degrees)
    return np.column_stack([a * (1.0 + np.cos(t)), a * np.sin(t), 2.0 * a * np.sin(0.5 * t)])


def resolve(spec: CurveSpec) -> dict:
    """Merge a spec with its kind's defaults; rejects unknown curve parameters."""
    defaults = CURVE_DEFAULTS[spec.kind]
    unknown = set(spec.parameters) - set(defaults["parameters"])
    if unknown:
        raise DomainError(f"{spec.kind.value} has no parameter(s) {sorted(unknown)}")
    return {
        "parameters": {**defaults["parameters"], **spec.parameters},
        "t_min": defaults["t_min"] if spec.t_min is None else spec.t_min,
        "t_max": defaults["t_max"] if spec.t_max is None else spec.t_max,
        "degrees": defaults["degrees"] if spec.degrees is None else spec.degrees,
        "sample_count": defaults["sample_count"] if spec.sample_count is None else spec.sample_count,
        "noise_sigma": defaults["noise_sigma"] if spec.noise_sigma is None else spec.noise_sigma,
    }


def add_noise(points: np.ndarray, sigma: float, seed: int) -> np.ndarray:
    """Perturb every coordinate by N(0, sigma^2) drawn from its own seed."""
    if sigma < 0:
        raise DomainError("noise sigma must be non-negative")
    if sigma == 0:
        return points
    rng = np.random.default_rng(seed)
    return points + rng.normal(0.0, sigma, size=points.shape)


def load_points(spec: CurveSpec) -> np.ndarray:
    """Generate or load the points a spec describes; CSV points are used as given."""
    if spec.kind is CurveKind.CSV:
        return load_csv(spec.csv_path)

    values = resolve(spec)
    params = values["parameters"]
    t_min, t_max = values["t_min"], values["t_max"]
    count, degrees = values["sample_count"], values["degrees"]
    if spec.kind is CurveKind.EPITROCHOID:
        points = generate_epitrochoid(params["a"], params["b"], params["h"], t_min, t_max, count, degrees)
    elif spec.kind is CurveKind.ARCHIMEDEAN_SPIRAL:
        points = generate_archimedean_spiral(params["a"], t_min, t_max, count, degrees)
    else:
        points = generate_vivaldi(params["a"], t_min, t_max, count, degrees)
    return add_noise(points, values["noise_sigma"], spec.noise_seed)
