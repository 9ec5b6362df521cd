"""Detectability analysis for the covert sensor.

The adversary sees thermal light with per-mode mean eta*nbar_b when the
sensor is idle and (1-eta)*nbar_s + eta*nbar_b when a Gaussian-modulated
coherent probe is transmitted. This module provides the relative entropy
between those hypotheses, the Pinsker-type lower bound on the adversary's
detection error, the photon budget that pins that bound to 1/2 - eps, and
the Chebyshev threshold-detector bounds used on the converse side.
"""

from __future__ import annotations

import enum
import typing
from dataclasses import dataclass

import numpy as np

from .errors import InvalidArgumentError
from .gaussian import ChannelParams

if typing.TYPE_CHECKING:  # pragma: no cover - import cycle guard
    from .metrology import MomentSpec


class VarianceConvention(enum.Enum):
    """Per-mode variance model for the adversary's thermal photon count.

    AS_PRINTED applies the collection efficiency squared to the raw
    background variance, eta^2 (nbar_b + nbar_b^2). A thermal state of mean
    eta*nbar_b actually has Bose-Einstein variance eta*nbar_b (1+eta*nbar_b);
    BOSE_EINSTEIN selects that instead. Both are O(1) per mode, so the
    detector's scaling conclusions are identical; the discrepancy is kept
    selectable rather than silently corrected.
    """

    AS_PRINTED = "as_printed"
    BOSE_EINSTEIN = "bose_einstein"


@dataclass(frozen=True)
class CovertBudget:
    """Per-mode photon budget meeting a covertness target.

    nbar_s = 4 eps sqrt(eta nbar_b (1 + eta nbar_b)) / (sqrt(n) (1 - eta)),
    the unique value at which `detection_error_lower_bound` equals 1/2 - eps.
    """

    epsilon: float
    n: int
    nbar_s: float

    def __post_init__(self):
        if not 0.0 < self.epsilon < 0.5:
            raise InvalidArgumentError("epsilon must lie strictly inside (0, 1/2)")
        if int(self.n) < 1:
            raise InvalidArgumentError("n must be a positive integer")
        if not np.isfinite(self.nbar_s) or self.nbar_s <= 0.0:
            raise InvalidArgumentError("nbar_s must be > 0")
        object.__setattr__(self, "n", int(self.n))


@dataclass(frozen=True)
class AdversaryModel:
    """Adversary's collection and detector parameters.

    Attributes:
        gamma: fraction of transmitted photons captured, in (0, 1 - eta];
            None selects the full leaked fraction 1 - eta.
        dark_rate: Poisson dark-count rate, photons per mode.
        variance_convention: see VarianceConvention.
    """

    gamma: float | None = None
    dark_rate: float = 0.0
    variance_convention: VarianceConvention = VarianceConvention.AS_PRINTED

    def __post_init__(self):
        if self.gamma is not None and not 0.0 < self.gamma < 1.0:
            raise InvalidArgumentError("gamma must lie in (0, 1)")
        if not np.isfinite(self.dark_rate) or self.dark_rate < 0.0:
            raise InvalidArgumentError("dark_rate must be >= 0")

    def resolve_gamma(self, ch: ChannelParams) -> float:
        """Captured fraction for this channel, defaulting to 1 - eta."""
        if self.gamma is None:
            return 1.0 - ch.eta
        if self.gamma > 1.0 - ch.eta + 1e-15:
            raise InvalidArgumentError(
                f"gamma={self.gamma} exceeds the leaked fraction 1-eta={1 - ch.eta}"
            )
        return self.gamma


@dataclass(frozen=True)
class DetectionBounds:
    """Threshold-detector bounds for one operating point.

    p_fa_bound / p_md_bound are Chebyshev upper bounds on false alarm and
    missed detection (clamped to [0, 1]); threshold_s is the photon-count
    threshold; p_e_lower is the measurement-independent error floor from the
    relative-entropy chain. uses_printed_capture records whether the
    captured fraction equals the full leak 1 - eta, the reference case the
    bound formulas are usually quoted for.
    """

    p_fa_bound: float
    p_md_bound: float
    threshold_s: float
    p_e_lower: float
    uses_printed_capture: bool = True


def qre_thermal(nbar_s: float, ch: ChannelParams) -> float:
    """Relative entropy D(rho0 || rho1) between the adversary's hypotheses.

    Equals the classical KL divergence between geometric photon-count
    distributions with means eta*nbar_b and (1-eta)*nbar_s + eta*nbar_b:

    eta nbar_b ln[ (1+mu1) mu0 / (mu1 (1+mu0)) ] + ln[ (1+mu1) / (1+mu0) ].
    """
    if not np.isfinite(nbar_s) or nbar_s < 0.0:
        raise InvalidArgumentError("nbar_s must be >= 0")
    if nbar_s == 0.0:
        return 0.0
    mu0 = ch.eta * ch.nbar_b
    mu1 = (1.0 - ch.eta) * nbar_s + mu0
    return mu0 * np.log((1.0 + mu1) * mu0 / (mu1 * (1.0 + mu0))) + np.log(
        (1.0 + mu1) / (1.0 + mu0)
    )


def qre_quadratic_bound(nbar_s: float, ch: ChannelParams) -> float:
    """Quadratic upper bound on `qre_thermal`:

    (1-eta)^2 nbar_s^2 / (2 eta nbar_b (1 + eta nbar_b)).
    """
    if not np.isfinite(nbar_s) or nbar_s < 0.0:
        raise InvalidArgumentError("nbar_s must be >= 0")
    mu0 = ch.eta * ch.nbar_b
    return (1.0 - ch.eta) ** 2 * nbar_s ** 2 / (2.0 * mu0 * (1.0 + mu0))


def detection_error_lower_bound(nbar_s: float, n: int, ch: ChannelParams) -> float:
    """Floor on the adversary's detection error over n modes.

    max(0, 1/2 - (1-eta) nbar_s sqrt(n) / (4 sqrt(eta nbar_b (1+eta nbar_b)))),
    valid for any physically allowed measurement.
    """
    if not np.isfinite(nbar_s) or nbar_s < 0.0:
        raise InvalidArgumentError("nbar_s must be >= 0")
    if int(n) < 1:
        raise InvalidArgumentError("n must be a positive integer")
    mu0 = ch.eta * ch.nbar_b
    drop = (1.0 - ch.eta) * nbar_s * np.sqrt(n) / (4.0 * np.sqrt(mu0 * (1.0 + mu0)))
    return max(0.0, 0.5 - drop)


def covert_budget(epsilon: float, n: int, ch: ChannelParams) -> CovertBudget:
    """Photon budget per mode so the detection error floor is 1/2 - eps."""
    if not np.isfinite(epsilon) or not 0.0 < epsilon < 0.5:
        raise InvalidArgumentError("epsilon must lie strictly inside (0, 1/2)")
    if int(n) < 1:
        raise InvalidArgumentError("n must be a positive integer")
    mu0 = ch.eta * ch.nbar_b
    nbar_s = 4.0 * epsilon * np.sqrt(mu0 * (1.0 + mu0)) / (np.sqrt(n) * (1.0 - ch.eta))
    return CovertBudget(epsilon=epsilon, n=int(n), nbar_s=nbar_s)


def adversary_noise_moments(
    n: int, adv: AdversaryModel, ch: ChannelParams
) -> tuple[float, float]:
    """Total mean and variance of the adversary's noise count over n modes.

    Mean per mode is dark_rate + eta*nbar_b. The thermal part of the variance
    follows the selected convention; the Poisson dark counts always add
    dark_rate per mode.
    """
    if int(n) < 1:
        raise InvalidArgumentError("n must be a positive integer")
    mu0 = ch.eta * ch.nbar_b
    mean_total = n * (adv.dark_rate + mu0)
    if adv.variance_convention is VarianceConvention.AS_PRINTED:
        thermal_var = ch.eta ** 2 * (ch.nbar_b + ch.nbar_b ** 2)
    else:
        thermal_var = mu0 * (1.0 + mu0)
    var_total = n * adv.dark_rate + n * thermal_var
    return float(mean_total), float(var_total)


def chebyshev_detector(
    n: int,
    spec: "MomentSpec",
    adv: AdversaryModel,
    ch: ChannelParams,
    p_fa_target: float,
) -> DetectionBounds:
    """Threshold test on the total photon count, with Chebyshev bounds.

    The threshold S = n nbar_N + sqrt(var_N / p_fa_target) pins the Chebyshev
    false-alarm bound to p_fa_target. The missed-detection bound is
    (var_N + gamma^2 <dN_S^2>) / (gamma <N_S> - sqrt(var_N / p_fa_target))^2,
    reported as 1 when the signal mean does not clear the threshold margin.
    gamma defaults to the full leaked fraction 1 - eta.
    """
    if not 0.0 < p_fa_target < 1.0:
        raise InvalidArgumentError("p_fa_target must lie strictly inside (0, 1)")
    if int(n) != int(spec.n):
        raise InvalidArgumentError(
            f"mode count mismatch: n={n} but moments describe n={spec.n}"
        )
    gamma = adv.resolve_gamma(ch)
    mean_noise, var_noise = adversary_noise_moments(n, adv, ch)
    excess = np.sqrt(var_noise / p_fa_target)
    threshold_s = mean_noise + excess

    p_fa = var_noise / excess ** 2 if excess > 0.0 else 1.0
    signal_mean = gamma * spec.n_s_total
    margin = signal_mean - excess
    if margin <= 0.0:
        p_md = 1.0
    else:
        p_md = (var_noise + gamma ** 2 * spec.var_n_s) / margin ** 2
    return DetectionBounds(
        p_fa_bound=min(max(p_fa, 0.0), 1.0),
        p_md_bound=min(max(p_md, 0.0), 1.0),
        threshold_s=float(threshold_s),
        p_e_lower=detection_error_lower_bound(spec.n_s_total / n, n, ch),
        uses_printed_capture=bool(abs(gamma - (1.0 - ch.eta)) < 1e-15),
    )
