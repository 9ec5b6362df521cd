"""Phase-space representation of Gaussian bosonic states.

Conventions used throughout the package:

* quadrature ordering ``(q_1, ..., q_m, p_1, ..., p_m)``,
* vacuum quadrature variance ``1/2`` (so a coherent state has covariance
  ``I/2`` and displacement ``(sqrt(2) Re a, sqrt(2) Im a)``),
* symplectic form ``Omega = [[0, I], [-I, 0]]``.

States are immutable value objects; every operation returns a new state.
Physicality (``V + i Omega / 2 >= 0``) is validated eagerly at construction,
which is essentially free at the 1-2 mode sizes used here.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import (
    InvalidArgumentError,
    NumericalFailureError,
    PhysicalityViolationError,
)

# Construction-time tolerances.
SYMMETRY_ATOL = 1e-12
PHYSICALITY_EIG_FLOOR = -1e-9

# Fidelity numerics (see `fidelity`).
_COND_LIMIT = 1e12
_EIG_IMAG_TOL = 1e-8
_EIG_ONE_SNAP = 1e-9
_EIG_ONE_FLOOR = 1.0 - 1e-6


def symplectic_form(modes: int) -> np.ndarray:
    """Return the 2m x 2m symplectic form in (q..., p...) ordering."""
    if modes < 1:
        raise InvalidArgumentError("modes must be a positive integer")
    omega = np.zeros((2 * modes, 2 * modes))
    omega[:modes, modes:] = np.eye(modes)
    omega[modes:, :modes] = -np.eye(modes)
    return omega


@dataclass(frozen=True)
class GaussianState:
    """A Gaussian state: covariance matrix, displacement vector, mode count.

    Attributes:
        modes: number of bosonic modes m.
        cov: real symmetric 2m x 2m covariance matrix (vacuum variance 1/2).
        disp: real 2m displacement vector.
    """

    modes: int
    cov: np.ndarray
    disp: np.ndarray

    def __post_init__(self):
        if self.modes < 1:
            raise InvalidArgumentError("modes must be a positive integer")
        cov = np.array(self.cov, dtype=float)
        disp = np.array(self.disp, dtype=float)
        dim = 2 * self.modes
        if cov.shape != (dim, dim):
            raise InvalidArgumentError(
                f"cov must have shape {(dim, dim)}, got {cov.shape}"
            )
        if disp.shape != (dim,):
            raise InvalidArgumentError(
                f"disp must have shape {(dim,)}, got {disp.shape}"
            )
        if not (np.all(np.isfinite(cov)) and np.all(np.isfinite(disp))):
            raise InvalidArgumentError("cov and disp entries must be finite")
        if np.max(np.abs(cov - cov.T)) > SYMMETRY_ATOL:
            raise InvalidArgumentError("cov must be symmetric to 1e-12")
        # Uncertainty relation: V + i Omega / 2 is Hermitian PSD.
        herm = cov + 0.5j * symplectic_form(self.modes)
        smallest = float(np.linalg.eigvalsh(herm)[0])
        if smallest < PHYSICALITY_EIG_FLOOR:
            raise PhysicalityViolationError(
                f"cov violates the uncertainty relation "
                f"(min eig of V + i Omega/2 = {smallest:.3e})"
            )
        cov.setflags(write=False)
        disp.setflags(write=False)
        object.__setattr__(self, "cov", cov)
        object.__setattr__(self, "disp", disp)

    def to_json_dict(self) -> dict:
        """Debug dump: {modes, cov: row-major list, disp: list}."""
        return {
            "modes": self.modes,
            "cov": [float(x) for x in self.cov.ravel()],
            "disp": [float(x) for x in self.disp],
        }


@dataclass(frozen=True)
class ChannelParams:
    """Lossy thermal-noise channel: transmissivity and background photons.

    Attributes:
        eta: transmissivity, strictly inside (0, 1).
        nbar_b: thermal background mean photon number per mode, > 0.
    """

    eta: float
    nbar_b: float

    def __post_init__(self):
        eta = float(self.eta)
        nbar_b = float(self.nbar_b)
        if not np.isfinite(eta) or not 0.0 < eta < 1.0:
            raise InvalidArgumentError("eta must lie strictly inside (0,1)")
        if not np.isfinite(nbar_b) or nbar_b <= 0.0:
            raise InvalidArgumentError("nbar_b must be > 0")
        object.__setattr__(self, "eta", eta)
        object.__setattr__(self, "nbar_b", nbar_b)


def make_coherent(alpha_re: float, alpha_im: float) -> GaussianState:
    """Single-mode coherent state of complex amplitude alpha.

    Covariance I/2, displacement (sqrt(2) Re a, sqrt(2) Im a); mean photon
    number |alpha|^2.
    """
    if not (np.isfinite(alpha_re) and np.isfinite(alpha_im)):
        raise InvalidArgumentError("coherent amplitude must be finite")
    disp = np.array([np.sqrt(2.0) * alpha_re, np.sqrt(2.0) * alpha_im])
    return GaussianState(1, 0.5 * np.eye(2), disp)


def make_thermal(nbar: float) -> GaussianState:
    """Single-mode thermal state with mean photon number nbar >= 0.

    Covariance (nbar + 1/2) I, zero displacement; geometric (Bose-Einstein)
    photon-number distribution.
    """
    if not np.isfinite(nbar) or nbar < 0.0:
        raise InvalidArgumentError("thermal mean photon number must be >= 0")
    return GaussianState(1, (nbar + 0.5) * np.eye(2), np.zeros(2))


def make_tmsv(nbar_s: float) -> GaussianState:
    """Two-mode squeezed vacuum with per-mode mean photon number nbar_s.

    Squeezing parameter xi = arcsinh(sqrt(nbar_s)); covariance blocks
    cosh(2 xi)/2 on the diagonal and +/- sinh(2 xi)/2 off-diagonal, with the
    sign flipped between the q and p blocks. Zero displacement.
    """
    if not np.isfinite(nbar_s) or nbar_s < 0.0:
        raise InvalidArgumentError("nbar_s must be >= 0")
    xi = np.arcsinh(np.sqrt(nbar_s))
    ch = 0.5 * np.cosh(2.0 * xi)
    sh = 0.5 * np.sinh(2.0 * xi)
    cov = np.array(
        [
            [ch, sh, 0.0, 0.0],
            [sh, ch, 0.0, 0.0],
            [0.0, 0.0, ch, -sh],
            [0.0, 0.0, -sh, ch],
        ]
    )
    return GaussianState(2, cov, np.zeros(4))


def _check_mode(state: GaussianState, mode: int) -> None:
    if not 0 <= mode < state.modes:
        raise InvalidArgumentError(
            f"mode index {mode} out of range for {state.modes}-mode state"
        )


def apply_phase(state: GaussianState, theta: float, mode: int = 0) -> GaussianState:
    """Rotate one mode by theta in phase space.

    The rotation acts as [[cos, sin], [-sin, cos]] on the (q_mode, p_mode)
    plane and as the identity elsewhere.
    """
    _check_mode(state, mode)
    if not np.isfinite(theta):
        raise InvalidArgumentError("theta must be finite")
    m = state.modes
    x = np.eye(2 * m)
    i, j = mode, m + mode
    c, s = np.cos(theta), np.sin(theta)
    x[i, i] = c
    x[i, j] = s
    x[j, i] = -s
    x[j, j] = c
    return GaussianState(m, x @ state.cov @ x.T, x @ state.disp)


def apply_loss_thermal(
    state: GaussianState, ch: ChannelParams, mode: int = 0
) -> GaussianState:
    """Send one mode through the lossy thermal-noise channel.

    V -> X V X^T + Y and d -> X d with X = sqrt(eta) I and
    Y = (1 - eta)(nbar_b + 1/2) I on the selected mode, identity elsewhere.
    The thermal environment has zero mean, so no displacement is added.
    """
    _check_mode(state, mode)
    m = state.modes
    x = np.eye(2 * m)
    y = np.zeros((2 * m, 2 * m))
    i, j = mode, m + mode
    root_eta = np.sqrt(ch.eta)
    x[i, i] = root_eta
    x[j, j] = root_eta
    noise = (1.0 - ch.eta) * (ch.nbar_b + 0.5)
    y[i, i] = noise
    y[j, j] = noise
    return GaussianState(m, x @ state.cov @ x.T + y, x @ state.disp)


def mean_photon_number(state: GaussianState, mode: int = 0) -> float:
    """Mean photon number of one mode: (Vqq + Vpp + dq^2 + dp^2)/2 - 1/2."""
    _check_mode(state, mode)
    i, j = mode, state.modes + mode
    return 0.5 * (
        state.cov[i, i] + state.cov[j, j] + state.disp[i] ** 2 + state.disp[j] ** 2
    ) - 0.5


def symplectic_eigenvalues(state: GaussianState) -> np.ndarray:
    """Symplectic spectrum of the covariance matrix, ascending.

    Values are >= 1/2 for physical states, with equality on pure modes.
    """
    ev = np.linalg.eigvals(1j * symplectic_form(state.modes) @ state.cov)
    nu = np.sort(np.abs(ev))
    # eigenvalues come in +/- pairs; keep one representative of each
    return nu[::2].copy() if len(nu) > 1 else nu


def fidelity(s1: GaussianState, s2: GaussianState) -> float:
    """Square-root (amplitude) fidelity between two Gaussian states.

    Computes ``F = F0 * exp(-delta^T (V1+V2)^{-1} delta / 4)`` with
    ``F0 = Ftot / det(V1+V2)^{1/4}`` and
    ``Ftot = prod_k (w_k + sqrt(w_k^2 - 1))^{1/2}``, the product running over
    the positive eigenvalues ``w_k`` of ``W = -2i V_aux Omega`` where
    ``V_aux = Omega^T (V1+V2)^{-1} (Omega/4 + V2 Omega V1)``.

    For pure states this equals the magnitude of the overlap, e.g.
    ``exp(-|a-b|^2 / 2)`` for coherent states.

    Raises:
        InvalidArgumentError: mode counts differ.
        NumericalFailureError: (V1+V2) is numerically singular.
        PhysicalityViolationError: some eigenvalue w_k < 1 - 1e-6, or a
            non-negligible imaginary component appears in the spectrum.
    """
    if s1.modes != s2.modes:
        raise InvalidArgumentError(
            f"mode counts differ: {s1.modes} vs {s2.modes}"
        )
    m = s1.modes
    omega = symplectic_form(m)
    vsum = s1.cov + s2.cov

    # Condition guard on the SPD sum before inverting.
    sum_eigs = np.linalg.eigvalsh(vsum)
    if sum_eigs[0] <= 0.0 or sum_eigs[-1] / sum_eigs[0] > _COND_LIMIT:
        raise NumericalFailureError(
            f"V1+V2 numerically singular (eigs {sum_eigs[0]:.3e}..{sum_eigs[-1]:.3e})"
        )
    vsum_inv = np.linalg.inv(vsum)

    cov_scale = max(1.0, np.max(np.abs(s1.cov)), np.max(np.abs(s2.cov)))
    if np.max(np.abs(s1.cov - s2.cov)) <= SYMMETRY_ATOL * cov_scale:
        # Equal covariances make F0 identically 1 (per symplectic mode,
        # w + sqrt(w^2-1) = 2 nu cancels det(V1+V2)^(1/4) exactly). Taking
        # this branch avoids the sqrt(w^2-1) noise amplification that would
        # otherwise dominate near-pure states.
        delta = s2.disp - s1.disp
        return float(np.exp(-0.25 * delta @ vsum_inv @ delta))

    v_aux = omega.T @ vsum_inv @ (omega / 4.0 + s2.cov @ omega @ s1.cov)
    w_eigs = np.linalg.eigvals(-2j * (v_aux @ omega))

    # Spectrum comes in +/- w_k pairs; keep the m with positive real part.
    positive = [w for w in w_eigs if w.real > 0.0]
    if len(positive) != m:
        raise NumericalFailureError(
            f"expected {m} positive eigenvalues of W, got {len(positive)}"
        )
    f_tot = 1.0 + 0.0j
    for w in positive:
        if abs(w.imag) > _EIG_IMAG_TOL * max(1.0, abs(w.real)):
            raise PhysicalityViolationError(
                f"eigenvalue of W has non-negligible imaginary part: {w}"
            )
        wr = w.real
        if wr < _EIG_ONE_FLOOR:
            raise PhysicalityViolationError(
                f"eigenvalue of W below 1: {wr!r} (states unphysical?)"
            )
        if abs(wr - 1.0) <= _EIG_ONE_SNAP:
            # Jointly-pure case: w = 1 exactly; snapping removes sqrt-of-noise
            # amplification, which would otherwise cost ~1e-8 of accuracy.
            wr = 1.0
        f_tot *= np.sqrt(wr + np.sqrt(np.complex128(wr * wr - 1.0)))

    f0 = f_tot / np.linalg.det(vsum) ** 0.25
    delta = s2.disp - s1.disp
    value = f0 * np.exp(-0.25 * delta @ vsum_inv @ delta)
    if abs(value.imag) > 1e-7 * max(1.0, abs(value.real)):
        raise NumericalFailureError(f"fidelity came out complex: {value}")
    result = float(value.real)
    if result > 1.0 + 1e-9:
        raise NumericalFailureError(f"fidelity exceeds 1: {result!r}")
    return min(max(result, 0.0), 1.0)
