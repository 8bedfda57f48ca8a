"""Partial-wave channels for a flux line with an attractive 1/rho^2 core.

The radial equation for angular index m is Bessel-like with effective
order nu^2 = (m - beta)^2 - gamma^2, beta the flux in flux-quantum units
and gamma^2 = 2 M kappa^2 the core strength.  Three regimes:

* Regular      |m - beta| > sqrt(1 + gamma^2): only J_mu is admissible,
               nothing to choose, the mode scatters elastically.
* Subcritical  gamma < |m - beta| < sqrt(1 + gamma^2): both rho^{+mu} and
               rho^{-mu} behaviors are normalizable; a one-parameter
               family of elastic boundary conditions (l_m) exists.
* Supercritical |m - beta| < gamma: the order is imaginary, the solution
               oscillates in ln rho near the origin ("fall to the
               center"); boundary models range from elastic reflection
               (theta_m) through a perfectly absorbing sink.

Conventions: time dependence e^{-iEt}, so H^(1) is outgoing and H^(2)
ingoing; asymptotic channel form R_m ~ a_m H^(1)_ord + b_m H^(2)_ord with
ord = mu (subcritical) or i mu (supercritical).  Internally b_m = 1; all
observables depend on the ratio a_m / b_m only.  S-matrix phases:

    Regular        S_m = e^{i pi (m - mu)}
    Subcritical    S_m = e^{i pi (m - mu)} (a_m / b_m)
    Supercritical  S_m = e^{i pi m} e^{pi mu} (a_m / b_m)

Default mass M = 1/2 makes the stationary equation read
R'' + R'/rho + (p^2 - nu^2/rho^2) R = 0 with no stray factors.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import (
    ConfigError,
    DegenerateModeError,
    ForwardDirectionError,
    IncompleteRangeError,
    ModelRegimeMismatch,
    UnitarityViolation,
)
from .specfun import complex_gamma

__all__ = [
    "Regime",
    "ScatteringConfig",
    "PartialMode",
    "ElasticSubcritical",
    "ElasticSupercritical",
    "Sink",
    "TotalAbsorption",
    "Custom",
    "ChannelSolution",
    "CrossSectionReport",
    "classify_mode",
    "nonregular_modes",
    "tail_mode_bound",
    "solve_channel",
    "elastic_supercritical_smatrix",
    "physical_coefficients",
    "partial_current",
    "amplitude",
    "ab_amplitude_closed",
    "cross_sections",
    "PHI_MIN",
]

# forward-cone exclusion for the scattering amplitude (rad); the flux-line
# amplitude diverges at phi = 0 like 1/sin(phi/2)
PHI_MIN = 1e-3

# half-width of the critical bands treated as degenerate
REGIME_EPS = 1e-9


class Regime:
    REGULAR = "Regular"
    SUBCRITICAL = "Subcritical"
    SUPERCRITICAL = "Supercritical"


@dataclass(frozen=True)
class ScatteringConfig:
    """Potential and kinematics: flux beta, core strength gamma, wavenumber p.

    gamma^2 = 2 M kappa^2 for core potential -kappa^2 / rho^2.  mass enters
    only through probability-current normalization.
    """

    beta: float
    gamma: float
    p: float
    mass: float = 0.5

    def __post_init__(self) -> None:
        if not 0.0 <= self.beta < 1.0:
            raise ConfigError(f"beta={self.beta} outside [0, 1)")
        if self.gamma < 0.0:
            raise ConfigError(f"gamma={self.gamma} must be >= 0")
        if not self.p > 0.0:
            raise ConfigError(f"p={self.p} must be > 0")
        if not self.mass > 0.0:
            raise ConfigError(f"mass={self.mass} must be > 0")

    @property
    def critical_upper(self) -> float:
        """|m - beta| above this is Regular."""
        return math.sqrt(1.0 + self.gamma**2)


@dataclass(frozen=True)
class PartialMode:
    m: int
    nu_squared: float
    mu: float
    regime: str


# ---------------------------------------------------------------------
# boundary models
# ---------------------------------------------------------------------


@dataclass(frozen=True)
class ElasticSubcritical:
    """Self-adjoint boundary condition R -> B(rho^mu + l rho^{-mu}), l real.

    l = 0 keeps the regular branch.  Optionally per-mode values override
    the shared default.
    """

    l: float = 0.0
    per_mode: dict = field(default_factory=dict)

    def value(self, m: int) -> float:
        return float(self.per_mode.get(m, self.l))


@dataclass(frozen=True)
class ElasticSupercritical:
    """Reflecting core phase: R -> B(rho^{i mu} + e^{i theta} rho^{-i mu})."""

    theta: float = 0.0
    per_mode: dict = field(default_factory=dict)

    def value(self, m: int) -> float:
        return float(self.per_mode.get(m, self.theta))


@dataclass(frozen=True)
class Sink:
    """Purely ingoing wave at the origin (perfect absorber), R ~ J_{-i mu}.

    Defined for supercritical modes; subcritical modes under this model
    fall back to the regular elastic branch (they cannot reach the core).
    """


@dataclass(frozen=True)
class TotalAbsorption:
    """S_m = 0 on a closed window of modes [-n_minus, n_plus].

    Windowed modes keep only the ingoing Hankel wave; every non-Regular
    mode outside the window gets the default elastic condition (l = 0 or
    theta = 0).  The window may not contain Regular modes: a Regular mode
    has a single admissible solution and cannot be forced silent.
    """

    n_minus: int = 0
    n_plus: int = 0

    def __post_init__(self) -> None:
        if self.n_minus < 0 or self.n_plus < 0:
            raise ConfigError("total-absorption window bounds must be >= 0")

    def covers(self, m: int) -> bool:
        return -self.n_minus <= m <= self.n_plus


@dataclass(frozen=True)
class Custom:
    """Explicit a_m / b_m per non-Regular mode; |S_m| <= 1 enforced."""

    ratios: dict = field(default_factory=dict)

    def value(self, m: int) -> complex:
        if m not in self.ratios:
            raise ConfigError(f"custom model has no ratio for mode m={m}")
        return complex(self.ratios[m])


BoundaryModel = (
    ElasticSubcritical | ElasticSupercritical | Sink | TotalAbsorption | Custom
)


# ---------------------------------------------------------------------
# classification
# ---------------------------------------------------------------------


def classify_mode(cfg: ScatteringConfig, m: int) -> PartialMode:
    """Place angular index m into its regime.

    Exactly critical modes (|m - beta| within 1e-9 of gamma or of
    sqrt(1 + gamma^2)) are rejected: they need logarithmic solutions this
    package does not carry.  The exception is the free field beta = gamma
    = 0, where every mode is Regular with mu = |m| and scatters nothing.
    """
    dm = abs(m - cfg.beta)
    if cfg.beta == 0.0 and cfg.gamma == 0.0:
        return PartialMode(m=m, nu_squared=dm * dm, mu=dm, regime=Regime.REGULAR)
    upper = cfg.critical_upper
    if abs(dm - cfg.gamma) < REGIME_EPS or abs(dm - upper) < REGIME_EPS:
        raise DegenerateModeError(
            f"mode m={m} sits on a regime boundary (|m-beta|={dm}, "
            f"gamma={cfg.gamma}, upper={upper})"
        )
    nu2 = dm * dm - cfg.gamma**2
    mu = math.sqrt(abs(nu2))
    if dm > upper:
        regime = Regime.REGULAR
    elif dm > cfg.gamma:
        regime = Regime.SUBCRITICAL
    else:
        regime = Regime.SUPERCRITICAL
    return PartialMode(m=m, nu_squared=nu2, mu=mu, regime=regime)


def nonregular_modes(cfg: ScatteringConfig) -> list[int]:
    """All m with |m - beta| < sqrt(1 + gamma^2), ascending."""
    upper = cfg.critical_upper
    lo = math.ceil(cfg.beta - upper)
    hi = math.floor(cfg.beta + upper)
    out = []
    for m in range(lo, hi + 1):
        if abs(m - cfg.beta) < upper - REGIME_EPS:
            out.append(m)
    return out


def tail_mode_bound(cfg: ScatteringConfig) -> int:
    """Angular cutoff beyond which the pure-flux tail resummation is used."""
    return max(20, math.ceil(10.0 * cfg.critical_upper))


# ---------------------------------------------------------------------
# channel solves
# ---------------------------------------------------------------------


def _subcritical_ratio_from_l(cfg: ScatteringConfig, mode: PartialMode, l: float) -> complex:
    """a/b realizing the small-rho condition A = l B for R = A rho^{-mu} + B rho^{mu}.

    Expanding a H1_mu + b H2_mu near the origin through J_{+-mu} gives
        A propto (a - b),    B propto (b e^{i mu pi} - a e^{-i mu pi}),
    and solving A = l B for r = a/b yields
        r = (1 + t e^{i mu pi}) / (1 + t e^{-i mu pi}),
        t = l (p/2)^{2 mu} Gamma(1 - mu) / Gamma(1 + mu).
    Real l makes |r| = 1 exactly (elastic); l = 0 gives r = 1, the regular
    branch, reproducing the Regular-regime phase.
    """
    mu = mode.mu
    t = (
        l
        * (0.5 * cfg.p) ** (2.0 * mu)
        * (complex_gamma(1.0 - mu) / complex_gamma(1.0 + mu)).real
    )
    ph = cmath.exp(1j * math.pi * mu)
    num = 1.0 + t * ph
    den = 1.0 + t / ph
    if abs(den) < 1e-300:
        raise DegenerateModeError(
            f"boundary parameter l={l} hits the singular condition at mode m={mode.m}"
        )
    r = num / den
    # real t makes num and den conjugates; renormalize away rounding
    return r / abs(r)


def _supercritical_ratio_from_theta(
    cfg: ScatteringConfig, mode: PartialMode, theta: float
) -> complex:
    """a/b realizing R -> B(rho^{i mu} + e^{i theta} rho^{-i mu}) at the origin.

    With Phi = (p/2)^{-2 i mu} Gamma(1 + i mu) / Gamma(1 - i mu) (unit
    modulus), psi = theta - arg Phi:
        r = (1 + e^{i psi} e^{-pi mu}) / (1 + e^{i psi} e^{+pi mu}).
    Then |S| = e^{pi mu} |r| = 1 for every theta: the core reflects.
    """
    mu = mode.mu
    phi_factor = (
        cmath.exp(-2j * mu * math.log(0.5 * cfg.p))
        * complex_gamma(complex(1.0, mu))
        / complex_gamma(complex(1.0, -mu))
    )
    psi = theta - cmath.phase(phi_factor)
    e_ipsi = cmath.exp(1j * psi)
    num = 1.0 + e_ipsi * math.exp(-math.pi * mu)
    den = 1.0 + e_ipsi * math.exp(math.pi * mu)
    r = num / den
    # exact elastic condition: |r| = e^{-pi mu}
    return r * (math.exp(-math.pi * mu) / abs(r))


def elastic_supercritical_smatrix(mode: PartialMode, theta: float, cfg: ScatteringConfig) -> complex:
    """S_m for the reflecting-core condition; |S_m| = 1 by construction."""
    if mode.regime != Regime.SUPERCRITICAL:
        raise ModelRegimeMismatch(
            f"reflecting-core condition needs a supercritical mode, got {mode.regime}"
        )
    r = _supercritical_ratio_from_theta(cfg, mode, theta)
    s = cmath.exp(1j * math.pi * mode.m) * math.exp(math.pi * mode.mu) * r
    return s / abs(s)


def _regular_solution(cfg: ScatteringConfig, mode: PartialMode) -> "ChannelSolution":
    s = cmath.exp(1j * math.pi * (mode.m - mode.mu))
    return ChannelSolution(
        mode=mode, a=0.5 + 0.0j, b=0.5 + 0.0j, s_matrix=s,
        sigma_abs=0.0, _cfg=cfg,
    )


def _resolve(model: BoundaryModel, mode: PartialMode):
    """Per-mode model resolution; returns a (kind, parameter) action.

    A single model instance typically spans modes of different regimes in
    one run; the fallbacks below keep that meaningful: a Sink cannot act
    on a subcritical mode (no classical capture), so such modes keep the
    regular elastic branch, and modes outside a total-absorption window
    get the default elastic condition.
    """
    regime = mode.regime
    if regime == Regime.REGULAR:
        if isinstance(model, TotalAbsorption) and model.covers(mode.m):
            raise ModelRegimeMismatch(
                f"total-absorption window covers Regular mode m={mode.m}, "
                "which has no ingoing-only solution"
            )
        return ("regular", None)
    if isinstance(model, ElasticSubcritical):
        if regime != Regime.SUBCRITICAL:
            raise ModelRegimeMismatch(
                f"subcritical boundary parameter given to {regime} mode m={mode.m}"
            )
        return ("elastic_sub", model.value(mode.m))
    if isinstance(model, ElasticSupercritical):
        if regime != Regime.SUPERCRITICAL:
            raise ModelRegimeMismatch(
                f"reflecting-core phase given to {regime} mode m={mode.m}"
            )
        return ("elastic_super", model.value(mode.m))
    if isinstance(model, Sink):
        if regime == Regime.SUPERCRITICAL:
            return ("sink", None)
        return ("elastic_sub", 0.0)
    if isinstance(model, TotalAbsorption):
        if model.covers(mode.m):
            return ("total", None)
        if regime == Regime.SUBCRITICAL:
            return ("elastic_sub", 0.0)
        return ("elastic_super", 0.0)
    if isinstance(model, Custom):
        return ("custom", model.value(mode.m))
    raise ConfigError(f"unknown boundary model {model!r}")


def solve_channel(
    cfg: ScatteringConfig, mode: PartialMode, model: BoundaryModel
) -> "ChannelSolution":
    """Fix (a_m, b_m) for one mode under a boundary model and form S_m.

    Regular modes ignore the model (their solution is unique).  The
    internal normalization is b_m = 1 for non-Regular modes and c_m = 1
    (a = b = 1/2) for Regular ones; observables use ratios only.
    """
    action, param = _resolve(model, mode)
    if action == "regular":
        return _regular_solution(cfg, mode)

    mu = mode.mu
    if action == "elastic_sub":
        r = _subcritical_ratio_from_l(cfg, mode, param)
    elif action == "elastic_super":
        r = _supercritical_ratio_from_theta(cfg, mode, param)
    elif action == "sink":
        # R = c J_{-i mu}: with J_{-nu} = (e^{nu pi i} H1 + e^{-nu pi i} H2)/2
        # and nu = i mu, the ratio is e^{-mu pi} / e^{+mu pi}
        r = complex(math.exp(-2.0 * math.pi * mu))
    elif action == "total":
        r = 0.0 + 0.0j
    elif action == "custom":
        r = complex(param)
    else:  # pragma: no cover
        raise ConfigError(f"unhandled action {action}")

    if mode.regime == Regime.SUBCRITICAL:
        s = cmath.exp(1j * math.pi * (mode.m - mu)) * r
    else:
        s = cmath.exp(1j * math.pi * mode.m) * math.exp(math.pi * mu) * r

    mod = abs(s)
    if mod > 1.0 + 1e-12:
        raise UnitarityViolation(
            f"|S|={mod} > 1 for mode m={mode.m} (ratio {r})"
        )
    if action in ("elastic_sub", "elastic_super"):
        sigma = 0.0  # exact: |S| = 1 is enforced analytically above
        s = s / mod
    else:
        sigma = (1.0 - min(mod, 1.0) ** 2) / cfg.p
    return ChannelSolution(
        mode=mode, a=r, b=1.0 + 0.0j, s_matrix=s, sigma_abs=sigma, _cfg=cfg,
    )


# ---------------------------------------------------------------------
# per-channel record
# ---------------------------------------------------------------------


@dataclass(frozen=True)
class ChannelSolution:
    """One solved partial wave: coefficients, S_m, and derived scalars."""

    mode: PartialMode
    a: complex
    b: complex
    s_matrix: complex
    sigma_abs: float
    _cfg: ScatteringConfig

    @property
    def c(self) -> complex:
        """Single-solution coefficient for Regular modes (R = c J_mu)."""
        return self.a + self.b

    @property
    def delta(self) -> complex | None:
        """Phase shift with S = e^{2 i delta}; None when S = 0 (no phase)."""
        if self.s_matrix == 0:
            return None
        return cmath.log(self.s_matrix) / 2j

    @property
    def f_coeff(self) -> complex:
        """Mode coefficient (e^{-i pi/4}/p)(S_m - cos(pi beta)).

        This is the per-mode absorption-problem normalization; the angular
        amplitude assembled by amplitude() carries 1/sqrt(2 pi p) instead,
        i.e. f_m^{angular} = f_coeff * sqrt(p / (2 pi)).
        """
        return (
            cmath.exp(-0.25j * math.pi)
            / self._cfg.p
            * (self.s_matrix - math.cos(math.pi * self._cfg.beta))
        )


def physical_coefficients(sol: ChannelSolution) -> tuple[complex, complex]:
    """(a, b) rescaled to the unit-incident-wave normalization.

    The incident flux-adapted plane wave assigns each mode the ingoing
    coefficient b_m = (1/2) e^{i pi m} e^{+pi mu/2} (supercritical) or
    (1/2) e^{i pi m} e^{-i pi mu/2} (subcritical).  With this scaling the
    flux balance p sigma_m = -M (2 pi rho j_m) holds exactly.
    """
    mode = sol.mode
    if mode.regime == Regime.SUPERCRITICAL:
        scale = 0.5 * cmath.exp(1j * math.pi * mode.m) * math.exp(0.5 * math.pi * mode.mu)
    elif mode.regime == Regime.SUBCRITICAL:
        scale = 0.5 * cmath.exp(1j * math.pi * mode.m) * cmath.exp(-0.5j * math.pi * mode.mu)
    else:
        scale = 1.0 + 0.0j
    return sol.a * scale, sol.b * scale


def partial_current(
    cfg: ScatteringConfig,
    mode: PartialMode,
    a: complex,
    b: complex,
    rho: float,
) -> float:
    """Radial probability current of one mode at radius rho (closed form).

    Subcritical:   j = 2/(pi M rho) (|a|^2 - |b|^2)
    Supercritical: j = 2/(pi M rho) (|a|^2 e^{pi mu} - |b|^2 e^{-pi mu})
    Negative values mean net inflow (absorption).  Regular modes carry
    identically zero net current; exact 0.0 is returned.
    """
    if rho <= 0.0:
        raise ConfigError(f"rho={rho} must be > 0")
    if mode.regime == Regime.REGULAR:
        return 0.0
    pref = 2.0 / (math.pi * cfg.mass * rho)
    if mode.regime == Regime.SUBCRITICAL:
        return pref * (abs(a) ** 2 - abs(b) ** 2)
    e = math.exp(math.pi * mode.mu)
    return pref * (abs(a) ** 2 * e - abs(b) ** 2 / e)


# ---------------------------------------------------------------------
# amplitudes and cross sections
# ---------------------------------------------------------------------


def _wrap_angle(phi: float) -> float:
    """Reduce to (-pi, pi]."""
    w = math.fmod(phi + math.pi, 2.0 * math.pi)
    if w <= 0.0:
        w += 2.0 * math.pi
    return w - math.pi


def _ab_smatrix(beta: float, m: int) -> complex:
    """Pure-flux S-matrix e^{i pi (m - |m - beta|)} for 0 <= beta < 1."""
    if m >= 1:
        return cmath.exp(1j * math.pi * beta)
    return cmath.exp(-1j * math.pi * beta)


def ab_amplitude_closed(cfg: ScatteringConfig, phi: float) -> complex:
    """Closed-form pure-flux (gamma = 0) amplitude.

    f_AB(phi) = -(e^{-i pi/4}/sqrt(2 pi p)) sin(pi beta) e^{i phi/2}/sin(phi/2),
    the Abel-summed full mode series; |f_AB| = sin(pi beta)/(sqrt(2 pi p)
    |sin(phi/2)|).
    """
    w = _wrap_angle(phi)
    if abs(w) < PHI_MIN:
        raise ForwardDirectionError(
            f"phi={phi} is inside the excluded forward cone (|phi| < {PHI_MIN})"
        )
    c = cmath.exp(-0.25j * math.pi) / math.sqrt(2.0 * math.pi * cfg.p)
    return -c * math.sin(math.pi * cfg.beta) * cmath.exp(0.5j * w) / math.sin(0.5 * w)


def amplitude(cfg: ScatteringConfig, solutions: list[ChannelSolution], phi: float) -> complex:
    """Scattering amplitude f(phi) = C sum_m (S_m - cos pi beta) e^{i m phi}.

    C = e^{-i pi/4}/sqrt(2 pi p).  The explicitly solved modes enter as
    differences against the pure-flux background S_m^{AB}; the infinite
    Regular tail is the Abel-summed closed form ab_amplitude_closed.  At
    gamma = 0 the resummation is exact.  Every non-Regular mode must be
    present among the solutions.

    Raises ForwardDirectionError inside the excluded cone |phi| < 1e-3.
    """
    w = _wrap_angle(phi)
    if abs(w) < PHI_MIN:
        raise ForwardDirectionError(
            f"phi={phi} is inside the excluded forward cone (|phi| < {PHI_MIN})"
        )
    present = {s.mode.m for s in solutions}
    missing = [m for m in nonregular_modes(cfg) if m not in present]
    if missing:
        raise IncompleteRangeError(
            f"amplitude needs every non-Regular mode; missing {missing}"
        )
    c = cmath.exp(-0.25j * math.pi) / math.sqrt(2.0 * math.pi * cfg.p)
    acc = 0.0 + 0.0j
    for sol in sorted(solutions, key=lambda s: s.mode.m):
        dm = sol.s_matrix - _ab_smatrix(cfg.beta, sol.mode.m)
        acc += dm * cmath.exp(1j * sol.mode.m * w)
    return c * acc + ab_amplitude_closed(cfg, w)


@dataclass(frozen=True)
class CrossSectionReport:
    """Aggregated run output: per-mode and total absorption, d sigma/d phi."""

    partial_abs: dict
    total_abs: float
    mode_range: tuple
    phi: np.ndarray
    differential_elastic: np.ndarray

    def __post_init__(self) -> None:
        s = sum(self.partial_abs.values())
        if abs(s - self.total_abs) > 1e-12 * max(abs(s), 1e-300):
            raise ConfigError("cross-section bookkeeping mismatch")


def cross_sections(
    cfg: ScatteringConfig,
    model: BoundaryModel,
    m_range: tuple,
    phi_grid: np.ndarray | None = None,
) -> CrossSectionReport:
    """Solve modes m_range = (lo, hi) inclusive and aggregate observables.

    The range must contain every non-Regular mode (IncompleteRangeError
    otherwise).  Partial absorption cross sections are summed in ascending
    m for reproducibility; the differential elastic cross section
    |f(phi)|^2 is sampled on phi_grid (default: 721 points spanning the
    non-forward sector).
    """
    lo, hi = int(m_range[0]), int(m_range[1])
    if lo > hi:
        raise ConfigError(f"empty mode range {m_range}")
    needed = nonregular_modes(cfg)
    outside = [m for m in needed if not lo <= m <= hi]
    if outside:
        raise IncompleteRangeError(
            f"mode range [{lo}, {hi}] misses non-Regular modes {outside}"
        )
    sols = [solve_channel(cfg, classify_mode(cfg, m), model) for m in range(lo, hi + 1)]
    partial = {s.mode.m: s.sigma_abs for s in sols}
    total = 0.0
    for m in sorted(partial):
        total += partial[m]
    if phi_grid is None:
        phi_grid = np.linspace(2.0 * PHI_MIN, 2.0 * math.pi - 2.0 * PHI_MIN, 721)
    phi_grid = np.asarray(phi_grid, dtype=float)
    diff = np.empty_like(phi_grid)
    for i, ph in enumerate(phi_grid):
        diff[i] = abs(amplitude(cfg, sols, float(ph))) ** 2
    return CrossSectionReport(
        partial_abs=partial,
        total_abs=total,
        mode_range=(lo, hi),
        phi=phi_grid,
        differential_elastic=diff,
    )
