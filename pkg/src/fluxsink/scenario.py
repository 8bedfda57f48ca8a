"""Scenario files: INI-format descriptions of one scattering computation.

A scenario names a potential (inverse-square core with flux, or the
inverse-quartic polarization core), a boundary model, a mode range, an
angular grid, and output preferences.  load_scenario and write_scenario
round-trip losslessly.

Schema (all keys shown; optional ones carry their defaults):

    [potential]
    kind = inverse_square        ; or inverse_quartic
    beta = 0.3
    gamma = 0.5                  ; inverse_square only
    lam = 1.0                    ; inverse_quartic only
    p = 1.0
    mass = 0.5

    [model]
    kind = sink                  ; sink | elastic | total_absorption | custom
    l = 0.0                      ; elastic, subcritical parameter
    theta = 0.0                  ; elastic, supercritical / quartic parameter
    n_minus = 0                  ; total_absorption window (inverse_square)
    n_plus = 0
    m_abs = 0                    ; total_absorption window (inverse_quartic)
    ratio_0 = 0.1, -0.05         ; custom: per-mode a/b as "re, im"

    [modes]
    m_range = auto               ; or "lo:hi"

    [angles]
    phi_samples = 721            ; 0 disables differential output

    [output]
    format = csv                 ; csv | json
    path = out
"""

from __future__ import annotations

import configparser
from dataclasses import dataclass

from . import channels, quartic
from .errors import ConfigError

__all__ = [
    "Scenario",
    "ElasticAssignment",
    "load_scenario",
    "write_scenario",
    "resolve_m_range",
]

_MODEL_KINDS = ("sink", "elastic", "total_absorption", "custom")


@dataclass(frozen=True)
class ElasticAssignment:
    """Self-adjoint condition for every mode: l below criticality, theta above.

    A single run usually spans both non-Regular regimes, and the two elastic
    parameterizations are regime-bound; this assigns the right one per mode.
    """

    l: float = 0.0
    theta: float = 0.0

    def for_mode(self, mode) -> object:
        if mode.regime == channels.Regime.SUPERCRITICAL:
            return channels.ElasticSupercritical(theta=self.theta)
        return channels.ElasticSubcritical(l=self.l)


@dataclass(frozen=True)
class Scenario:
    """One fully specified run: potential, model, modes, angles, output."""

    potential: object  # ScatteringConfig | QuarticConfig
    model: object
    m_range: tuple | None  # None = auto
    phi_samples: int
    out_format: str
    out_path: str

    @property
    def is_quartic(self) -> bool:
        return isinstance(self.potential, quartic.QuarticConfig)


def _get(cp: configparser.ConfigParser, section: str, key: str, default=None):
    if not cp.has_section(section):
        if default is not None:
            return default
        raise ConfigError(f"missing [{section}] section")
    if not cp.has_option(section, key):
        if default is not None:
            return default
        raise ConfigError(f"missing key '{key}' in [{section}]")
    return cp.get(section, key)


def _get_float(cp, section, key, default=None) -> float:
    raw = _get(cp, section, key, default)
    try:
        return float(raw)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"[{section}] {key} = {raw!r} is not a number") from exc


def _get_int(cp, section, key, default=None) -> int:
    raw = _get(cp, section, key, default)
    try:
        return int(str(raw))
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"[{section}] {key} = {raw!r} is not an integer") from exc


def _parse_potential(cp) -> object:
    kind = _get(cp, "potential", "kind").strip().lower()
    beta = _get_float(cp, "potential", "beta")
    p = _get_float(cp, "potential", "p")
    mass = _get_float(cp, "potential", "mass", "0.5")
    if kind == "inverse_square":
        gamma = _get_float(cp, "potential", "gamma")
        return channels.ScatteringConfig(beta=beta, gamma=gamma, p=p, mass=mass)
    if kind == "inverse_quartic":
        lam = _get_float(cp, "potential", "lam")
        return quartic.QuarticConfig(beta=beta, lam=lam, p=p, mass=mass)
    raise ConfigError(
        f"[potential] kind = {kind!r}; expected inverse_square or inverse_quartic"
    )


def _parse_ratio(raw: str, m: int) -> complex:
    parts = [s.strip() for s in raw.split(",")]
    if len(parts) != 2:
        raise ConfigError(f"[model] ratio_{m} = {raw!r}; expected 're, im'")
    try:
        return complex(float(parts[0]), float(parts[1]))
    except ValueError as exc:
        raise ConfigError(f"[model] ratio_{m} = {raw!r}; expected 're, im'") from exc


def _parse_model(cp, potential) -> object:
    kind = _get(cp, "model", "kind").strip().lower()
    if kind not in _MODEL_KINDS:
        raise ConfigError(f"[model] kind = {kind!r}; expected one of {_MODEL_KINDS}")
    is_quartic = isinstance(potential, quartic.QuarticConfig)
    if kind == "sink":
        return quartic.Sink() if is_quartic else channels.Sink()
    if kind == "elastic":
        theta = _get_float(cp, "model", "theta", "0.0")
        if is_quartic:
            return quartic.Elastic(theta=theta)
        l_value = _get_float(cp, "model", "l", "0.0")
        return ElasticAssignment(l=l_value, theta=theta)
    if kind == "total_absorption":
        if is_quartic:
            m_abs = _get_int(cp, "model", "m_abs", "0")
            return quartic.model_schedule(
                potential, m_abs, quartic.TotalAbsorption(), quartic.Elastic()
            )
        n_minus = _get_int(cp, "model", "n_minus", "0")
        n_plus = _get_int(cp, "model", "n_plus", "0")
        return channels.TotalAbsorption(n_minus=n_minus, n_plus=n_plus)
    # custom per-mode ratios
    if is_quartic:
        raise ConfigError("[model] custom ratios apply to inverse_square only")
    ratios = {}
    for key, raw in cp.items("model"):
        if key.startswith("ratio_"):
            try:
                m = int(key[len("ratio_"):])
            except ValueError as exc:
                raise ConfigError(f"[model] bad mode index in {key!r}") from exc
            ratios[m] = _parse_ratio(raw, m)
    if not ratios:
        raise ConfigError("[model] custom model needs at least one ratio_<m> key")
    return channels.Custom(ratios=ratios)


def _parse_m_range(cp) -> tuple | None:
    raw = _get(cp, "modes", "m_range", "auto").strip().lower()
    if raw == "auto":
        return None
    parts = raw.split(":")
    if len(parts) != 2:
        raise ConfigError(f"[modes] m_range = {raw!r}; expected 'auto' or 'lo:hi'")
    try:
        lo, hi = int(parts[0]), int(parts[1])
    except ValueError as exc:
        raise ConfigError(f"[modes] m_range = {raw!r}; expected integers") from exc
    if lo > hi:
        raise ConfigError(f"[modes] m_range = {raw!r} is empty")
    return (lo, hi)


def load_scenario(path: str) -> Scenario:
    """Parse a scenario INI file; ConfigError carries field diagnostics."""
    cp = configparser.ConfigParser(inline_comment_prefixes=(";", "#"))
    try:
        with open(path) as fh:
            cp.read_file(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read scenario file {path}: {exc}") from exc
    except configparser.Error as exc:
        raise ConfigError(f"scenario parse error in {path}: {exc}") from exc
    potential = _parse_potential(cp)
    model = _parse_model(cp, potential)
    m_range = _parse_m_range(cp)
    phi_samples = _get_int(cp, "angles", "phi_samples", "721")
    if phi_samples < 0:
        raise ConfigError(f"[angles] phi_samples must be >= 0, got {phi_samples}")
    out_format = _get(cp, "output", "format", "csv").strip().lower()
    if out_format not in ("csv", "json"):
        raise ConfigError(f"[output] format = {out_format!r}; expected csv or json")
    out_path = _get(cp, "output", "path", "out")
    return Scenario(
        potential=potential,
        model=model,
        m_range=m_range,
        phi_samples=phi_samples,
        out_format=out_format,
        out_path=out_path,
    )


def _format_model(model) -> list[str]:
    if isinstance(model, (channels.Sink, quartic.Sink)):
        return ["kind = sink"]
    if isinstance(model, ElasticAssignment):
        return ["kind = elastic", f"l = {model.l!r}", f"theta = {model.theta!r}"]
    if isinstance(model, quartic.Elastic):
        return ["kind = elastic", f"theta = {model.theta!r}"]
    if isinstance(model, channels.TotalAbsorption):
        return [
            "kind = total_absorption",
            f"n_minus = {model.n_minus}",
            f"n_plus = {model.n_plus}",
        ]
    if isinstance(model, quartic.ModeSchedule):
        return ["kind = total_absorption", f"m_abs = {model.m_abs}"]
    if isinstance(model, channels.Custom):
        lines = ["kind = custom"]
        for m in sorted(model.ratios):
            r = complex(model.ratios[m])
            lines.append(f"ratio_{m} = {r.real!r}, {r.imag!r}")
        return lines
    raise ConfigError(f"cannot serialize model {model!r}")


def write_scenario(scenario: Scenario, path: str) -> None:
    """Write an INI file that load_scenario parses back to an equal Scenario."""
    pot = scenario.potential
    lines = ["[potential]"]
    if scenario.is_quartic:
        lines.append("kind = inverse_quartic")
        lines.append(f"beta = {pot.beta!r}")
        lines.append(f"lam = {pot.lam!r}")
    else:
        lines.append("kind = inverse_square")
        lines.append(f"beta = {pot.beta!r}")
        lines.append(f"gamma = {pot.gamma!r}")
    lines.append(f"p = {pot.p!r}")
    lines.append(f"mass = {pot.mass!r}")
    lines.append("")
    lines.append("[model]")
    lines.extend(_format_model(scenario.model))
    lines.append("")
    lines.append("[modes]")
    if scenario.m_range is None:
        lines.append("m_range = auto")
    else:
        lines.append(f"m_range = {scenario.m_range[0]}:{scenario.m_range[1]}")
    lines.append("")
    lines.append("[angles]")
    lines.append(f"phi_samples = {scenario.phi_samples}")
    lines.append("")
    lines.append("[output]")
    lines.append(f"format = {scenario.out_format}")
    lines.append(f"path = {scenario.out_path}")
    lines.append("")
    with open(path, "w") as fh:
        fh.write("\n".join(lines))


def resolve_m_range(scenario: Scenario) -> tuple:
    """Concrete (lo, hi): auto covers non-Regular modes plus a 10-mode margin."""
    if scenario.m_range is not None:
        return scenario.m_range
    if scenario.is_quartic:
        m_abs = scenario.model.m_abs if isinstance(scenario.model, quartic.ModeSchedule) else 0
        return (-m_abs - 10, m_abs + 10)
    modes = channels.nonregular_modes(scenario.potential)
    if not modes:
        return (-10, 10)
    return (min(modes) - 10, max(modes) + 10)
