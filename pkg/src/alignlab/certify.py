"""Stability certification report for a run configuration."""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np

from .environment import EnvConfig
from .errors import CertificationWarning
from .graph import check_alpha
from .hebbian import check_stability_constraint, moment_bounds
from .trainer import Trainer, TrainerConfig

# the normalized Laplacian spectrum never exceeds 2, whatever the identities
LAMBDA_MAX_WORST = 2.0


@dataclass
class ConditionResult:
    name: str
    passed: bool
    margin: float
    detail: str

    def line(self):
        return f"[{'PASS' if self.passed else 'FAIL'}] {self.name}: {self.detail} (margin {self.margin:+.4g})"


@dataclass
class CertificationReport:
    conditions: list = field(default_factory=list)
    info: list = field(default_factory=list)

    @property
    def passed(self):
        return all(c.passed for c in self.conditions)

    def failures(self):
        return [c for c in self.conditions if not c.passed]

    def render(self):
        lines = ["stability certification", "=" * 23]
        lines += [c.line() for c in self.conditions]
        if self.info:
            lines.append("")
            lines += [f"  {s}" for s in self.info]
        lines.append("")
        lines.append("overall: " + ("PASS" if self.passed else f"FAIL ({len(self.failures())} condition(s))"))
        return "\n".join(lines) + "\n"


def certify(config: TrainerConfig, env_config: EnvConfig, seed=0, rollout_episodes=2) -> CertificationReport:
    """Check diffusion strength, trace decay and contraction for ``config``.

    The diffusion check uses the worst-case spectrum (lambda_max = 2) whenever
    the topology has edges, since identity updates move the graph during
    training; the current graph's value is reported alongside. The trace
    decay check uses the design moment bounds from the config; moments
    measured on a short rollout are reported as additional information.
    """
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", CertificationWarning)
        trainer = Trainer(config, env_config, seed=seed)
    report = CertificationReport()
    c = config

    has_edges = bool(np.any(trainer.graph.topology_mask > 0))
    lam_now = trainer.graph.lambda_max()
    lam = LAMBDA_MAX_WORST if has_edges else 0.0
    a = check_alpha(c.alpha, c.gamma_E, c.L_g, c.rho_max, lam)
    report.conditions.append(ConditionResult(
        "diffusion strength",
        a.passed,
        a.bound - a.alpha if np.isfinite(a.bound) else float("inf"),
        f"alpha = {a.alpha:g} vs bound {a.bound:.4g} at lambda_max = {lam:g}",
    ))
    a_now = check_alpha(c.alpha, c.gamma_E, c.L_g, c.rho_max, lam_now)
    report.info.append(f"current graph: lambda_max = {lam_now:.4f}, alpha bound = {a_now.bound:.4g}")

    h = check_stability_constraint(c.delta_H, c.eta_H, c.hebbian_design_C_E, c.hebbian_design_C_z)
    report.conditions.append(ConditionResult(
        "hebbian trace decay",
        h.passed,
        h.margin,
        f"delta_H = {c.delta_H:g} vs required > {h.required:.4g} "
        f"(eta_H = {c.eta_H:g}, C_E = {c.hebbian_design_C_E:g}, C_z = {c.hebbian_design_C_z:g})",
    ))

    cert = trainer.certificate(warn=False)
    report.conditions.append(ConditionResult(
        "contraction",
        cert.passed,
        cert.margin,
        f"rho + L_g = {cert.rho:.4f} + {cert.lipschitz:.4f} = {cert.rho + cert.lipschitz:.4f} < 1; "
        f"bound K/(1-rho) = {cert.analytic_bound:.4g}",
    ))

    if rollout_episodes > 0:
        Es, Zs = [], []
        for _ in range(rollout_episodes):
            buf = trainer.run_episode()
            Es.append(buf.E_next)
            Zs.append(buf.z)
            cert.observe(buf.E_next.reshape(-1, trainer.k))
        C_E, C_z = moment_bounds(np.concatenate(Es), np.concatenate(Zs))
        emp = check_stability_constraint(c.delta_H, c.eta_H, C_E, C_z)
        report.info.append(
            f"measured moments over {rollout_episodes} episode(s): C_E = {C_E:.4g}, C_z = {C_z:.4g}; "
            f"required delta_H > {emp.required:.4g} ({'met' if emp.passed else 'not met'})"
        )
        report.info.append(
            f"measured max ||E|| = {cert.empirical_max:.4g} vs analytic bound {cert.analytic_bound:.4g}"
        )
    return report
