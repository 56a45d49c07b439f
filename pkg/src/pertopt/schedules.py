"""Power-law coefficient schedules and their convergence diagnostics.

A run is driven by four per-iteration coefficients: the learning rate
``a_t = a0 / t**alpha``, the perturbation size ``c_t = c0 / t**zeta``, the
momentum coefficient ``beta_t = beta0 / t**lam`` (optionally truncated to
zero after a fixed step), and a constant second-moment coefficient
``gamma``.  ``validate_schedules`` reports which textbook convergence
conditions a configuration satisfies; failing a condition is advisory and
never blocks a run.
"""

from __future__ import annotations

from dataclasses import dataclass


def power_law_value(coeff: float, exponent: float, t: int) -> float:
    """Evaluate ``coeff / t**exponent`` at integer step ``t >= 1``.

    Examples
    --------
    >>> power_law_value(0.5, 0.0, 7)
    0.5
    >>> round(power_law_value(1.0, 1.0, 4), 12)
    0.25
    """
    if t < 1:
        raise ValueError(f"schedule step must be >= 1, got t={t}")
    if coeff < 0:
        raise ValueError(f"schedule coefficient must be >= 0, got {coeff}")
    if exponent < 0:
        raise ValueError(f"schedule exponent must be >= 0, got {exponent}")
    return coeff / float(t) ** exponent


@dataclass(frozen=True)
class ScheduleSet:
    """Bundle of all schedules used by one optimization run.

    Parameters mirror the config file keys: ``a0``/``alpha`` for the
    learning rate, ``c0``/``zeta`` for the perturbation size,
    ``beta0``/``lam`` for momentum (``lam`` is spelled ``lambda`` in config
    files), ``gamma`` for the constant second-moment coefficient, ``delta``
    for the adaptive-update regularizer, and ``truncation_step`` to force
    ``beta_t = 0`` for all ``t`` beyond it.
    """

    a0: float = 0.032
    alpha: float = 0.602
    c0: float = 0.016
    zeta: float = 0.101
    beta0: float = 0.999
    lam: float = 0.0
    gamma: float = 0.999
    delta: float = 1e-8
    truncation_step: int | None = None

    def __post_init__(self) -> None:
        if self.a0 <= 0:
            raise ValueError(f"a0 must be > 0, got {self.a0}")
        if self.c0 <= 0:
            raise ValueError(f"c0 must be > 0, got {self.c0}")
        if self.alpha < 0 or self.zeta < 0 or self.lam < 0:
            raise ValueError("schedule exponents must be >= 0")
        if not 0.0 <= self.beta0 < 1.0:
            raise ValueError(f"beta0 must lie in [0, 1), got {self.beta0}")
        if not 0.0 <= self.gamma < 1.0:
            raise ValueError(f"gamma must lie in [0, 1), got {self.gamma}")
        if self.delta <= 0:
            raise ValueError(f"delta must be > 0, got {self.delta}")
        if self.truncation_step is not None and self.truncation_step < 0:
            raise ValueError("truncation_step must be >= 0 when set")

    def learning_rate(self, t: int) -> float:
        return power_law_value(self.a0, self.alpha, t)

    def perturbation_size(self, t: int) -> float:
        return power_law_value(self.c0, self.zeta, t)

    def momentum_coeff(self, t: int) -> float:
        if self.truncation_step is not None and t > self.truncation_step:
            return 0.0
        return power_law_value(self.beta0, self.lam, t)

    def second_moment_coeff(self, t: int) -> float:
        # constant by design; kept as a method so the update loop treats
        # all four coefficients uniformly
        if t < 1:
            raise ValueError(f"schedule step must be >= 1, got t={t}")
        return self.gamma


@dataclass(frozen=True)
class ConditionCheck:
    """Outcome of a single named convergence condition."""

    name: str
    passed: bool
    detail: str


@dataclass(frozen=True)
class ValidationReport:
    """Advisory convergence report for a :class:`ScheduleSet`."""

    checks: tuple[ConditionCheck, ...]

    @property
    def all_passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def failed(self) -> tuple[ConditionCheck, ...]:
        return tuple(c for c in self.checks if not c.passed)

    def __getitem__(self, name: str) -> ConditionCheck:
        for c in self.checks:
            if c.name == name:
                return c
        raise KeyError(name)


def validate_schedules(schedules: ScheduleSet) -> ValidationReport:
    """Check the advisory convergence conditions for a schedule bundle.

    Four named conditions are evaluated:

    - ``learning-rate-divergence``: the learning-rate sum diverges,
      requiring ``alpha <= 1``.
    - ``kushner-clark``: accumulated estimator noise stays summable,
      requiring ``alpha - zeta > 0.5``.
    - ``adaptive-divergence``: the effective adaptive step sum still
      diverges, requiring ``alpha + zeta <= 1``.
    - ``momentum-decay``: momentum forgets fast enough, requiring
      ``lam > 0`` and ``lam + alpha - zeta > 1``, or an explicit
      ``truncation_step``.

    The report is pure: identical inputs give identical reports, and no
    check mutates the schedule or blocks anything.
    """
    a, z, lam = schedules.alpha, schedules.zeta, schedules.lam

    checks = []
    checks.append(
        ConditionCheck(
            name="learning-rate-divergence",
            passed=a <= 1.0,
            detail=f"alpha = {a} (requires alpha <= 1)",
        )
    )
    checks.append(
        ConditionCheck(
            name="kushner-clark",
            passed=a - z > 0.5,
            detail=f"alpha - zeta = {a - z} (requires > 0.5)",
        )
    )
    checks.append(
        ConditionCheck(
            name="adaptive-divergence",
            passed=a + z <= 1.0,
            detail=f"alpha + zeta = {a + z} (requires <= 1)",
        )
    )
    if schedules.truncation_step is not None:
        momentum_ok = True
        detail = f"beta_t truncated to 0 after t = {schedules.truncation_step}"
    else:
        momentum_ok = lam > 0.0 and lam + a - z > 1.0
        detail = (
            f"lambda = {lam}, lambda + alpha - zeta = {lam + a - z} "
            "(requires lambda > 0 and sum > 1, or a truncation_step)"
        )
    checks.append(
        ConditionCheck(name="momentum-decay", passed=momentum_ok, detail=detail)
    )
    return ValidationReport(checks=tuple(checks))
