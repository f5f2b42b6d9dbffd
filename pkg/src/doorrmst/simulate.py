"""Five-state progression simulator for tiered event times.

States: 1 initial, 2 one event, 3 two events, 4 disability, 5 death.
Nine constant hazards drive the moves; holding times are exponential in
the current state's total exit rate and the destination is drawn in
proportion to the competing hazards. Tier time j is the first entry into
state j+1 or worse on the accumulated clock. Censoring is uniform on
(0, censor_max), drawn independently per subject, and hits every tier the
subject had not reached by then at the same cut time.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import kernels
from .door import CONTROL, TREATMENT, Cohort, DoorConfig, SubjectRecord
from .rng import child_seed, make_generator

NUM_TIERS = kernels.numpy_impl.NUM_TIERS

RATE_ORDER = (
    "initial_to_event1",
    "initial_to_disability",
    "initial_to_death",
    "event1_to_event2",
    "event1_to_disability",
    "event1_to_death",
    "event2_to_disability",
    "event2_to_death",
    "disability_to_death",
)

_SIM_DOOR = DoorConfig(
    num_event_types=NUM_TIERS,
    labels=("initial", "one event", "two events", "disability", "death"),
)


@dataclass(frozen=True)
class TransitionRates:
    """The nine constant hazards of the progression process.

    Field ``a_to_b`` is the hazard of moving from state a to state b.
    Rates must be nonnegative, and every state the chain can actually
    reach needs a positive total exit rate so that no subject gets stuck
    in a transient state. Unreachable states may carry all-zero rates.
    """

    initial_to_event1: float
    initial_to_disability: float
    initial_to_death: float
    event1_to_event2: float
    event1_to_disability: float
    event1_to_death: float
    event2_to_disability: float
    event2_to_death: float
    disability_to_death: float

    def __post_init__(self):
        for name in RATE_ORDER:
            value = float(getattr(self, name))
            if not np.isfinite(value) or value < 0.0:
                raise ValueError(f"rate {name} must be finite and nonnegative, got {value!r}")
            object.__setattr__(self, name, value)
        if self.exit_initial <= 0.0:
            raise ValueError("total exit rate from the initial state must be positive")
        reach_event1 = self.initial_to_event1 > 0.0
        reach_event2 = reach_event1 and self.event1_to_event2 > 0.0
        reach_disability = (
            self.initial_to_disability > 0.0
            or (reach_event1 and self.event1_to_disability > 0.0)
            or (reach_event2 and self.event2_to_disability > 0.0)
        )
        if reach_event1 and self.exit_event1 <= 0.0:
            raise ValueError("one-event state is reachable but has zero exit rate")
        if reach_event2 and self.exit_event2 <= 0.0:
            raise ValueError("two-event state is reachable but has zero exit rate")
        if reach_disability and self.exit_disability <= 0.0:
            raise ValueError("disability state is reachable but has zero exit rate")

    @property
    def exit_initial(self) -> float:
        return self.initial_to_event1 + self.initial_to_disability + self.initial_to_death

    @property
    def exit_event1(self) -> float:
        return self.event1_to_event2 + self.event1_to_disability + self.event1_to_death

    @property
    def exit_event2(self) -> float:
        return self.event2_to_disability + self.event2_to_death

    @property
    def exit_disability(self) -> float:
        return self.disability_to_death

    @classmethod
    def from_sequence(cls, values) -> "TransitionRates":
        values = tuple(float(v) for v in values)
        if len(values) != len(RATE_ORDER):
            raise ValueError(f"need {len(RATE_ORDER)} rates, got {len(values)}")
        return cls(*values)

    def as_array(self) -> np.ndarray:
        return np.array([getattr(self, name) for name in RATE_ORDER])


@dataclass(frozen=True)
class SimConfig:
    """One simulated-trial setup: both arms' rates plus sampling knobs."""

    rates_control: TransitionRates
    rates_treatment: TransitionRates
    n_per_arm: int
    censor_max: float
    tau_list: tuple[float, ...]
    seed: int
    replicates: int = 1

    def __post_init__(self):
        if int(self.n_per_arm) < 1:
            raise ValueError("n_per_arm must be at least 1")
        object.__setattr__(self, "n_per_arm", int(self.n_per_arm))
        if not float(self.censor_max) > 0.0:
            raise ValueError("censor_max must be positive")
        object.__setattr__(self, "censor_max", float(self.censor_max))
        taus = tuple(float(t) for t in self.tau_list)
        if not taus or any(not np.isfinite(t) or t <= 0.0 for t in taus):
            raise ValueError("tau_list must be non-empty with positive entries")
        object.__setattr__(self, "tau_list", taus)
        object.__setattr__(self, "seed", int(self.seed))
        if int(self.replicates) < 0:
            raise ValueError("replicates must be nonnegative")
        object.__setattr__(self, "replicates", int(self.replicates))


def true_event_times(rates: TransitionRates, n: int, gen: np.random.Generator):
    """Uncensored tier times for ``n`` subjects plus their censoring uniforms.

    Each subject consumes one fixed-width row of uniforms, so the draws a
    subject receives depend only on its row index within the stream.
    """
    u = gen.random((n, kernels.numpy_impl.U_COLS))
    backend = kernels.active_backend()
    times = backend.event_times(u, rates.as_array())
    return times, u[:, kernels.numpy_impl.U_COLS - 1]


def apply_uniform_censoring(times: np.ndarray, censor: np.ndarray):
    """Cut true tier times at per-subject censoring times.

    Returns observed times min(T, C) and indicators 1{C >= T}. A subject
    censored before tier j is censored at the same time for every later
    tier, which is exactly the propagation shape validation demands.
    """
    c = censor[:, None]
    observed = np.minimum(times, c)
    indicators = (c >= times).astype(np.uint8)
    return observed, indicators


def simulate_subject(
    rates: TransitionRates,
    censor_max: float,
    rng: np.random.Generator,
    subject_id: str = "sim-00000",
    arm: str = CONTROL,
) -> SubjectRecord:
    """One subject drawn from the process under uniform censoring."""
    if not float(censor_max) > 0.0:
        raise ValueError("censor_max must be positive")
    times, cu = true_event_times(rates, 1, rng)
    observed, indicators = apply_uniform_censoring(times, cu * float(censor_max))
    return SubjectRecord(
        subject_id=subject_id,
        arm=arm,
        times=tuple(float(v) for v in observed[0]),
        indicators=tuple(int(v) for v in indicators[0]),
    )


def simulate_arm(
    rates: TransitionRates,
    n: int,
    censor_max: float,
    seed,
    arm: str = CONTROL,
) -> Cohort:
    """Cohort of ``n`` independent subjects from one arm's process.

    ``seed`` may be an integer or a derived ``SeedSequence``. The same
    seed always reproduces the same cohort, and the first k subjects of a
    larger run equal a run of size k with the same seed.
    """
    if int(n) < 1:
        raise ValueError("n must be at least 1")
    if not float(censor_max) > 0.0:
        raise ValueError("censor_max must be positive")
    gen = make_generator(seed)
    times, cu = true_event_times(rates, int(n), gen)
    observed, indicators = apply_uniform_censoring(times, cu * float(censor_max))
    return Cohort(config=_SIM_DOOR, arm=arm, times=observed, indicators=indicators)


def simulate_trial(config: SimConfig, replicate: int = 0):
    """Both arms of one replicate; arms and replicates get disjoint streams."""
    control = simulate_arm(
        config.rates_control,
        config.n_per_arm,
        config.censor_max,
        child_seed(config.seed, replicate, 0),
        arm=CONTROL,
    )
    treatment = simulate_arm(
        config.rates_treatment,
        config.n_per_arm,
        config.censor_max,
        child_seed(config.seed, replicate, 1),
        arm=TREATMENT,
    )
    return control, treatment
