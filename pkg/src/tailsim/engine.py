"""Year simulation: frequencies, importance-sampled event losses, contract layering.

Frequencies come from the Poisson tail quantile evaluated on the midpoint
grid of the trials, once per plan, in both sampling modes. Severities are
regenerated for every ``k``:

* ``riemann``: midpoints over all events, paired with weights and shuffled by
  ``permute(total_events, seed, k_index)``;
* ``random``: open uniforms from stream ``(seed, k_index, chunk_index)``.

Events are assigned to trials consecutively. Trials are processed in chunks of
``chunk_trials``; per-chunk moment sums are merged in a pairwise tree over the
chunk index, so results depend on the chunk size but never on thread count.
"""

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
import logging
import math

import numpy as np

from .distributions import Frequency, fit_lognormal, poisson_comp_quantile
from .errors import DomainError, InternalError, UndefinedRelativeError
from .kernels import event_pairs, year_chunk
from .sampling import PowerTransform, SampleMode, midpoint_partition, open_uniforms, child_rng, permute
from .stats import MomentAccumulator, pairwise_merge, sample_improvement, simulation_errors
from .terms import Contract, term_arrays

logger = logging.getLogger(__name__)

DEFAULT_CHUNK_TRIALS = 2**16


@dataclass(frozen=True)
class SimulationPlan:
    num_trials: int
    lam: float
    severity_mean: float
    severity_sd: float
    k_values: tuple
    contracts: tuple
    mode: SampleMode = field(default_factory=SampleMode)
    confidence_level: float = 0.95
    chunk_trials: int = DEFAULT_CHUNK_TRIALS

    def __post_init__(self):
        object.__setattr__(self, "k_values", tuple(float(k) for k in self.k_values))
        object.__setattr__(self, "contracts", tuple(self.contracts))
        if int(self.num_trials) != self.num_trials or self.num_trials < 1:
            raise DomainError(f"trials must be a positive integer, got {self.num_trials!r}")
        Frequency(self.lam)
        fit_lognormal(self.severity_mean, self.severity_sd)
        if not self.k_values:
            raise DomainError("k_values must not be empty")
        for k in self.k_values:
            PowerTransform(k)
        if not self.contracts:
            raise DomainError("at least one contract is required")
        names = [c.name for c in self.contracts]
        if len(set(names)) != len(names):
            raise DomainError(f"contract names must be unique, got {names}")
        if not 0.0 < self.confidence_level < 1.0:
            raise DomainError(f"confidence_level must lie in (0, 1), got {self.confidence_level}")
        if int(self.chunk_trials) != self.chunk_trials or self.chunk_trials < 1:
            raise DomainError(f"chunk_trials must be a positive integer, got {self.chunk_trials!r}")

    @property
    def severity(self):
        return fit_lognormal(self.severity_mean, self.severity_sd)


@dataclass
class WeightedYearTable:
    """Per-trial net loss (one row per contract) and trial weight."""

    contracts: tuple
    net_loss: np.ndarray
    trial_weight: np.ndarray

    def __len__(self):
        return self.trial_weight.shape[0]


@dataclass(frozen=True)
class ContractMetrics:
    contract: Contract
    k: float
    expected_loss: float
    el_percent: float
    sim_error_regular: float
    sim_error_enhanced: float
    sample_improvement: float
    se_regular: float
    se_enhanced: float
    var_x: float
    var_y: float
    n: int


def draw_frequencies(lam, num_trials):
    """Event counts per trial: Poisson tail quantiles on the trial midpoint grid."""
    return poisson_comp_quantile(lam, midpoint_partition(num_trials)).astype(np.int64)


def _event_pairs(severity, k, q):
    return event_pairs(np.ascontiguousarray(q, dtype=np.float64), float(k), severity.mu, severity.sigma)


def build_event_losses(total_events, severity, k, mode, k_index=0):
    """Gross event losses and importance weights for ``total_events`` events.

    In riemann mode the midpoint-generated pairs are shuffled together; in
    random mode they come from ``uniform_sample``-style draws on stream
    ``(mode.seed, k_index)``.
    """
    PowerTransform(k)
    if total_events < 0:
        raise DomainError("total_events must be >= 0")
    if total_events == 0:
        return np.empty(0), np.empty(0)
    if mode.mode == "riemann":
        q = midpoint_partition(total_events)[permute(total_events, mode.seed, k_index)]
    else:
        q = open_uniforms(child_rng(mode.seed, k_index), total_events)
    losses, log_w = _event_pairs(severity, k, q)
    return losses, np.exp(log_w)


def assemble_trials(frequencies, losses, weights, contracts):
    """Layer events into trials; returns a :class:`WeightedYearTable`.

    ``contracts`` may be a single :class:`Contract` or a sequence of them.
    """
    if isinstance(contracts, Contract):
        contracts = (contracts,)
    counts = np.ascontiguousarray(frequencies, dtype=np.int64)
    losses = np.ascontiguousarray(losses, dtype=np.float64)
    weights = np.asarray(weights, dtype=np.float64)
    if counts.sum() != losses.shape[0] or losses.shape != weights.shape:
        raise InternalError(
            f"event count mismatch: sum(frequencies)={counts.sum()}, "
            f"losses={losses.shape[0]}, weights={weights.shape[0]}"
        )
    if np.any(weights <= 0):
        raise DomainError("event weights must be positive")
    net, tw = year_chunk(counts, losses, np.log(weights), *term_arrays(contracts))
    return WeightedYearTable(tuple(contracts), net, tw)


class _Layout:
    """Trial chunking shared by all k for one plan."""

    def __init__(self, plan):
        self.counts = draw_frequencies(plan.lam, plan.num_trials)
        self.offsets = np.concatenate(([0], np.cumsum(self.counts)))
        self.total_events = int(self.offsets[-1])
        bounds = list(range(0, plan.num_trials, plan.chunk_trials)) + [plan.num_trials]
        self.chunks = list(zip(bounds[:-1], bounds[1:]))


def _chunk_worker(plan, layout, k, k_index, perm, terms):
    severity = plan.severity
    mode = plan.mode
    n_events = layout.total_events

    def run(c_index):
        t0, t1 = layout.chunks[c_index]
        e0, e1 = int(layout.offsets[t0]), int(layout.offsets[t1])
        if e1 == e0:
            q = np.empty(0)
        elif mode.mode == "riemann":
            q = (perm[e0:e1] + 0.5) / n_events
        else:
            q = open_uniforms(child_rng(mode.seed, k_index, c_index), e1 - e0)
        losses, log_w = _event_pairs(severity, k, q)
        net, tw = year_chunk(layout.counts[t0:t1], losses, log_w, *terms)
        return net, tw

    return run


def _year_tables(plan, layout, k_index, threads, consume):
    k = plan.k_values[k_index]
    terms = term_arrays(plan.contracts)
    perm = None
    if plan.mode.mode == "riemann" and layout.total_events:
        perm = permute(layout.total_events, plan.mode.seed, k_index)
    run = _chunk_worker(plan, layout, k, k_index, perm, terms)

    def job(c_index):
        net, tw = run(c_index)
        return consume(c_index, net, tw)

    indices = range(len(layout.chunks))
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            return list(pool.map(job, indices))
    return [job(i) for i in indices]


def _metrics_for(plan, k, acc):
    rows = []
    for j, contract in enumerate(plan.contracts):
        m = acc.estimates(j)
        try:
            regular, enhanced = simulation_errors(m, plan.confidence_level)
        except UndefinedRelativeError:
            regular = enhanced = math.nan
        if regular == enhanced:
            improvement = 1.0 if math.isfinite(regular) else math.nan
        elif enhanced == 0:
            improvement = math.inf
        else:
            improvement = sample_improvement(regular, enhanced)
        rows.append(ContractMetrics(
            contract=contract,
            k=k,
            expected_loss=m.mean_x,
            el_percent=100.0 * m.mean_x / contract.occ_limit,
            sim_error_regular=regular,
            sim_error_enhanced=enhanced,
            sample_improvement=improvement,
            se_regular=m.se_regular,
            se_enhanced=m.se_enhanced,
            var_x=m.var_x,
            var_y=m.var_y,
            n=m.n,
        ))
    return rows


@dataclass
class SimulationResult:
    plan: SimulationPlan
    metrics: list
    mean_trial_weight: dict
    trial_weight_se: dict

    def row(self, contract_name, k):
        for m in self.metrics:
            if m.contract.name == contract_name and m.k == float(k):
                return m
        raise KeyError((contract_name, k))


def simulate(plan, threads=1, progress=None):
    """Run every ``k`` of ``plan``; one :class:`ContractMetrics` per (k, contract)."""
    layout = _Layout(plan)
    logger.info("%d trials, %d events, %d chunks", plan.num_trials, layout.total_events, len(layout.chunks))
    n_cols = len(plan.contracts)
    metrics, mean_w, se_w = [], {}, {}
    for k_index, k in enumerate(plan.k_values):
        def consume(c_index, net, tw):
            return MomentAccumulator(n_cols).update(net, tw)

        acc = pairwise_merge(_year_tables(plan, layout, k_index, threads, consume))
        metrics.extend(_metrics_for(plan, k, acc))
        mean_w[k] = acc.mean_weight
        se_w[k] = math.sqrt(max(acc.weight_variance, 0.0) / acc.n)
        if progress is not None:
            progress(k_index + 1, len(plan.k_values), k)
    return SimulationResult(plan, metrics, mean_w, se_w)


def year_loss_table(plan, k_index=0, threads=1):
    """Full :class:`WeightedYearTable` for one ``k`` (memory grows with trials)."""
    layout = _Layout(plan)
    parts = _year_tables(plan, layout, k_index, threads, lambda i, net, tw: (net, tw))
    net = np.concatenate([p[0] for p in parts], axis=1)
    tw = np.concatenate([p[1] for p in parts])
    return WeightedYearTable(plan.contracts, net, tw)
