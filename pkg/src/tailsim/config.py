"""Plain-text run configuration.

One ``key = value`` per line, ``#`` starts a comment::

    trials = 1000000
    lambda = 3
    severity_mean = 10
    severity_sd = 30
    k_values = 1, 1.5, 2, 3
    mode = riemann          # or random
    seed = 0
    confidence_level = 0.95
    chunk_trials = 65536
    contract = contract_1, 34, 34, 0, 34   # name, occ_att, occ_lim, agg_att, agg_lim
"""

from .engine import DEFAULT_CHUNK_TRIALS, SimulationPlan
from .errors import DomainError
from .sampling import SampleMode
from .terms import Contract

REQUIRED = ("trials", "lambda", "severity_mean", "severity_sd", "k_values")
OPTIONAL = ("mode", "seed", "confidence_level", "chunk_trials")
DEFAULTS = {"mode": "riemann", "seed": 0, "confidence_level": 0.95, "chunk_trials": DEFAULT_CHUNK_TRIALS}


class ConfigError(ValueError):
    pass


def _float(text, where):
    try:
        return float(text)
    except ValueError:
        raise ConfigError(f"{where}: expected a number, got {text!r}") from None


def _int(text, where):
    try:
        return int(text)
    except ValueError:
        raise ConfigError(f"{where}: expected an integer, got {text!r}") from None


def _parse_value(key, text, where):
    if key in ("trials", "seed", "chunk_trials"):
        return _int(text, where)
    if key in ("lambda", "severity_mean", "severity_sd", "confidence_level"):
        return _float(text, where)
    if key == "k_values":
        items = [s.strip() for s in text.split(",")]
        if not all(items):
            raise ConfigError(f"{where}: empty entry in k_values list {text!r}")
        values = tuple(_float(s, where) for s in items)
        for k in values:
            if not k >= 1.0:
                raise ConfigError(f"{where}: k_values entries must be >= 1 (transform exponent range), got {k}")
        return values
    if key == "mode":
        if text not in ("riemann", "random"):
            raise ConfigError(f"{where}: mode must be 'riemann' or 'random', got {text!r}")
        return text
    raise AssertionError(key)


def _parse_contract(text, where):
    parts = [s.strip() for s in text.split(",")]
    if len(parts) != 5:
        raise ConfigError(f"{where}: contract needs 'name, occ_att, occ_lim, agg_att, agg_lim', got {text!r}")
    name = parts[0]
    nums = [_float(s, where) for s in parts[1:]]
    try:
        return Contract(name, *nums)
    except DomainError as exc:
        raise ConfigError(f"{where}: {exc}") from None


def parse_config(text, source="<config>"):
    """Parse and validate configuration text into a :class:`SimulationPlan`."""
    values = {}
    contracts = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{source}:{lineno}: expected 'key = value', got {raw.strip()!r}")
        key, _, value = (s.strip() for s in line.partition("="))
        where = f"{source}:{lineno}: {key}"
        if key == "contract":
            contracts.append(_parse_contract(value, where))
        elif key in REQUIRED or key in OPTIONAL:
            if key in values:
                raise ConfigError(f"{where}: duplicate key")
            values[key] = _parse_value(key, value, where)
        else:
            raise ConfigError(f"{source}:{lineno}: unknown key {key!r}")

    missing = [k for k in REQUIRED if k not in values]
    if not contracts:
        missing.append("contract")
    if missing:
        raise ConfigError(f"{source}: missing required keys: {', '.join(missing)}")

    merged = {**DEFAULTS, **values}
    try:
        return SimulationPlan(
            num_trials=merged["trials"],
            lam=merged["lambda"],
            severity_mean=merged["severity_mean"],
            severity_sd=merged["severity_sd"],
            k_values=merged["k_values"],
            contracts=tuple(contracts),
            mode=SampleMode(merged["mode"], merged["seed"]),
            confidence_level=merged["confidence_level"],
            chunk_trials=merged["chunk_trials"],
        )
    except DomainError as exc:
        raise ConfigError(f"{source}: {exc}") from None


def serialize_config(plan):
    """Configuration text that parses back to ``plan``."""
    lines = [
        f"trials = {plan.num_trials}",
        f"lambda = {plan.lam!r}",
        f"severity_mean = {plan.severity_mean!r}",
        f"severity_sd = {plan.severity_sd!r}",
        "k_values = " + ", ".join(repr(k) for k in plan.k_values),
        f"mode = {plan.mode.mode}",
        f"seed = {plan.mode.seed}",
        f"confidence_level = {plan.confidence_level!r}",
        f"chunk_trials = {plan.chunk_trials}",
    ]
    for c in plan.contracts:
        lines.append(
            f"contract = {c.name}, {float(c.occ_attach)!r}, {float(c.occ_limit)!r}, "
            f"{float(c.agg_attach)!r}, {float(c.agg_limit)!r}"
        )
    return "\n".join(lines) + "\n"
