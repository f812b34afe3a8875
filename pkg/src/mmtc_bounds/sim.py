"""Monte-Carlo slotted-ALOHA simulator used to validate the analytic model.

The physical layer is abstracted: a slot with exactly one transmitter is
decoded successfully with probability 1 - p_e, a slot with two or more
transmitters delivers nothing.

Randomness comes from numpy's PCG64 bit generator; independent streams for
arrivals, decoding outcomes, probe messages and transmit decisions are
spawned from one SeedSequence, so a (config, seed) pair fixes the result
bit for bit.
"""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass

import numpy as np

from .aloha import NO_RETX, RETX
from .errors import DomainError, SimulationUnstable
from .fbl import pe_normal_approx

RNG_ALGORITHM = "numpy-PCG64-SeedSequence"
Z95 = 1.959963984540054
PROBE_EVERY = 100
MAX_BACKLOG = 10**6
N_BATCHES = 100


@dataclass(frozen=True)
class SimConfig:
    mode: str
    k: int
    n: int
    lam: float
    snr: float | None = None
    g: float | None = None
    slots: int = 10**6
    warmup_slots: int | None = None
    seed: int = 0
    pe_override: float | None = None

    def __post_init__(self):
        if self.mode not in (NO_RETX, RETX):
            raise DomainError(f"mode must be {NO_RETX!r} or {RETX!r}, got {self.mode!r}")
        if self.k < 1 or self.n < 1:
            raise DomainError("k and n must be >= 1")
        if not self.lam > 0:
            raise DomainError(f"lambda must be positive, got {self.lam}")
        if self.pe_override is None and not (self.snr is not None and self.snr > 0):
            raise DomainError("need a positive snr or a pe_override")
        if self.pe_override is not None and not 0.0 <= self.pe_override <= 1.0:
            raise DomainError(f"pe_override must lie in [0, 1], got {self.pe_override}")
        if self.mode == RETX and not (self.g is not None and 0.0 < self.g <= 1.0):
            raise DomainError("retx mode requires g in (0, 1]")
        if not 0 <= self.seed < 2**64:
            raise DomainError("seed must be a 64-bit unsigned integer")
        if self.warmup_slots is None:
            object.__setattr__(self, "warmup_slots", self.slots // 10 if self.mode == RETX else 0)
        if not self.slots > self.warmup_slots >= 0:
            raise DomainError("need slots > warmup_slots >= 0")

    @property
    def pe(self) -> float:
        if self.pe_override is not None:
            return float(self.pe_override)
        return pe_normal_approx(self.k, self.n, self.snr)


@dataclass(frozen=True)
class SimResult:
    mode: str
    slots: int
    warmup_slots: int
    seed: int
    rng: str
    generated: int
    delivered: int
    pdr_actual: float
    pdr_virtual: float
    ci_halfwidth: float  # 95 %, for pdr_actual
    ci_halfwidth_virtual: float
    throughput_bits_per_sample: float
    s_avg: float
    s_model: float  # g * (1 - pi0_hat) / lambda, NaN without retransmissions
    s_diff_se: float  # batch-means standard error of s_avg - s_model
    pi0_hat: float
    success_rate: float  # successes per slot with a non-empty backlog, retx only
    success_rate_model: float  # single-transmitter probability averaged over visited backlogs
    success_rate_se: float

    def as_dict(self) -> dict:
        return asdict(self)


def _streams(seed: int, count: int):
    return [np.random.Generator(np.random.PCG64(s)) for s in np.random.SeedSequence(seed).spawn(count)]


def _ratio_se(num: np.ndarray, den: np.ndarray) -> float:
    """Delta-method standard error of sum(num)/sum(den) over iid units."""
    total = den.sum()
    if total == 0:
        return math.nan
    r = num.sum() / total
    resid = num - r * den
    return float(math.sqrt((resid**2).sum()) / total)


def _batch_se(values: np.ndarray) -> float:
    values = values[np.isfinite(values)]
    if len(values) < 2:
        return math.nan
    return float(values.std(ddof=1) / math.sqrt(len(values)))


def simulate_no_retx(cfg: SimConfig) -> SimResult:
    """One-shot transmissions: every message is sent once, in the slot after it appears."""
    if cfg.mode != NO_RETX:
        raise DomainError("simulate_no_retx needs mode='no_retx'")
    pe = cfg.pe
    arrivals_rng, decode_rng, probe_rng = _streams(cfg.seed, 3)
    w = cfg.warmup_slots

    arrivals = arrivals_rng.poisson(cfg.lam, cfg.slots)[w:]
    decoded = decode_rng.random(cfg.slots)[w:] >= pe
    success = (arrivals == 1) & decoded
    generated = int(arrivals.sum())
    delivered = int(success.sum())
    pdr = delivered / generated if generated else math.nan

    # tagged probe messages are added on top of the arrival stream
    probe_slots = np.arange(0, len(arrivals), PROBE_EVERY)
    probe_ok = (arrivals[probe_slots] == 0) & (probe_rng.random(len(probe_slots)) >= pe)
    pdr_v = float(probe_ok.mean())

    measured = cfg.slots - w
    return SimResult(
        mode=cfg.mode, slots=cfg.slots, warmup_slots=w, seed=cfg.seed, rng=RNG_ALGORITHM,
        generated=generated, delivered=delivered,
        pdr_actual=pdr,
        pdr_virtual=pdr_v,
        ci_halfwidth=Z95 * _ratio_se(success.astype(float), arrivals.astype(float)),
        ci_halfwidth_virtual=Z95 * math.sqrt(pdr_v * (1.0 - pdr_v) / len(probe_slots)),
        throughput_bits_per_sample=delivered * cfg.k / (measured * cfg.n),
        s_avg=generated / delivered if delivered else math.nan,
        s_model=math.nan,
        s_diff_se=math.nan,
        pi0_hat=float(np.mean(arrivals == 0)),
        success_rate=math.nan,
        success_rate_model=math.nan,
        success_rate_se=math.nan,
    )


def simulate_retx(cfg: SimConfig) -> SimResult:
    """Backlogged ALOHA: each of the M_a active devices transmits with probability min(1, g/M_a) until delivered.

    New messages join the backlog at the next slot boundary. Raises
    SimulationUnstable when the backlog passes ``MAX_BACKLOG`` or grows over
    the measurement window far beyond what a zero-drift walk would produce.
    """
    if cfg.mode != RETX:
        raise DomainError("simulate_retx needs mode='retx'")
    pe, g, lam = cfg.pe, cfg.g, cfg.lam
    arrivals_rng, decode_rng, tx_rng = _streams(cfg.seed, 3)
    arrivals = arrivals_rng.poisson(lam, cfg.slots)
    u_dec = decode_rng.random(cfg.slots)
    u_tx = tx_rng.random(cfg.slots)

    backlog_at = np.empty(cfg.slots, dtype=np.int64)
    transmitters = np.empty(cfg.slots, dtype=np.int64)
    successes = np.zeros(cfg.slots, dtype=bool)
    p_single = np.zeros(cfg.slots)

    m = 0
    for t in range(cfg.slots):
        backlog_at[t] = m
        if m > 0:
            p = g / m if g < m else 1.0
            if p >= 1.0:
                kt = m
                p_single[t] = 1.0 if m == 1 else 0.0
            else:
                # binomial(m, p) by inverse CDF; the mean is g <= 1 so the walk is short
                q = 1.0 - p
                pmf = q**m
                p_single[t] = m * p * q ** (m - 1)
                cdf, kt, u = pmf, 0, u_tx[t]
                ratio = p / q
                while u > cdf and kt < m:
                    pmf *= (m - kt) / (kt + 1) * ratio
                    kt += 1
                    cdf += pmf
            transmitters[t] = kt
            if kt == 1 and u_dec[t] >= pe:
                successes[t] = True
                m -= 1
        else:
            transmitters[t] = 0
        m += int(arrivals[t])
        if m > MAX_BACKLOG:
            raise SimulationUnstable(
                f"backlog exceeded {MAX_BACKLOG} at slot {t} (lambda={lam}, g={g})",
                slot=t, backlog=m, lam=lam, g=g,
            )

    w = cfg.warmup_slots
    measured = cfg.slots - w
    growth = m - int(backlog_at[w])
    limit = 6.0 * math.sqrt(measured * (lam + 1.0))
    if growth > limit:
        raise SimulationUnstable(
            f"backlog grew by {growth} over {measured} slots (zero-drift 6-sigma limit {limit:.0f}); "
            f"lambda={lam} is above the critical rate for g={g}",
            slot=cfg.slots, backlog=m, lam=lam, g=g,
        )

    arr = arrivals[w:]
    ma = backlog_at[w:]
    kt = transmitters[w:]
    ok = successes[w:]
    ps = p_single[w:] * (1.0 - pe)
    busy = ma > 0

    generated = int(arr.sum())
    delivered = int(ok.sum())
    attempts = int(kt.sum())
    pi0_hat = float(np.mean(~busy))
    s_avg = attempts / delivered if delivered else math.nan
    s_model = g * (1.0 - pi0_hat) / lam

    batches = np.array_split(np.arange(measured), N_BATCHES)
    diff = []
    for idx in batches:
        d = ok[idx].sum()
        s_b = kt[idx].sum() / d if d else math.nan
        diff.append(s_b - g * np.mean(busy[idx]) / lam)

    return SimResult(
        mode=cfg.mode, slots=cfg.slots, warmup_slots=w, seed=cfg.seed, rng=RNG_ALGORITHM,
        generated=generated, delivered=delivered,
        pdr_actual=delivered / generated if generated else math.nan,
        pdr_virtual=math.nan,
        ci_halfwidth=math.nan,
        ci_halfwidth_virtual=math.nan,
        throughput_bits_per_sample=delivered * cfg.k / (measured * cfg.n),
        s_avg=s_avg,
        s_model=s_model,
        s_diff_se=_batch_se(np.array(diff)),
        pi0_hat=pi0_hat,
        success_rate=float(ok[busy].mean()) if busy.any() else math.nan,
        success_rate_model=float(ps[busy].mean()) if busy.any() else math.nan,
        success_rate_se=_batch_se(np.array([ok[i][busy[i]].mean() - ps[i][busy[i]].mean()
                                            for i in batches if busy[i].any()])),
    )


def simulate(cfg: SimConfig) -> SimResult:
    return simulate_no_retx(cfg) if cfg.mode == NO_RETX else simulate_retx(cfg)
