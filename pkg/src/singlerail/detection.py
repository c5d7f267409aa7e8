"""Photon counting, heralding and the inefficient-detector loss channel.

An inefficient detector of efficiency ``e`` is modelled as a beamsplitter of
transmittivity ``e`` onto a vacuum ancilla, a perfect counter on the
transmitted mode, and a trace over the ancilla. The trace is kept exact by
retaining one pure branch per unobserved lost-photon count.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Mapping, Sequence, Union

from .fock import EPS_PRUNE, ModeMismatchError, PureState, ZeroStateError, norm_squared, tensor, vacuum
from .transforms import apply, beamsplitter, compose_all, embed

WEIGHT_FLOOR = EPS_PRUNE**2

Efficiency = Union[float, Mapping[int, float]]


def _check_modes(modes: Iterable[int], mode_count: int) -> tuple[int, ...]:
    modes = tuple(int(m) for m in modes)
    if len(set(modes)) != len(modes):
        raise ValueError(f"detector modes {modes} are not distinct")
    if any(m < 0 or m >= mode_count for m in modes):
        raise ModeMismatchError(f"detector modes {modes} out of range for {mode_count} modes")
    return modes


@dataclass(frozen=True)
class DetectionPattern:
    """Required photon count per detected mode, e.g. ``{2: 1, 3: 1}``."""

    requirements: Mapping[int, int]

    def __post_init__(self):
        req = {int(m): int(n) for m, n in dict(self.requirements).items()}
        if any(n < 0 for n in req.values()):
            raise ValueError(f"negative photon count in pattern {req}")
        object.__setattr__(self, "requirements", dict(sorted(req.items())))

    @property
    def modes(self) -> tuple[int, ...]:
        return tuple(self.requirements)

    @property
    def counts(self) -> tuple[int, ...]:
        return tuple(self.requirements.values())


def _as_pattern(pattern) -> DetectionPattern:
    return pattern if isinstance(pattern, DetectionPattern) else DetectionPattern(pattern)


@dataclass(frozen=True)
class Branch:
    """One pure branch of a mixture.

    ``reported`` are the counts the detectors show, ``lost`` the photons
    absorbed by the loss channel (unobservable, traced out). ``state`` is
    normalised; ``weight`` is its probability.
    """

    reported: tuple[int, ...]
    lost: tuple[int, ...]
    weight: float
    state: PureState

    @property
    def true_counts(self) -> tuple[int, ...]:
        return tuple(r + l for r, l in zip(self.reported, self.lost))

    def unnormalized_state(self) -> PureState:
        """``sqrt(weight) * state``, whose squared norm is the branch weight."""
        return self.state * math.sqrt(self.weight)


@dataclass(frozen=True)
class BranchEnsemble:
    """Probability-weighted collection of normalised pure branches."""

    branches: tuple[Branch, ...] = ()
    normalized: bool = field(default=True)

    def __iter__(self) -> Iterator[Branch]:
        return iter(self.branches)

    def __len__(self) -> int:
        return len(self.branches)

    @property
    def total_weight(self) -> float:
        return math.fsum(b.weight for b in self.branches)

    def probabilities(self) -> dict[tuple[int, ...], float]:
        """Reported-count distribution, summing over lost photons."""
        out: dict[tuple[int, ...], float] = {}
        for b in self.branches:
            out[b.reported] = out.get(b.reported, 0.0) + b.weight
        return out

    def grouped(self) -> dict[tuple[int, ...], "BranchEnsemble"]:
        """Sub-ensembles keyed by reported counts."""
        groups: dict[tuple[int, ...], list[Branch]] = {}
        for b in self.branches:
            groups.setdefault(b.reported, []).append(b)
        return {k: BranchEnsemble(tuple(v)) for k, v in groups.items()}

    def select(self, reported: Sequence[int]) -> "BranchEnsemble":
        reported = tuple(reported)
        return BranchEnsemble(tuple(b for b in self.branches if b.reported == reported))

    def probability_of(self, reported: Sequence[int]) -> float:
        return self.probabilities().get(tuple(reported), 0.0)


@dataclass(frozen=True)
class HeraldedResult:
    """Outcome of a heralded run.

    ``ensemble`` holds the branches consistent with the herald (one branch
    for ideal detection, one per lost-photon pattern otherwise) and
    ``herald_probability`` their total weight. For a pure outcome ``state``
    is the unnormalised conditioned state, ``norm^2 == herald_probability``.
    """

    ensemble: BranchEnsemble
    herald_probability: float
    mode_count: int
    cutoff: int

    @property
    def is_pure(self) -> bool:
        return len(self.ensemble) <= 1

    @property
    def state(self) -> PureState:
        if not self.is_pure:
            raise ValueError(
                f"heralded output is a mixture of {len(self.ensemble)} branches; use .ensemble"
            )
        if not self.ensemble.branches:
            return PureState(self.mode_count, {}, self.cutoff)
        return self.ensemble.branches[0].unnormalized_state()

    def normalized_state(self) -> PureState:
        if not self.ensemble.branches:
            raise ZeroStateError("herald never fires; no conditioned state")
        return self.ensemble.branches[0].state if self.is_pure else self.state


def _project(
    state: PureState, modes: tuple[int, ...]
) -> dict[tuple[int, ...], dict[tuple[int, ...], complex]]:
    """Split ``state`` by the counts on ``modes``; remaining modes keep their order."""
    keep = [i for i in range(state.mode_count) if i not in modes]
    parts: dict[tuple[int, ...], dict[tuple[int, ...], complex]] = {}
    for occ, amp in state.items():
        counts = tuple(occ[m] for m in modes)
        rest = tuple(occ[i] for i in keep)
        parts.setdefault(counts, {})[rest] = amp
    return parts


def condition(state: PureState, pattern) -> HeraldedResult:
    """Project onto the pattern's counts and remove the detected modes.

    The herald probability is relative to the norm of ``state``; for a
    normalised input ``result.state`` is the plain projection.
    """
    pattern = _as_pattern(pattern)
    modes = _check_modes(pattern.modes, state.mode_count)
    remaining = state.mode_count - len(modes)
    branches = [b for b in outcome_distribution(state, modes) if b.reported == pattern.counts]
    ens = BranchEnsemble(tuple(branches))
    return HeraldedResult(ens, ens.total_weight, remaining, state.cutoff)


def outcome_distribution(state: PureState, modes: Sequence[int]) -> BranchEnsemble:
    """Perfect photon counting on ``modes``: one branch per count tuple."""
    modes = _check_modes(modes, state.mode_count)
    total = norm_squared(state)
    branches = []
    for counts, amps in sorted(_project(state, modes).items()):
        sub = PureState(state.mode_count - len(modes), amps, state.cutoff)
        n2 = norm_squared(sub)
        weight = n2 / total
        if weight <= WEIGHT_FLOOR:
            continue
        branches.append(Branch(counts, (0,) * len(modes), weight, sub * (1 / math.sqrt(n2))))
    return BranchEnsemble(tuple(branches))


def _efficiencies(efficiency: Efficiency, modes: tuple[int, ...]) -> list[float]:
    if isinstance(efficiency, Mapping):
        effs = [float(efficiency[m]) for m in modes]
    else:
        effs = [float(efficiency)] * len(modes)
    for e in effs:
        if not 0.0 <= e <= 1.0:
            raise ValueError(f"detector efficiency must lie in [0, 1], got {e}")
    return effs


def lossy_outcomes(
    state: PureState,
    modes: Sequence[int],
    efficiency: Efficiency,
    resolution: int | None = None,
) -> BranchEnsemble:
    """Inefficient photon counting on several modes at once.

    Each detected mode gets a vacuum ancilla and a beamsplitter of
    transmittivity ``efficiency`` (a float, or a per-mode mapping) before
    perfect counting; ancilla counts become the ``lost`` labels. With
    ``resolution=k`` a detector reports any count ``>= k`` as ``k``.
    """
    modes = _check_modes(modes, state.mode_count)
    effs = _efficiencies(efficiency, modes)
    n = state.mode_count
    k = len(modes)
    # ancilla i sits at mode n + i
    extended = tensor(state, vacuum(k, state.cutoff), cutoff=state.cutoff)
    if k:
        network = compose_all(
            [embed(beamsplitter(e), (m, n + i), n + k) for i, (m, e) in enumerate(zip(modes, effs))]
        )
        extended = apply(extended, network)
    joint = outcome_distribution(extended, modes + tuple(range(n, n + k)))
    branches = []
    for b in joint:
        reported, lost = b.reported[:k], b.reported[k:]
        if resolution is not None:
            reported = tuple(min(r, resolution) for r in reported)
        branches.append(Branch(reported, lost, b.weight, b.state))
    return BranchEnsemble(tuple(branches))


def lossy_detect(state: PureState, mode: int, efficiency: float, resolution: int | None = None) -> BranchEnsemble:
    """Single inefficient detector on ``mode``; see :func:`lossy_outcomes`."""
    return lossy_outcomes(state, (mode,), efficiency, resolution)


def herald_with_losses(
    state: PureState,
    pattern,
    efficiency: Efficiency = 1.0,
    resolution: int | None = None,
) -> HeraldedResult:
    """Keep the branches whose *reported* counts match ``pattern``.

    The probability is not renormalised to the herald: it is the chance of
    seeing the pattern in a single run.
    """
    pattern = _as_pattern(pattern)
    ens = lossy_outcomes(state, pattern.modes, efficiency, resolution).select(pattern.counts)
    return HeraldedResult(ens, ens.total_weight, state.mode_count - len(pattern.modes), state.cutoff)


def reported_count_distribution(
    state: PureState, modes: Sequence[int], efficiency: Efficiency, resolution: int | None = None
) -> dict[tuple[int, ...], float]:
    """Reported-count probabilities by binomial thinning of the Fock populations.

    Independent of the ancilla construction in :func:`lossy_outcomes`; used
    where only probabilities are needed and as a cross-check.
    """
    modes = _check_modes(modes, state.mode_count)
    effs = _efficiencies(efficiency, modes)
    total = norm_squared(state)
    out: dict[tuple[int, ...], float] = {}
    for occ, amp in state.items():
        p = abs(amp) ** 2 / total
        partial = {(): p}
        for m, e in zip(modes, effs):
            nm = occ[m]
            nxt = {}
            for key, w in partial.items():
                for r in range(nm + 1):
                    pr = math.comb(nm, r) * e**r * (1 - e) ** (nm - r)
                    if pr == 0.0:
                        continue
                    rep = r if resolution is None else min(r, resolution)
                    kk = key + (rep,)
                    nxt[kk] = nxt.get(kk, 0.0) + w * pr
            partial = nxt
        for key, w in partial.items():
            out[key] = out.get(key, 0.0) + w
    return out
