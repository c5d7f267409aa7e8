"""Non-deterministic single-rail gates built from linear optics and counting.

Qubits are single optical modes holding ``alpha|0> + beta|1>``. Every gate
returns a :class:`~singlerail.detection.HeraldedResult` whose probability
is the chance that all of its heralding detectors fire correctly.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Mapping, Sequence, Union

from .detection import (
    Branch,
    BranchEnsemble,
    HeraldedResult,
    herald_with_losses,
    lossy_outcomes,
)
from .fock import (
    DEFAULT_CUTOFF,
    PureState,
    coherent_state,
    make_basis_state,
    norm_squared,
    single_mode,
    tensor,
)
from .transforms import apply, beamsplitter, cs_network, embed, phase_shift

INV_SQRT2 = 1 / math.sqrt(2)

# Optional per-detector efficiencies, keyed by role name.
EfficiencySpec = Union[float, Mapping[str, float]]


def _eff(efficiency: EfficiencySpec, role: str) -> float:
    if isinstance(efficiency, Mapping):
        return float(efficiency.get(role, efficiency.get("default", 1.0)))
    return float(efficiency)


# --- qubit helpers ---------------------------------------------------------

def qubit(alpha: complex, beta: complex, cutoff: int = DEFAULT_CUTOFF) -> PureState:
    """Single-rail qubit ``alpha|0> + beta|1>`` (not normalised)."""
    return single_mode([alpha, beta], cutoff)


def two_qubits(alpha, beta, gamma, delta, cutoff: int = DEFAULT_CUTOFF) -> PureState:
    """``(alpha + beta a^dag + gamma b^dag + delta a^dag b^dag)|00>``."""
    return PureState(
        2, {(0, 0): alpha, (1, 0): beta, (0, 1): gamma, (1, 1): delta}, cutoff
    )


def plus_state(cutoff: int = DEFAULT_CUTOFF) -> PureState:
    """Normalised ``(|0> + |1>)/sqrt(2)``."""
    return qubit(INV_SQRT2, INV_SQRT2, cutoff)


def minus_state(cutoff: int = DEFAULT_CUTOFF) -> PureState:
    return qubit(INV_SQRT2, -INV_SQRT2, cutoff)


def _as_state(q, modes: int) -> PureState:
    if isinstance(q, PureState):
        if q.mode_count != modes:
            raise ValueError(f"expected a {modes}-mode state, got {q.mode_count} modes")
        return q
    q = tuple(q)
    if modes == 1 and len(q) == 2:
        return qubit(*q)
    if modes == 2 and len(q) == 4:
        return two_qubits(*q)
    raise ValueError(f"cannot interpret {q!r} as a {modes}-mode qubit state")


def _room(state: PureState, extra: int) -> int:
    return max(state.cutoff, state.max_photons() + extra)


# --- CS gate ---------------------------------------------------------------

def attach_cs(state: PureState, a: int, b: int) -> tuple[PureState, tuple[int, int]]:
    """Append two single-photon ancillas and run the CS network on ``(a, b)``.

    Returns the evolved state and the ancilla mode indices to be heralded
    on one photon each.
    """
    n = state.mode_count
    ancillas = make_basis_state((1, 1), 2)
    joint = tensor(state, ancillas, cutoff=_room(state, 2))
    out = apply(joint, embed(cs_network(), (a, b, n, n + 1), n + 2))
    return out, (n, n + 1)


def cs_gate(q, efficiency: EfficiencySpec = 1.0, resolution: int | None = None) -> HeraldedResult:
    """Heralded controlled-sign gate on two single-rail qubits.

    ``q`` is a 2-mode state or ``(alpha, beta, gamma, delta)``. Heralding
    needs one photon reported on each ancilla detector; with lossy
    detectors the output is an ensemble over lost-photon patterns.
    """
    state = _as_state(q, 2)
    evolved, (c, d) = attach_cs(state, 0, 1)
    effs = {c: _eff(efficiency, "cs"), d: _eff(efficiency, "cs")}
    return herald_with_losses(evolved, {c: 1, d: 1}, effs, resolution)


# --- superposition producer ------------------------------------------------

def reflectivity_for_chi(chi: float) -> float:
    """Beamsplitter reflectivity that equalises the heralded |0> and |1> amplitudes.

    Positive root of ``4 chi^2 eta^2 + (1 - 4 chi^2) eta + chi^2 - 1 = 0``,
    rewritten as ``1/2 + 1/(1 + sqrt(1 + 8 chi^2))`` so that ``chi -> 0``
    is exact (``eta -> 1``).
    """
    return 0.5 + 1.0 / (1.0 + math.sqrt(1.0 + 8.0 * chi * chi))


def reflectivity_for_chi_closed_form(chi: float, root: int = +1) -> float:
    """Textbook quadratic-formula expression; ill-conditioned as ``chi -> 0``."""
    c2 = chi * chi
    return (-1.0 + 4.0 * c2 + root * math.sqrt(1.0 + 8.0 * c2)) / (8.0 * c2)


# mode 0: single photon in, heralded output; mode 1: coherent in, herald detector
_SP_OUTPUT, _SP_HERALD = 0, 1


def producer_input(chi: float, cutoff: int = DEFAULT_CUTOFF) -> PureState:
    """Normalised two-mode input ``|1> (x) |chi>``, coherent truncated at ``cutoff - 1``."""
    coh = coherent_state(chi, max(cutoff - 1, 1)) * math.exp(-chi * chi / 2)
    return tensor(make_basis_state((1,), cutoff), coh, cutoff=cutoff)


def superposition_producer(
    chi: float,
    efficiency: EfficiencySpec = 1.0,
    cutoff: int = DEFAULT_CUTOFF,
    resolution: int | None = None,
) -> HeraldedResult:
    """Heralded ``|0> + |1>`` source from a coherent state and one photon.

    The photon and coherent state meet on a beamsplitter of reflectivity
    ``reflectivity_for_chi(chi)``; one photon reported at the coherent
    state's output port heralds the superposition in the other port. For
    ``chi < 0`` the heralded state has a positive relative sign, with small
    ``|2>``, ``|3>``, ... corrections.
    """
    eta = reflectivity_for_chi(chi)
    state = apply(producer_input(chi, cutoff), embed(beamsplitter(eta), (_SP_OUTPUT, _SP_HERALD), 2))
    return herald_with_losses(state, {_SP_HERALD: 1}, _eff(efficiency, "sp"), resolution)


@dataclass(frozen=True)
class SuperpositionWorkingPoint:
    """Operating point of the superposition producer at perfect detection.

    ``second_order_ratio`` compares the |2> and |1> Fock amplitudes.
    ``second_order_coefficient_ratio`` compares the same terms as
    coefficients of ``(a^dag)^n |0>``, i.e. the Fock ratio divided by
    ``sqrt(2)``. ``component_weight`` is the probability of heralding with
    the output found in |0>, equal to ``|<0|out>|^2``.
    """

    chi: float
    eta: float
    herald_probability: float
    second_order_ratio: float
    second_order_coefficient_ratio: float
    component_weight: float
    amplitudes: tuple[complex, ...] = field(repr=False)


def working_point(chi: float, cutoff: int = DEFAULT_CUTOFF) -> SuperpositionWorkingPoint:
    res = superposition_producer(chi, 1.0, cutoff)
    out = res.state
    amps = tuple(out[(n,)] for n in range(cutoff + 1))
    fock_ratio = abs(amps[2]) / abs(amps[1])
    return SuperpositionWorkingPoint(
        chi=chi,
        eta=reflectivity_for_chi(chi),
        herald_probability=res.herald_probability,
        second_order_ratio=fock_ratio,
        second_order_coefficient_ratio=fock_ratio / math.sqrt(2),
        component_weight=abs(amps[0]) ** 2,
        amplitudes=amps,
    )


# --- superposition-basis measurement -----------------------------------------

class MeasurementVerdict(enum.Enum):
    PLUS = "plus"
    MINUS = "minus"
    INCONCLUSIVE = "inconclusive"


PLUS_PATTERN = (1, 0)
MINUS_PATTERN = (0, 1)


def verdict(counts: Sequence[int]) -> MeasurementVerdict:
    """Map ``(resource-port count, unknown-port count)`` to a verdict."""
    counts = tuple(counts)
    if counts == PLUS_PATTERN:
        return MeasurementVerdict.PLUS
    if counts == MINUS_PATTERN:
        return MeasurementVerdict.MINUS
    return MeasurementVerdict.INCONCLUSIVE


def attach_measurement(state: PureState, resource_mode: int, unknown_mode: int) -> PureState:
    """50:50 splitter between the resource and the measured mode.

    Counting afterwards gives ``PLUS_PATTERN``/``MINUS_PATTERN`` over
    ``(resource_mode, unknown_mode)``.
    """
    return apply(state, embed(beamsplitter(0.5), (resource_mode, unknown_mode), state.mode_count))


@dataclass(frozen=True)
class MeasurementResult:
    plus: float
    minus: float
    inconclusive: float
    counts: dict[tuple[int, ...], float]

    def probability(self, v: MeasurementVerdict) -> float:
        return {
            MeasurementVerdict.PLUS: self.plus,
            MeasurementVerdict.MINUS: self.minus,
            MeasurementVerdict.INCONCLUSIVE: self.inconclusive,
        }[v]


def superposition_measurement(
    unknown: PureState,
    resource: PureState | None = None,
    efficiency: EfficiencySpec = 1.0,
    resolution: int | None = None,
) -> MeasurementResult:
    """Discriminate ``|0> + |1>`` from ``|0> - |1>`` on a single mode.

    ``resource`` defaults to the exact ``(|0> + |1>)/sqrt(2)``. Probabilities
    are relative to the norms of the inputs.
    """
    if resource is None:
        resource = plus_state(unknown.cutoff)
    joint = tensor(resource, unknown, cutoff=resource.max_photons() + unknown.max_photons())
    out = attach_measurement(joint, 0, 1)
    eff = _eff(efficiency, "measure")
    dist = lossy_outcomes(out, (0, 1), eff, resolution).probabilities()
    totals = {v: 0.0 for v in MeasurementVerdict}
    for counts, p in dist.items():
        totals[verdict(counts)] += p
    return MeasurementResult(
        totals[MeasurementVerdict.PLUS],
        totals[MeasurementVerdict.MINUS],
        totals[MeasurementVerdict.INCONCLUSIVE],
        dict(sorted(dist.items())),
    )


# --- Hadamard gate ---------------------------------------------------------

@dataclass(frozen=True)
class HadamardNetwork:
    """Pre-detection state of the Hadamard construction.

    Modes: 0 input qubit (then measured), 1 output, 2 measurement resource,
    3 and 4 CS ancillas. ``herald`` is the heralding pattern over the
    detector modes (everything except ``output_mode``); ``roles`` names the
    detector of each herald mode.
    """

    state: PureState
    herald: dict[int, int]
    roles: dict[int, str]
    output_mode: int = 1


def hadamard_network(q: PureState, gate_resource: PureState, meter_resource: PureState) -> HadamardNetwork:
    """Wire input, CS resource and measurement resource into the Hadamard network.

    The input and ``gate_resource`` pass through the CS gate; the input mode
    is then measured in the superposition basis against ``meter_resource``.
    Accepting the plus verdict leaves ``H(q)`` in mode 1.
    """
    cut = q.max_photons() + gate_resource.max_photons() + meter_resource.max_photons()
    joint = tensor(tensor(q, gate_resource, cutoff=cut), meter_resource, cutoff=cut)
    joint, (c, d) = attach_cs(joint, 0, 1)
    joint = attach_measurement(joint, 2, 0)
    herald = {0: PLUS_PATTERN[1], 2: PLUS_PATTERN[0], c: 1, d: 1}
    roles = {0: "measure", 2: "measure", c: "cs", d: "cs"}
    return HadamardNetwork(joint, dict(sorted(herald.items())), roles)


ResourceSpec = Union[str, tuple, PureState, HeraldedResult, None]


def resource_ensemble(
    spec: ResourceSpec,
    efficiency: EfficiencySpec = 1.0,
    cutoff: int = DEFAULT_CUTOFF,
    resolution: int | None = None,
) -> BranchEnsemble:
    """Resolve a resource description into weighted pure branches.

    ``"exact"``/``None`` gives ideal ``(|0>+|1>)/sqrt(2)`` with weight 1;
    ``("producer", chi)`` runs :func:`superposition_producer`, whose branch
    weights carry its herald probability.
    """
    if spec is None or spec == "exact":
        return BranchEnsemble((Branch((), (), 1.0, plus_state(cutoff)),))
    if isinstance(spec, PureState):
        n2 = norm_squared(spec)
        return BranchEnsemble((Branch((), (), n2, spec * (1 / math.sqrt(n2))),))
    if isinstance(spec, HeraldedResult):
        return spec.ensemble
    if isinstance(spec, tuple) and len(spec) == 2 and spec[0] == "producer":
        return superposition_producer(float(spec[1]), efficiency, cutoff, resolution).ensemble
    raise ValueError(f"unknown resource specification {spec!r}")


def _concat_branches(parts: Sequence[Branch], extra: Branch) -> Branch:
    reported = sum((p.reported for p in parts), ()) + extra.reported
    lost = sum((p.lost for p in parts), ()) + extra.lost
    weight = math.prod(p.weight for p in parts) * extra.weight
    return Branch(reported, lost, weight, extra.state)


def hadamard_gate(
    q,
    efficiency: EfficiencySpec = 1.0,
    resource_source: ResourceSpec = "exact",
    cutoff: int = DEFAULT_CUTOFF,
    resolution: int | None = None,
) -> HeraldedResult:
    """Single-rail Hadamard: ``alpha|0> + beta|1> -> alpha(|0>+|1>) + beta(|0>-|1>)``.

    ``q`` may be a state, ``(alpha, beta)``, or a :class:`HeraldedResult`
    (mixed input, e.g. a lossy producer output). The herald probability is
    the joint probability of every conditioning event, including producer
    heralds when resources come from producers, and is not renormalised.
    Output branches carry reported and lost counts of all heralding
    detectors: producers first (input, gate resource, meter resource),
    then the gate's own detectors in :class:`HadamardNetwork` mode order.
    """
    if isinstance(q, HeraldedResult):
        inputs = q.ensemble
    else:
        state = _as_state(q, 1)
        n2 = norm_squared(state)
        inputs = BranchEnsemble((Branch((), (), n2, state * (1 / math.sqrt(n2))),))
    gate_res = resource_ensemble(resource_source, efficiency, cutoff, resolution)
    meter_res = resource_ensemble(resource_source, efficiency, cutoff, resolution)

    branches = []
    for bq in inputs:
        for b1 in gate_res:
            for b2 in meter_res:
                net = hadamard_network(bq.state, b1.state, b2.state)
                effs = {m: _eff(efficiency, role) for m, role in net.roles.items()}
                res = herald_with_losses(net.state, net.herald, effs, resolution)
                for b in res.ensemble:
                    branches.append(_concat_branches((bq, b1, b2), b))
    ens = BranchEnsemble(tuple(branches))
    return HeraldedResult(ens, ens.total_weight, 1, cutoff)


def phase_gate(q, phi: float) -> PureState:
    """Deterministic phase rotation ``|n> -> exp(i n phi)|n>`` on one mode."""
    return apply(_as_state(q, 1), phase_shift(phi))
