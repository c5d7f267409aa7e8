"""Phase-fringe test circuit: producer -> phase shift -> Hadamard -> detector.

The observable is the joint probability that every conditioning detector
reports correctly *and* the output detector (ideal unless configured
otherwise) reports no photon. Probabilities
are computed exactly. Because the phase only multiplies the input's Fock
component ``|k>`` by ``exp(i k phi)`` and every remaining mode is counted,

    p(phi) = sum_{k,k'} M[k,k'] G[k,k'] exp(i (k - k') phi)

with ``M`` the (unnormalised) input density matrix and ``G`` a loss-weighted
Gram matrix of the network images of ``|k>``. Both are built once per
configuration.
"""

from __future__ import annotations

import csv
import dataclasses
import json
import math
from dataclasses import dataclass, field
from functools import lru_cache
from pathlib import Path
from typing import Mapping, Optional, Sequence

import numpy as np

from .detection import Branch, BranchEnsemble
from .fock import make_basis_state
from .gates import hadamard_network, plus_state, resource_ensemble, superposition_producer

DEFAULT_CHI = -0.33714
RESOURCE_POLICIES = ("exact", "producer")
DETECTOR_ROLES = ("sp", "cs", "measure", "final")


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class ExperimentConfig:
    """Settings for the fringe experiment.

    ``efficiency`` applies to every heralding detector: the producers',
    the CS ancillas' and the superposition measurement's. The output
    detector is ideal unless ``lossy_output_detector`` is set.
    ``detector_efficiencies`` overrides the efficiency per role (``sp``,
    ``cs``, ``measure``, ``final``). ``resolution`` caps reported counts
    (``2`` reports any count >= 2 as 2); ``None`` means full resolution.
    """

    chi: float = DEFAULT_CHI
    efficiency: float = 1.0
    phase_points: int = 64
    phase_range: tuple[float, float] = (0.0, 2 * math.pi)
    resource_policy: str = "producer"
    cutoff: int = 6
    output_path: str = "fringe.csv"
    resolution: Optional[int] = None
    # stored as sorted (role, efficiency) pairs so the config stays hashable
    detector_efficiencies: Optional[tuple[tuple[str, float], ...]] = None
    lossy_output_detector: bool = False

    def __post_init__(self):
        object.__setattr__(self, "phase_range", tuple(float(x) for x in self.phase_range))
        if self.detector_efficiencies is not None:
            pairs = dict(self.detector_efficiencies)
            object.__setattr__(
                self, "detector_efficiencies", tuple(sorted((str(k), float(v)) for k, v in pairs.items()))
            )
        self.validate()

    def validate(self) -> None:
        if not 0.0 <= self.efficiency <= 1.0:
            raise ConfigError(f"efficiency must lie in [0, 1], got {self.efficiency}")
        for role, e in self.detector_efficiencies or ():
            if role not in DETECTOR_ROLES:
                raise ConfigError(f"unknown detector role {role!r}; expected one of {DETECTOR_ROLES}")
            if not 0.0 <= e <= 1.0:
                raise ConfigError(f"{role} efficiency must lie in [0, 1], got {e}")
        if self.phase_points < 2:
            raise ConfigError("phase_points must be at least 2")
        if len(self.phase_range) != 2 or not self.phase_range[0] < self.phase_range[1]:
            raise ConfigError(f"phase_range must be an increasing pair, got {self.phase_range}")
        if self.resource_policy not in RESOURCE_POLICIES:
            raise ConfigError(
                f"resource_policy must be one of {RESOURCE_POLICIES}, got {self.resource_policy!r}"
            )
        if self.cutoff < 1:
            raise ConfigError("cutoff must be positive")
        if self.resource_policy == "producer" and self.cutoff < 4:
            raise ConfigError("producer resources need cutoff >= 4")
        if self.resolution is not None and self.resolution < 1:
            raise ConfigError("resolution must be >= 1 or None")

    def detector_efficiency(self, role: str) -> float:
        overrides = dict(self.detector_efficiencies or ())
        if role in overrides:
            return float(overrides[role])
        if role == "final" and not self.lossy_output_detector:
            return 1.0
        return float(self.efficiency)

    def phases(self) -> np.ndarray:
        """Uniform grid over ``[phi_min, phi_max)``."""
        lo, hi = self.phase_range
        return lo + (hi - lo) * np.arange(self.phase_points) / self.phase_points

    def replace(self, **changes) -> "ExperimentConfig":
        return dataclasses.replace(self, **changes)

    def to_dict(self) -> dict:
        d = dataclasses.asdict(self)
        d["phase_range"] = list(self.phase_range)
        if self.detector_efficiencies is not None:
            d["detector_efficiencies"] = dict(self.detector_efficiencies)
        return d

    @classmethod
    def from_dict(cls, data: Mapping) -> "ExperimentConfig":
        known = {f.name for f in dataclasses.fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        return cls(**dict(data))

    @classmethod
    def from_file(cls, path) -> "ExperimentConfig":
        try:
            data = json.loads(Path(path).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from exc
        if not isinstance(data, dict):
            raise ConfigError(f"config {path} must hold a JSON object")
        return cls.from_dict(data)


def _thinning(n: int, reported: int, eff: float, resolution: Optional[int]) -> float:
    """P(detector reports ``reported`` | ``n`` photons arrive)."""
    if resolution is not None and reported == resolution:
        return math.fsum(
            math.comb(n, r) * eff**r * (1 - eff) ** (n - r) for r in range(resolution, n + 1)
        )
    if reported > n:
        return 0.0
    return math.comb(n, reported) * eff**reported * (1 - eff) ** (n - reported)


def _density_matrix(ensemble: BranchEnsemble, dim: int) -> np.ndarray:
    """``sum_b w_b |psi_b><psi_b|`` over single-mode branch states."""
    m = np.zeros((dim, dim), dtype=complex)
    for b in ensemble:
        c = np.array([b.state[(k,)] for k in range(dim)])
        m += b.weight * np.outer(c, c.conj())
    return m


class FringeModel:
    """Precomputed phase-independent data for one configuration.

    The Hadamard network is linear in each of its three single-mode inputs,
    so images of Fock triples ``|k, j, l>`` (input, gate resource, meter
    resource) suffice. Their loss-weighted Gram tensor is contracted with
    the resource density matrices to give ``G[k, k']``.
    """

    def __init__(self, cfg: ExperimentConfig):
        self.cfg = cfg
        cutoff = cfg.cutoff
        effs = {r: cfg.detector_efficiency(r) for r in DETECTOR_ROLES}

        if cfg.resource_policy == "producer":
            inputs = superposition_producer(cfg.chi, effs["sp"], cutoff, cfg.resolution).ensemble
            resources = resource_ensemble(("producer", cfg.chi), effs["sp"], cutoff, cfg.resolution)
        else:
            inputs = BranchEnsemble((Branch((), (), 1.0, plus_state(cutoff)),))
            resources = resource_ensemble("exact", cutoff=cutoff)

        self.kmax = max(b.state.max_photons() for b in inputs)
        jmax = max(b.state.max_photons() for b in resources)
        self.input_matrix = _density_matrix(inputs, self.kmax + 1)
        self.resource_matrix = _density_matrix(resources, jmax + 1)

        h_joint, h_cond = self._basis_grams(self.kmax, jmax, effs)
        r = self.resource_matrix
        # G[k, k'] = sum R[j, j'] R[l, l'] H[k, j, l, k', j', l']
        self.gram_joint = np.einsum("ajlbmn,jm,ln->ab", h_joint, r, r)
        self.gram_cond = np.einsum("ajlbmn,jm,ln->ab", h_cond, r, r)
        self._weighted_joint = self.input_matrix * self.gram_joint
        self._weighted_cond = self.input_matrix * self.gram_cond

    def _basis_grams(self, kmax: int, jmax: int, effs: Mapping[str, float]):
        shape = (kmax + 1, jmax + 1, jmax + 1)
        images = []
        for k, j, l in np.ndindex(*shape):
            net = hadamard_network(
                make_basis_state((k,), k), make_basis_state((j,), j), make_basis_state((l,), l)
            )
            images.append(net.state)
        index: dict[tuple[int, ...], int] = {}
        for s in images:
            for occ in s:
                index.setdefault(occ, len(index))
        phi = np.zeros((len(images), len(index)), dtype=complex)
        for row, s in enumerate(images):
            for occ, amp in s.items():
                phi[row, index[occ]] = amp

        res = self.cfg.resolution
        w_cond = np.empty(len(index))
        w_final = np.empty(len(index))
        for occ, i in index.items():
            w = 1.0
            for mode, want in net.herald.items():
                w *= _thinning(occ[mode], want, effs[net.roles[mode]], res)
            w_cond[i] = w
            w_final[i] = _thinning(occ[net.output_mode], 0, effs["final"], res)
        h_cond = (phi * w_cond) @ phi.conj().T
        h_joint = (phi * (w_cond * w_final)) @ phi.conj().T
        return h_joint.reshape(shape + shape), h_cond.reshape(shape + shape)

    def _evaluate(self, weighted: np.ndarray, phi: float) -> float:
        k = np.arange(self.kmax + 1)
        phase = np.exp(1j * phi * (k[:, None] - k[None, :]))
        return float(np.real(np.sum(weighted * phase)))

    def joint(self, phi: float) -> float:
        return self._evaluate(self._weighted_joint, phi)

    def conditioning(self, phi: float) -> float:
        return self._evaluate(self._weighted_cond, phi)

    def __call__(self, phi: float) -> tuple[float, float]:
        pj = self.joint(phi)
        pc = self.conditioning(phi)
        return pj, (pj / pc if pc > 0 else float("nan"))


def run_test_circuit(phi: float, cfg: ExperimentConfig) -> tuple[float, float]:
    """``(p_joint, p_normalized)`` for one phase setting.

    ``p_joint`` includes every conditioning probability; ``p_normalized``
    is the probability of no photon at the output given correct heralds.
    """
    return fringe_model(cfg)(phi)


@lru_cache(maxsize=32)
def _cached_model(key: ExperimentConfig) -> FringeModel:
    return FringeModel(key)


def fringe_model(cfg: ExperimentConfig) -> FringeModel:
    """Shared :class:`FringeModel`; output path and phase grid are not part of the key."""
    return _cached_model(cfg.replace(output_path="", phase_points=2, phase_range=(0.0, 1.0)))


def visibility(samples: Sequence[float]) -> float:
    """Fringe visibility ``(max - min) / (max + min)``."""
    samples = np.asarray(samples, dtype=float)
    if samples.size < 2:
        raise ValueError("visibility needs at least two samples")
    hi, lo = samples.max(), samples.min()
    if hi + lo <= 0:
        raise ValueError("visibility undefined for all-zero samples")
    return float((hi - lo) / (hi + lo))


@dataclass(frozen=True)
class SweepResult:
    samples: tuple[tuple[float, float, float], ...]
    visibility: float
    config: ExperimentConfig = field(repr=False)

    @property
    def phases(self) -> np.ndarray:
        return np.array([s[0] for s in self.samples])

    @property
    def p_joint(self) -> np.ndarray:
        return np.array([s[1] for s in self.samples])

    @property
    def p_normalized(self) -> np.ndarray:
        return np.array([s[2] for s in self.samples])


def run_phase_sweep(cfg: ExperimentConfig, write: bool = True) -> SweepResult:
    model = fringe_model(cfg)
    samples = []
    for phi in cfg.phases():
        pj, pn = model(float(phi))
        samples.append((float(phi), pj, pn))
    result = SweepResult(tuple(samples), visibility([s[1] for s in samples]), cfg)
    if write:
        write_sweep(result, cfg.output_path)
    return result


def metadata_path(csv_path) -> Path:
    p = Path(csv_path)
    return p.with_name(p.name + ".meta")


def write_sweep(result: SweepResult, path) -> tuple[Path, Path]:
    """Write ``phi,p_joint,p_normalized`` rows plus a ``key = value`` sidecar."""
    path = Path(path)
    try:
        with path.open("w", newline="") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(["phi", "p_joint", "p_normalized"])
            for phi, pj, pn in result.samples:
                writer.writerow([repr(phi), repr(pj), repr(pn)])
        meta = metadata_path(path)
        lines = [f"{k} = {json.dumps(v)}" for k, v in result.config.to_dict().items()]
        lines.append(f"visibility = {result.visibility!r}")
        meta.write_text("\n".join(lines) + "\n")
    except OSError as exc:
        raise OSError(f"cannot write sweep output to {path}: {exc}") from exc
    return path, meta


def read_sweep(path) -> list[tuple[float, float, float]]:
    with Path(path).open(newline="") as fh:
        reader = csv.DictReader(fh)
        return [(float(r["phi"]), float(r["p_joint"]), float(r["p_normalized"])) for r in reader]
