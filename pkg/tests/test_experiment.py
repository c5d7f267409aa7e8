import json
import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from singlerail import detection, experiment, gates
from singlerail.detection import Branch, BranchEnsemble, HeraldedResult
from singlerail.experiment import ConfigError, ExperimentConfig

phases = st.floats(-10, 10, allow_nan=False)


def brute_force(phi, cfg):
    """Run the circuit branch by branch through the gate API."""
    chi, eff, cut = cfg.chi, cfg.efficiency, cfg.cutoff
    if cfg.resource_policy == "producer":
        sp = gates.superposition_producer(chi, eff, cut, cfg.resolution)
        source = ("producer", chi)
    else:
        sp = HeraldedResult(BranchEnsemble((Branch((), (), 1.0, gates.plus_state(cut)),)), 1.0, 1, cut)
        source = "exact"
    shifted = BranchEnsemble(
        tuple(Branch(b.reported, b.lost, b.weight, gates.phase_gate(b.state, phi)) for b in sp.ensemble)
    )
    h = gates.hadamard_gate(
        HeraldedResult(shifted, sp.herald_probability, 1, cut), eff, source, cut, cfg.resolution
    )
    final = cfg.detector_efficiency("final")
    pj = sum(
        b.weight * detection.reported_count_distribution(b.state, (0,), final, cfg.resolution).get((0,), 0.0) for b in h.ensemble
    )
    return pj, pj / h.herald_probability


@pytest.mark.parametrize(
    "cfg",
    [
        ExperimentConfig(resource_policy="exact", efficiency=0.8),
        ExperimentConfig(resource_policy="exact", efficiency=0.7, lossy_output_detector=True),
        ExperimentConfig(resource_policy="exact", efficiency=0.9, resolution=1),
        ExperimentConfig(efficiency=1.0, cutoff=4),
        ExperimentConfig(efficiency=0.9, cutoff=4),
    ],
    ids=["exact-0.8", "exact-lossy-output", "exact-binary", "producer-ideal", "producer-0.9"],
)
def test_fringe_model_matches_brute_force(cfg):
    for phi in (1.1,):
        want = brute_force(phi, cfg)
        got = experiment.run_test_circuit(phi, cfg)
        assert got[0] == pytest.approx(want[0], rel=1e-9)
        assert got[1] == pytest.approx(want[1], rel=1e-9)


def test_ideal_fringe():
    res = experiment.run_phase_sweep(ExperimentConfig(resource_policy="exact"), write=False)
    assert np.allclose(res.p_normalized, np.cos(res.phases / 2) ** 2, atol=1e-12)
    assert res.p_joint[0] == pytest.approx(1 / 54)
    assert res.visibility == pytest.approx(1, abs=1e-12)


def test_visibility_drops_with_loss():
    vs = [
        experiment.run_phase_sweep(ExperimentConfig(efficiency=e, phase_points=16), write=False).visibility
        for e in (1.0, 0.9, 0.8)
    ]
    assert vs[0] > vs[1] > vs[2]


def test_lossy_output_detector_lowers_visibility():
    base = ExperimentConfig(resource_policy="exact", efficiency=0.9, phase_points=16)
    v_ideal = experiment.run_phase_sweep(base, write=False).visibility
    v_lossy = experiment.run_phase_sweep(base.replace(lossy_output_detector=True), write=False).visibility
    assert v_lossy < v_ideal


@pytest.mark.parametrize("policy", ["exact", "producer"])
@given(phi=phases)
def test_fringe_periodic_and_symmetric(policy, phi):
    cfg = ExperimentConfig(resource_policy=policy, efficiency=0.85)
    p = experiment.run_test_circuit
    assert p(phi + 2 * math.pi, cfg)[0] == pytest.approx(p(phi, cfg)[0], rel=1e-9)
    assert p(-phi, cfg)[0] == pytest.approx(p(phi, cfg)[0], rel=1e-9)


@given(phi=phases, eff=st.sampled_from([1.0, 0.9, 0.75]))
def test_joint_below_conditional(phi, eff):
    pj, pn = experiment.run_test_circuit(phi, ExperimentConfig(efficiency=eff))
    assert 0 <= pj <= pn <= 1 + 1e-12


def test_truncation_insensitive():
    for eff in (0.8,):
        a = experiment.run_phase_sweep(ExperimentConfig(efficiency=eff, cutoff=6, phase_points=8), write=False)
        b = experiment.run_phase_sweep(ExperimentConfig(efficiency=eff, cutoff=8, phase_points=8), write=False)
        assert np.abs(a.p_joint - b.p_joint).max() < 1e-9
        assert abs(a.visibility - b.visibility) < 1e-9


def test_visibility_helper():
    assert experiment.visibility([1, 0, 0.5]) == 1
    assert experiment.visibility([0.75, 0.25]) == pytest.approx(0.5)
    with pytest.raises(ValueError):
        experiment.visibility([1])
    with pytest.raises(ValueError):
        experiment.visibility([0, 0])


@pytest.mark.parametrize(
    "kwargs",
    [
        {"efficiency": 1.5},
        {"efficiency": -0.1},
        {"phase_points": 1},
        {"resource_policy": "magic"},
        {"cutoff": 3},
        {"phase_range": (1.0, 0.0)},
        {"detector_efficiencies": {"nope": 0.5}},
        {"detector_efficiencies": {"cs": 2.0}},
        {"resolution": 0},
    ],
)
def test_config_validation(kwargs):
    with pytest.raises(ConfigError):
        ExperimentConfig(**kwargs)


def test_detector_roles():
    cfg = ExperimentConfig(efficiency=0.9, detector_efficiencies={"cs": 0.5})
    assert cfg.detector_efficiency("cs") == 0.5
    assert cfg.detector_efficiency("sp") == 0.9
    assert cfg.detector_efficiency("final") == 1.0
    assert cfg.replace(lossy_output_detector=True).detector_efficiency("final") == 0.9


def test_phase_grid_excludes_endpoint():
    grid = ExperimentConfig(phase_points=4).phases()
    assert np.allclose(grid, [0, math.pi / 2, math.pi, 3 * math.pi / 2])


def test_config_json_roundtrip(tmp_path):
    cfg = ExperimentConfig(efficiency=0.9, detector_efficiencies={"cs": 0.8}, resolution=2)
    path = tmp_path / "cfg.json"
    path.write_text(json.dumps(cfg.to_dict()))
    assert ExperimentConfig.from_file(path) == cfg


def test_config_file_errors(tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text('{"efficency": 0.9}')
    with pytest.raises(ConfigError):
        ExperimentConfig.from_file(bad)
    bad.write_text("not json")
    with pytest.raises(ConfigError):
        ExperimentConfig.from_file(bad)
    with pytest.raises(ConfigError):
        ExperimentConfig.from_file(tmp_path / "missing.json")


def test_sweep_files(tmp_path):
    out = tmp_path / "f.csv"
    cfg = ExperimentConfig(resource_policy="exact", efficiency=0.9, phase_points=8, output_path=str(out))
    res = experiment.run_phase_sweep(cfg)
    raw = out.read_bytes()
    assert raw.startswith(b"phi,p_joint,p_normalized\n")
    assert b"\r" not in raw
    rows = experiment.read_sweep(out)
    assert rows == list(res.samples)  # full precision round trip
    meta = dict(
        line.split(" = ", 1) for line in experiment.metadata_path(out).read_text().splitlines()
    )
    assert json.loads(meta["efficiency"]) == 0.9
    assert float(meta["visibility"]) == res.visibility
    assert set(ExperimentConfig.__dataclass_fields__) <= set(meta)


def test_unwritable_output(tmp_path):
    cfg = ExperimentConfig(resource_policy="exact", phase_points=2, output_path=str(tmp_path / "no" / "f.csv"))
    with pytest.raises(OSError):
        experiment.run_phase_sweep(cfg)
