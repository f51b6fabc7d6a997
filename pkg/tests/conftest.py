import sys
from pathlib import Path

import pytest

ROOT = Path(__file__).resolve().parents[1]
SRC = ROOT / "src"
TESTS = ROOT / "tests"
if str(SRC) not in sys.path:
    sys.path.insert(0, str(SRC))
# Shared builders live under tests/fixtures.
if str(TESTS) not in sys.path:
    sys.path.append(str(TESTS))

# Small, fast study: 3 couples over 2 weekdays, balanced latent emotion, full compliance.
SMALL_CONFIG_YAML = """\
n_couples: 3
days: 2
seed: 11
compliance: 1.0
session_duration_s: 60
audio_sample_rate: 8000
imu_rate_hz: 10
schedule_jitter_hours: 0
behaviour_valence_center: 50
behaviour_arousal_center: 50
behaviour_center_spread: 5
behaviour_together_prob: 0.8
behaviour_talk_prob: 0.7
fault_corrupt_audio_rate: 0.0
fault_outside_window_rate: 0.0
fault_non_worn_rate: 0.0
folds: 2
models: linear_svm,random_forest
grid_svm_c: 0.1,1
grid_rf_n_trees: 5
grid_rf_max_depth: 4
svm_epochs: 30
linguistic: hash:32
"""


@pytest.fixture
def small_config_path(tmp_path):
    path = tmp_path / "small.yml"
    path.write_text(SMALL_CONFIG_YAML, encoding="utf-8")
    return path


@pytest.fixture(scope="session")
def small_world(tmp_path_factory):
    """A simulated corpus shared by the repository, pipeline and QA tests; treat as read-only."""
    from infrastructure.config_loader import build_config, read_flat_yaml
    from simulation.world import generate_world

    loaded = build_config(read_flat_yaml(SMALL_CONFIG_YAML))
    root = tmp_path_factory.mktemp("world")
    summary = generate_world(loaded.sim, root)
    return loaded, summary
