from pathlib import Path

from settings import load_settings


def test_load_settings_from_env(monkeypatch):
    monkeypatch.setenv("DYAD_ROOT_DIR", "/tmp/dyad_root")
    monkeypatch.setenv("DYAD_CONFIG_DIR", "/tmp/dyad_root/cfg")
    monkeypatch.setenv("DYAD_DATA_DIR", "/tmp/dyad_root/data")
    monkeypatch.setenv("DYAD_LOG_LEVEL", "DEBUG")
    monkeypatch.setenv("DYAD_SEED", "11")
    monkeypatch.setenv("DYAD_JOBS", "4")

    s = load_settings()
    assert s.root_dir == Path("/tmp/dyad_root")
    assert s.config_dir == Path("/tmp/dyad_root/cfg")
    assert s.data_dir == Path("/tmp/dyad_root/data")
    assert s.log_level == "DEBUG"
    assert s.seed_override == 11
    assert s.jobs == 4


def test_seed_and_jobs_default(monkeypatch, tmp_path):
    monkeypatch.delenv("DYAD_SEED", raising=False)
    monkeypatch.delenv("DYAD_JOBS", raising=False)
    monkeypatch.setenv("DYAD_DOTENV_PATH", str(tmp_path / "missing.env"))
    s = load_settings()
    assert s.seed_override is None
    assert s.jobs == 1


def test_blank_seed_is_no_override(monkeypatch, tmp_path):
    monkeypatch.setenv("DYAD_DOTENV_PATH", str(tmp_path / "missing.env"))
    monkeypatch.setenv("DYAD_SEED", "  ")
    assert load_settings().seed_override is None


def test_config_dir_follows_root(monkeypatch, tmp_path):
    monkeypatch.setenv("DYAD_DOTENV_PATH", str(tmp_path / "missing.env"))
    monkeypatch.setenv("DYAD_ROOT_DIR", str(tmp_path))
    monkeypatch.delenv("DYAD_CONFIG_DIR", raising=False)
    s = load_settings()
    assert s.config_dir == tmp_path / "config"


def test_load_settings_reads_dotenv(monkeypatch, tmp_path):
    monkeypatch.delenv("DYAD_LOG_LEVEL", raising=False)
    monkeypatch.delenv("DYAD_DOTENV_PATH", raising=False)

    env_file = tmp_path / ".env"
    env_file.write_text(
        "DYAD_LOG_LEVEL=WARNING\n",
        encoding="utf-8",
    )
    monkeypatch.chdir(tmp_path)

    s = load_settings()
    assert s.log_level == "WARNING"
