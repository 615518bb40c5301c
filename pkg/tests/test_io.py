import numpy as np
import pytest

from skestim import ConfigError, ObservationGrid, Trajectory
from skestim import io


def test_trajectory_round_trip_exact(tmp_path):
    grid = ObservationGrid([0.0, 0.1, 0.30000000000000004, 1.7])
    rng = np.random.default_rng(0)
    traj = Trajectory(grid=grid, positions=rng.standard_normal(4) * 1e3,
                      velocities=rng.standard_normal(4) * 1e-7)
    path = str(tmp_path / "traj.csv")
    io.write_trajectory_csv(path, traj)
    back = io.read_trajectory_csv(path)
    assert np.array_equal(back.times, traj.times)
    assert np.array_equal(back.positions, traj.positions)
    assert np.array_equal(back.velocities, traj.velocities)


def test_trajectory_without_velocities(tmp_path):
    grid = ObservationGrid([0.0, 1.0])
    traj = Trajectory(grid=grid, positions=np.array([0.0, 2.0]))
    path = str(tmp_path / "traj.csv")
    io.write_trajectory_csv(path, traj)
    back = io.read_trajectory_csv(path)
    assert back.velocities is None


def test_bad_header_rejected(tmp_path):
    path = tmp_path / "bad.csv"
    path.write_text("time,pos\n0,1\n")
    with pytest.raises(ConfigError, match="header"):
        io.read_trajectory_csv(str(path))


def test_no_temp_files_left_behind(tmp_path):
    grid = ObservationGrid([0.0, 1.0])
    traj = Trajectory(grid=grid, positions=np.array([0.0, 2.0]))
    io.write_trajectory_csv(str(tmp_path / "a.csv"), traj)
    assert [p.name for p in tmp_path.iterdir()] == ["a.csv"]


class TestConfigParser:

    def test_parses_flat_keys(self, tmp_path):
        cfg = tmp_path / "c.cfg"
        cfg.write_text("# sweep\nmodel = ou\nmu_values = 0.1, 0.01\nn_values=20\n")
        raw = io.parse_config_file(str(cfg))
        assert raw == {"model": "ou", "mu_values": "0.1, 0.01", "n_values": "20"}

    def test_names_bad_line(self, tmp_path):
        cfg = tmp_path / "c.cfg"
        cfg.write_text("model = ou\nthis is not a pair\n")
        with pytest.raises(ConfigError, match=":2"):
            io.parse_config_file(str(cfg))

    def test_typed_lookup_names_key(self):
        with pytest.raises(ConfigError, match="theta_true"):
            io.config_get({"theta_true": "abc"}, "theta_true", float)
        with pytest.raises(ConfigError, match="delta"):
            io.config_get({}, "delta", float)

    def test_list_parsers(self):
        assert io.parse_float_list("0.1, 0.01,1e-3") == [0.1, 0.01, 1e-3]
        assert io.parse_int_list("100,1000") == [100, 1000]
        with pytest.raises(ValueError):
            io.parse_float_list("")
