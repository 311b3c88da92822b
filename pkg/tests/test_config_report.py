import json
import math

import pytest
from scipy.constants import k as k_B

from trapcoherence.config import config_hash, load_config, parse_config
from trapcoherence.errors import ConfigError
from trapcoherence.report import ResultRecord, read_csv, read_json, write_csv, write_json

BASE = {
    "atom": {"mass_kg": 2.20694650e-25, "eta": 2.8e-4},
    "trap": {
        "kind": "power_law",
        "l": 1,
        "v_c_J": 4.556e-27,
        "sizes_m": [2.0e-6, 2.0e-6, 29.0e-6],
    },
    "noise": {
        "intensity": {"kind": "white", "level_per_Hz": 1e-12},
        "pointing": {"kind": "white", "level_m2_per_Hz": 1e-26},
    },
    "compute": {"n_basis": 40, "guard_band": 8, "tol": 1e-8},
    "des": {"rel_power_var": 1e-4, "v0_at_atom_J": 0.0, "temperature_K": 5.8e-6},
}


def deep(overrides=None, drop=None):
    tree = json.loads(json.dumps(BASE))
    for path, value in (overrides or {}).items():
        node = tree
        keys = path.split(".")
        for key in keys[:-1]:
            node = node.setdefault(key, {})
        node[keys[-1]] = value
    if drop:
        node = tree
        keys = drop.split(".")
        for key in keys[:-1]:
            node = node[key]
        del node[keys[-1]]
    return tree


class TestValidation:
    def test_valid_config_parses(self):
        cfg = parse_config(deep())
        assert cfg.l == 1
        assert len(cfg.axes) == 3
        assert cfg.intensity_noise.level == 1e-12

    def test_missing_mass_names_key(self):
        with pytest.raises(ConfigError, match="mass_kg"):
            parse_config(deep(drop="atom.mass_kg"))

    def test_unknown_key_rejected(self):
        with pytest.raises(ConfigError, match="atom.color"):
            parse_config(deep({"atom.color": "blue"}))

    def test_unknown_trap_key_rejected(self):
        with pytest.raises(ConfigError, match="trap.frequency"):
            parse_config(deep({"trap.frequency": 1.0}))

    def test_wrong_type_rejected(self):
        with pytest.raises(ConfigError, match="expected a number"):
            parse_config(deep({"atom.mass_kg": "heavy"}))

    def test_kb_mk_energy_alternative(self):
        tree = deep(drop="trap.v_c_J")
        tree["trap"]["v_c_kB_mK"] = 0.33
        cfg = parse_config(tree)
        assert cfg.axes[0].trap.v_c == pytest.approx(k_B * 0.33e-3, rel=1e-12)

    def test_both_energy_keys_rejected(self):
        tree = deep({"trap.v_c_kB_mK": 0.33})
        with pytest.raises(ConfigError, match="exactly one"):
            parse_config(tree)

    def test_basis_floor_scales_with_order(self):
        tree = deep({"trap.l": 3, "compute.n_basis": 6, "compute.guard_band": 8})
        with pytest.raises(ConfigError, match="n_basis"):
            parse_config(tree)

    def test_bbt_theta_in_degrees(self):
        tree = deep()
        tree["trap"] = {
            "kind": "bbt",
            "oam": 2,
            "waist_m": 4.05e-6,
            "power_W": 0.02,
            "wavelength_m": 780e-9,
            "theta_deg": 4.0,
            "alpha_eff_J_m2_per_W": 1e-36,
        }
        cfg = parse_config(tree)
        assert cfg.l == 2
        assert cfg.canonical["trap"]["theta_rad"] == pytest.approx(
            math.radians(4.0), rel=1e-14
        )

    def test_rin_normalizes_to_white(self):
        tree = deep({"noise.intensity": {"kind": "rin", "rin_dB_per_Hz": -120.0}})
        cfg = parse_config(tree)
        assert cfg.canonical["noise"]["intensity"]["kind"] == "white"
        assert cfg.intensity_noise.level == pytest.approx(1e-12, rel=1e-12)

    def test_tabulated_path_relative_to_config(self, data_dir):
        tree = deep(
            {"noise.intensity": {"kind": "tabulated", "csv_path": "psd_sample.csv"}}
        )
        cfg = parse_config(tree, base_dir=str(data_dir))
        assert cfg.intensity_noise.kind == "tabulated"

    def test_sample_configs_load(self, config_dir):
        for name in ("cs_lg01_bbt.yaml", "cs_lg02_bbt.yaml", "cs_lg01_powerlaw.yaml"):
            cfg = load_config(config_dir / name)
            assert cfg.mass_kg > 0


class TestConfigHash:
    def test_stable_under_formatting(self):
        assert config_hash(parse_config(deep())) == config_hash(parse_config(deep()))

    def test_deg_rad_equivalence(self):
        bbt = {
            "kind": "bbt", "oam": 1, "waist_m": 4.09e-6, "power_W": 0.02,
            "wavelength_m": 780e-9, "alpha_eff_J_m2_per_W": 1e-36,
        }
        t_deg = deep()
        t_deg["trap"] = dict(bbt, theta_deg=4.0)
        t_rad = deep()
        t_rad["trap"] = dict(bbt, theta_rad=math.radians(4.0))
        assert config_hash(parse_config(t_deg)) == config_hash(parse_config(t_rad))

    def test_changes_with_semantics(self):
        base = config_hash(parse_config(deep()))
        changed = config_hash(parse_config(deep({"atom.eta": 2.9e-4})))
        assert base != changed


class TestResultRecord:
    def test_json_round_trip_lossless(self, tmp_path):
        record = ResultRecord.create(
            inputs={"x": 0.1 + 0.2},
            data={"value": math.pi, "list": [1.0 / 3.0, 2.0 / 3.0]},
            config_hash="abc",
        )
        path = tmp_path / "r.json"
        write_json(record, path)
        back = read_json(path)
        assert back.data["value"] == record.data["value"]
        assert back.data["list"] == record.data["list"]
        assert back.inputs == record.inputs
        assert back.provenance["config_hash"] == "abc"

    def test_csv_round_trip_lossless(self, tmp_path):
        rows = [[0, math.sqrt(2), True], [1, 1.0 / 7.0, False]]
        record = ResultRecord.create(
            inputs={"a": 1},
            data={"scalar": math.e, "table": {"columns": ["k", "v", "flag"], "rows": rows}},
            config_hash="h",
        )
        path = tmp_path / "r.csv"
        write_csv(record, path)
        back = read_csv(path)
        assert back.data["scalar"] == math.e
        assert back.data["table"]["columns"] == ["k", "v", "flag"]
        assert back.data["table"]["rows"][0][1] == math.sqrt(2)
        assert back.data["table"]["rows"][1][1] == 1.0 / 7.0

    def test_deterministic_data_rows(self, tmp_path):
        def emit(path):
            record = ResultRecord.create(
                inputs={"a": 1},
                data={"table": {"columns": ["v"], "rows": [[1.0 / 3.0]]}},
                config_hash="h",
            )
            write_csv(record, path)
            return [
                line for line in path.read_text().splitlines()
                if not line.startswith("#")
            ]

        assert emit(tmp_path / "a.csv") == emit(tmp_path / "b.csv")
