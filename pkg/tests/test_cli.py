import json
import socket

import pytest

from wgl import fixtures
from wgl.cli import main
from wgl.config import ConfigError, ServerConfig, load_config
from wgl.localization import CatalogSet, pick_locale
from wgl.repository import RepositoryStore


@pytest.fixture
def incenter_file(tmp_path):
    path = tmp_path / "incenter.wgl"
    path.write_text(fixtures.INCENTER, encoding="utf-8")
    return path


class TestInit:
    def test_seeds_admin(self, tmp_path, capsys):
        data = tmp_path / "data"
        code = main(
            ["init", "--data-dir", str(data), "--admin-login", "boss", "--admin-password", "pw"]
        )
        assert code == 0
        assert "seeded administrator" in capsys.readouterr().out
        store = RepositoryStore(data)
        assert store.authenticate("boss", "pw").user_id

    def test_duplicate_admin_rejected(self, tmp_path):
        data = tmp_path / "data"
        args = ["init", "--data-dir", str(data), "--admin-login", "boss", "--admin-password", "pw"]
        assert main(args) == 0
        assert main(args) == 1

    def test_env_var_default(self, tmp_path, monkeypatch):
        monkeypatch.setenv("WGL_DATA_DIR", str(tmp_path / "envdata"))
        assert main(["init", "--admin-login", "boss", "--admin-password", "pw"]) == 0
        assert (tmp_path / "envdata" / "users.json").exists()


class TestValidateCommand:
    def test_incenter_json(self, incenter_file, capsys):
        code = main(["validate", str(incenter_file), "--samples", "200", "--seed", "42"])
        assert code == 0
        payload = json.loads(capsys.readouterr().out)
        assert payload["verdict"] == "GenericallySound"
        assert payload["seed"] == 42
        assert payload["explanation"].startswith("construction succeeded")

    def test_degenerate_fixture_still_reports(self, tmp_path, capsys):
        path = tmp_path / "trap.wgl"
        path.write_text(fixtures.PARALLEL_TRAP, encoding="utf-8")
        assert main(["validate", str(path), "--samples", "100", "--seed", "42"]) == 0
        payload = json.loads(capsys.readouterr().out)
        assert payload["verdict"] == "AlwaysDegenerate"
        assert payload["failure_rate"] == 1.0

    def test_unparseable_file_exit_1(self, tmp_path, capsys):
        path = tmp_path / "bad.wgl"
        path.write_text("nope\n", encoding="utf-8")
        with pytest.raises(SystemExit) as exc:
            main(["validate", str(path)])
        assert exc.value.code == 1
        assert "BadHeader" in capsys.readouterr().err

    def test_missing_file_exit_1(self, tmp_path):
        with pytest.raises(SystemExit) as exc:
            main(["validate", str(tmp_path / "absent.wgl")])
        assert exc.value.code == 1

    def test_usage_error_exit_2(self):
        with pytest.raises(SystemExit) as exc:
            main(["validate"])  # missing file argument
        assert exc.value.code == 2


class TestRenderCommand:
    def test_incenter_svg_counts(self, incenter_file, tmp_path):
        out = tmp_path / "incenter.svg"
        assert main(["render", str(incenter_file), "-o", str(out)]) == 0
        svg = out.read_text()
        assert svg.count("<line ") == 6  # three sides, three bisectors
        assert svg.count("<circle ") == 1  # the incircle only
        assert svg.count("<text ") == 5  # A B C I F labels

    def test_degenerate_construction_exit_1(self, tmp_path, capsys):
        path = tmp_path / "trap.wgl"
        path.write_text(fixtures.PARALLEL_TRAP, encoding="utf-8")
        code = main(["render", str(path), "-o", str(tmp_path / "out.svg")])
        assert code == 1
        assert "degenerate" in capsys.readouterr().err


class TestServeStartup:
    def test_port_in_use_exit_1(self, tmp_path, capsys):
        blocker = socket.socket(socket.AF_INET, socket.SOCK_STREAM)
        blocker.bind(("127.0.0.1", 0))
        blocker.listen(1)
        port = blocker.getsockname()[1]
        try:
            code = main(
                ["serve", "--port", str(port), "--data-dir", str(tmp_path / "d")]
            )
        finally:
            blocker.close()
        assert code == 1
        assert "cannot listen" in capsys.readouterr().err

    def test_bad_config_value_exit_1(self, tmp_path, capsys):
        cfg = tmp_path / "wgl.toml"
        cfg.write_text("port = notanumber\n", encoding="utf-8")
        code = main(["serve", "--config", str(cfg), "--data-dir", str(tmp_path / "d")])
        assert code == 1
        assert "bad configuration" in capsys.readouterr().err


class TestConfigFile:
    def test_key_value_parsing(self, tmp_path):
        cfg = tmp_path / "wgl.toml"
        cfg.write_text(
            "# laboratory config\n"
            "port = 9100\n"
            'data_dir = "/tmp/lab-data"\n'
            "default_locale = pt\n"
            "token_ttl = 3600\n",
            encoding="utf-8",
        )
        config = load_config(config_file=cfg)
        assert config.port == 9100
        assert str(config.data_dir) == "/tmp/lab-data"
        assert config.default_locale == "pt"
        assert config.token_ttl == 3600.0

    def test_flag_beats_config(self, tmp_path):
        cfg = tmp_path / "wgl.toml"
        cfg.write_text("port = 9100\n", encoding="utf-8")
        config = load_config(config_file=cfg, overrides={"port": 9200})
        assert config.port == 9200

    def test_unknown_key_rejected(self, tmp_path):
        cfg = tmp_path / "wgl.toml"
        cfg.write_text("warp_speed = 11\n", encoding="utf-8")
        with pytest.raises(ConfigError):
            load_config(config_file=cfg)

    def test_port_range_validated(self):
        with pytest.raises(ConfigError):
            ServerConfig(port=0).validated()


class TestLocalizationUnit:
    def test_fallback_chain(self):
        catalogs = CatalogSet("en")
        catalogs.catalogs["pt"] = {"login.title": "Entrar"}
        assert catalogs.localize("pt", "login.title") == "Entrar"
        assert catalogs.localize("pt", "error.forbidden") != ""
        assert catalogs.localize("fr", "login.title").startswith("Sign in")
        assert catalogs.localize("fr", "no.such.key") == "no.such.key"

    def test_regional_tag_falls_back_to_language(self):
        catalogs = CatalogSet("en")
        catalogs.catalogs["pt"] = {"login.title": "Entrar"}
        assert catalogs.localize("pt-BR", "login.title") == "Entrar"

    def test_pick_locale(self):
        assert pick_locale("pt-PT,pt;q=0.9,en;q=0.8") == "pt-PT"
        assert pick_locale(None) is None
        assert pick_locale("") is None

    def test_localize_total_over_catalog_keys(self):
        catalogs = CatalogSet("en")
        for key in list(catalogs.catalogs["en"]) + ["utterly.unknown"]:
            for locale in ("en", "pt", "de", None, "x-weird-tag"):
                assert catalogs.localize(locale, key)
