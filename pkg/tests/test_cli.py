import json
from pathlib import Path

import pytest

from vgsmile import cli
from vgsmile.exceptions import BoundViolationError, ConvergenceError, DomainError
from vgsmile.handlers.base import BaseHandler


def run_json(capsys: pytest.CaptureFixture[str], *argv: str) -> dict:
    assert cli.main([*argv, "--format", "json"]) == cli.EXIT_OK
    return json.loads(capsys.readouterr().out)


class TestCommands:
    def test_registered_commands(self) -> None:
        assert set(cli.cli.get_commands()) >= {
            "price",
            "smile",
            "density",
            "classify",
            "convergence",
            "figures",
            "boundary",
        }

    def test_price_at_the_money(self, capsys: pytest.CaptureFixture[str]) -> None:
        table = run_json(capsys, "price", "--strikes", "1.0", "0.95")
        assert table["columns"] == ["K", "call", "put"]
        strike, call, put = table["rows"][0]
        assert strike == 1.0
        assert call - put == 0.0
        assert table["metadata"]["tool"] == "vgsmile"
        assert table["metadata"]["v"] == 0.02

    def test_density_vanishes_at_zero_for_double_gamma(
        self, capsys: pytest.CaptureFixture[str]
    ) -> None:
        table = run_json(capsys, "density", "--v", "0", "--x-points", "5")
        rows = {row[0]: row for row in table["rows"]}
        assert rows[0.0][1] == 0.0
        assert rows[0.0][2] == 0.0

    def test_convergence(self, capsys: pytest.CaptureFixture[str]) -> None:
        table = run_json(capsys, "convergence", "--v-list", "0.02", "0.01", "--x-points", "41")
        distances = [row[1] for row in table["rows"]]
        assert distances[0] > distances[1] > 0

    def test_smile_csv(self, capsys: pytest.CaptureFixture[str]) -> None:
        assert cli.main(["smile", "--grid-points", "51", "--annualize", "--T", "4"]) == 0
        lines = capsys.readouterr().out.splitlines()
        header = [line for line in lines if line.startswith("#")]
        body = [line for line in lines if not line.startswith("#")]
        assert any(line.startswith("# version=") for line in header)
        assert body[0] == "K,sigma,sigma_annual"
        assert len(body) == 52

    def test_rerun_is_byte_identical(self, tmp_path: Path) -> None:
        outputs = []
        for name in ("first.csv", "second.csv"):
            path = tmp_path / name
            assert cli.main(["price", "--strikes", "0.9", "1.0", "1.1", "--out", str(path)]) == 0
            outputs.append(path.read_bytes())
        assert outputs[0] == outputs[1]

    def test_config_file(self, tmp_path: Path, capsys: pytest.CaptureFixture[str]) -> None:
        path = tmp_path / "run.toml"
        path.write_text("v = 0.01\nmu = 0.03\n")
        table = run_json(capsys, "price", "--strikes", "1.0", "--config", str(path), "--v", "0.015")
        assert table["metadata"]["v"] == 0.015
        assert table["metadata"]["mu"] == 0.03


class TestExitCodes:
    def test_validation_error(self, capsys: pytest.CaptureFixture[str]) -> None:
        assert cli.main(["price", "--mu", "1.5"]) == cli.EXIT_VALIDATION
        record = json.loads(capsys.readouterr().err.strip().splitlines()[-1])
        assert record["success"] is False
        assert record["code"] == "VALIDATION_ERROR"
        assert "mu < 2*lambda" in record["message"]

    def test_numerical_error(self, capsys: pytest.CaptureFixture[str], mocker) -> None:
        mocker.patch(
            "vgsmile.core.pricing.price_curve",
            side_effect=ConvergenceError("quadrature stalled", operation="mixture_tail"),
        )
        assert cli.main(["price", "--strikes", "1.0"]) == cli.EXIT_NUMERICAL
        record = json.loads(capsys.readouterr().err.strip().splitlines()[-1])
        assert record["code"] == "CONVERGENCE_ERROR"
        assert record["operation"] == "mixture_tail"

    def test_bound_violation_record(self, capsys: pytest.CaptureFixture[str], mocker) -> None:
        mocker.patch(
            "vgsmile.core.pricing.price_curve",
            side_effect=BoundViolationError("call price above spot", bound="upper"),
        )
        assert cli.main(["price", "--strikes", "1.0"]) == cli.EXIT_VALIDATION
        record = json.loads(capsys.readouterr().err.strip().splitlines()[-1])
        assert record["code"] == "BOUND_VIOLATION"
        assert record["bound"] == "upper"
        assert record["boundary"] is None

    def test_domain_error_record_carries_boundary(self) -> None:
        record = BaseHandler().format_error_response(
            DomainError("m(u) is infinite", boundary=21.2125), operation="mgf"
        )
        assert record.boundary == 21.2125
        assert record.operation == "mgf"
        assert record.bound is None

    def test_unknown_command(self) -> None:
        with pytest.raises(SystemExit) as exc_info:
            cli.main(["plot"])
        assert exc_info.value.code == 2


@pytest.mark.slow
def test_figures_classify_each_v(tmp_path: Path) -> None:
    assert cli.main(["figures", "--out", str(tmp_path), "--format", "json"]) == 0
    names = sorted(path.name for path in tmp_path.iterdir())
    assert names == ["fig1_densities.json", "fig2_double_gamma.json", "fig3_smiles.json"]

    smiles = json.loads((tmp_path / "fig3_smiles.json").read_text())
    assert smiles["metadata"]["classification"] == {
        "0.0": "W",
        "0.01": "W",
        "0.015": "W",
        "0.02": "NOT_W",
    }

    crossings = json.loads((tmp_path / "fig2_double_gamma.json").read_text())
    assert crossings["metadata"]["n_pdf"] == 6
