"""Every CLI report validates against the schema shipped in docs/."""

import json
from pathlib import Path

import numpy as np
import pytest

jsonschema = pytest.importorskip("jsonschema")

from unml import genlog_sample
from unml.cli import main

SCHEMA = json.loads(
    (Path(__file__).resolve().parent.parent / "docs" / "report_schema.json")
    .read_text())


@pytest.fixture(scope="module")
def validator():
    return jsonschema.Draft7Validator(SCHEMA)


def _blobs_csv(path):
    rng = np.random.default_rng(8)
    x = np.concatenate([rng.normal(0, 1, 40), rng.normal(9, 1, 40)])
    np.savetxt(path, x.reshape(-1, 1), delimiter=",", fmt="%.17g")


def test_select_report(tmp_path, capsys, validator):
    csv = tmp_path / "b.csv"
    _blobs_csv(csv)
    out = tmp_path / "r.json"
    assert main(["select", str(csv), "--k-max", "3", "--restarts", "2",
                 "--output", str(out)]) == 0
    capsys.readouterr()
    validator.validate(json.loads(out.read_text()))


def test_genlog_report(tmp_path, capsys, validator):
    csv = tmp_path / "g.csv"
    np.savetxt(csv, genlog_sample(30, 1.0, seed=2).reshape(-1, 1), delimiter=",")
    out = tmp_path / "r.json"
    assert main(["genlog", str(csv), "--output", str(out)]) == 0
    capsys.readouterr()
    validator.validate(json.loads(out.read_text()))


def test_verify_report(tmp_path, capsys, validator):
    out = tmp_path / "r.json"
    assert main(["verify", "--m", "1", "--n", "3", "--samples", "20000",
                 "--output", str(out)]) == 0
    capsys.readouterr()
    validator.validate(json.loads(out.read_text()))


def test_scale_report(tmp_path, capsys, validator):
    csv = tmp_path / "b.csv"
    _blobs_csv(csv)
    out = tmp_path / "r.json"
    assert main(["scale", str(csv), "--scaled-output", str(tmp_path / "s.csv"),
                 "--output", str(out)]) == 0
    capsys.readouterr()
    validator.validate(json.loads(out.read_text()))
