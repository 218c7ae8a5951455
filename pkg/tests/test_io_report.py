import json

import jsonschema
import numpy as np
import pytest

from opineq import harness
from opineq.errors import DomainError, ShapeError
from opineq.matrix_io import dumps_matrix, loads_matrix, matrix_from_json
from opineq.report import CSV_FIELDS, WitnessCertificate, report_csv_row, report_schema
from opineq.rng import random_complex
from opineq.tolerance import DEFAULT_TOL, ToleranceConfig


def test_matrix_round_trip_exact(g):
    X = random_complex(4, g, 3)
    assert np.array_equal(loads_matrix(dumps_matrix(X)), X)


def test_matrix_json_rejects_bad_payloads():
    with pytest.raises(ShapeError):
        matrix_from_json({"rows": 2, "cols": 2, "data": [[1, 0]]})
    with pytest.raises(ShapeError):
        matrix_from_json({"rows": 2})
    with pytest.raises(DomainError):
        loads_matrix('{"rows": 1, "cols": 1, "data": [[NaN, 0]]}')
    with pytest.raises(DomainError):
        matrix_from_json({"rows": 1, "cols": 1, "data": [[float("inf"), 0]]})


def test_real_entries_accepted():
    assert np.array_equal(matrix_from_json({"rows": 1, "cols": 2, "data": [1, 2.5]}), [[1, 2.5]])


def test_tolerance_config_validation():
    assert DEFAULT_TOL.as_dict() == {"tau_psd": 1e-8, "tau_eig": 1e-13, "tau_id": 1e-10}
    assert DEFAULT_TOL.with_overrides(tau_psd=1e-6).tau_psd == 1e-6
    for bad in (0.0, -1.0, 1e-2):
        with pytest.raises(ValueError):
            ToleranceConfig(tau_psd=bad)


def test_witness_kind_residuals():
    w = WitnessCertificate("unitary", (np.eye(2),), 0.0)
    assert w.kind_ok()
    w = WitnessCertificate("partial_isometry", (np.array([[0, 1], [0, 0]]),), 0.0)
    assert w.kind_ok()
    w = WitnessCertificate("contraction", (2 * np.eye(2),), 0.0)
    assert not w.kind_ok() and w.invariant_residual == pytest.approx(1.0)
    with pytest.raises(ValueError):
        WitnessCertificate("magic", (np.eye(2),), 0.0)


@pytest.mark.parametrize("case_id", sorted(harness.CASES))
def test_every_case_record_matches_schema(case_id):
    schema = report_schema()
    records = harness.run(harness.RunConfig(seed=3, dims=(3,), trials=2, cases=(case_id,)))
    for rec in records:
        jsonschema.validate(rec, schema)
        assert len(report_csv_row(rec)) == len(CSV_FIELDS)
        json.dumps(rec, allow_nan=False)


def test_digest_replays_instance():
    rec = harness.run(harness.RunConfig(seed=11, dims=(4,), trials=3, cases=("P1.3",), timestamp=False))[2]
    d = rec["digest"]
    again = harness.run_trial(d["case"], d["seed"], d["dim"], d["trial"]).to_dict()
    assert again == rec
    assert set(d["exponents"]) == {"p", "q", "r"} and "map_hash" in d
