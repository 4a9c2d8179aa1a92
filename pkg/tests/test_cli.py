"""End-to-end tests for the command-line interface."""

from __future__ import annotations

import csv
import io
import json

import numpy as np
import pytest

from qnetfilter import apply_channel, b_lin, bit_flip, pure_theta_state
from qnetfilter.cli import main


def _write(tmp_path, cfg, name="config.json"):
    path = tmp_path / name
    path.write_text(json.dumps(cfg), encoding="utf-8")
    return str(path)


def _run(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def _rows(text):
    return list(csv.reader(io.StringIO(text)))


def _example_config():
    # Two-link chain with a partially entangled pair on each side and a
    # single intermediate filter pair.
    return {
        "links": [
            {"family": "grud", "v": 0.1, "x": 0.23},
            {"family": "grud", "v": 0.99, "x": 0.44},
        ],
        "filters": {"middle": [[0.8, 0.97]]},
    }


SETTINGS = {"m0": [0, 0, 1], "m1": [1, 0, 0], "n0": [0, 0, 1], "n1": [1, 0, 0]}


# ---------------------------------------------------------------------------
# eval
# ---------------------------------------------------------------------------


def test_eval_matches_library(tmp_path, capsys):
    from qnetfilter import build_network, evaluate

    cfg = _example_config()
    code, out, _ = _run(capsys, "eval", "--config", _write(tmp_path, cfg))
    assert code == 0
    payload = json.loads(out)
    result = evaluate(build_network(cfg))
    assert payload == {
        "b_lin": result.b_lin,
        "b_seq": result.b_seq,
        "success_prob": result.success_prob,
        "violation": result.violation,
    }


def test_eval_with_settings_reports_lhs(tmp_path, capsys):
    cfg = dict(_example_config(), settings=SETTINGS)
    code, out, _ = _run(capsys, "eval", "--config", _write(tmp_path, cfg))
    assert code == 0
    payload = json.loads(out)
    assert "lhs_at_settings" in payload
    assert payload["lhs_at_settings"] <= payload["b_seq"] + 1e-9


def test_eval_identity_filters_equal_bounds(tmp_path, capsys):
    cfg = _example_config()
    del cfg["filters"]
    _, out, _ = _run(capsys, "eval", "--config", _write(tmp_path, cfg))
    payload = json.loads(out)
    assert payload["b_seq"] == payload["b_lin"]
    assert payload["success_prob"] == 1.0


def test_eval_product_link_never_violates(tmp_path, capsys):
    cfg = {
        "links": [
            {"family": "product", "m": [0.0, 0.0, 1.0], "n": [0.0, 0.0, -1.0]},
            {"family": "werner", "p": 1.0},
        ],
        "filters": {"middle": [[0.7, 0.9]]},
    }
    _, out, _ = _run(capsys, "eval", "--config", _write(tmp_path, cfg))
    payload = json.loads(out)
    assert payload["violation"] is False
    assert payload["b_seq"] <= 1.0 + 1e-9


def test_eval_unreadable_config_is_a_config_error(tmp_path, capsys):
    code, _, err = _run(capsys, "eval", "--config", str(tmp_path / "missing.json"))
    assert code == 2
    assert "config error" in err


# ---------------------------------------------------------------------------
# scan
# ---------------------------------------------------------------------------


def test_scan_single_point_grid_matches_eval(tmp_path, capsys):
    cfg = _example_config()
    _, eval_out, _ = _run(capsys, "eval", "--config", _write(tmp_path, cfg))
    payload = json.loads(eval_out)

    cfg["scan"] = {"axes": [{"path": "links.0.v", "min": 0.1, "max": 0.1, "steps": 1}]}
    _, scan_out, _ = _run(capsys, "scan", "--config", _write(tmp_path, cfg))
    header, row = _rows(scan_out)
    assert header == ["links.0.v", "b_lin", "b_seq", "success_prob", "violation"]
    assert row == [
        "0.1",
        f"{payload['b_lin']:.12g}",
        f"{payload['b_seq']:.12g}",
        f"{payload['success_prob']:.12g}",
        "1" if payload["violation"] else "0",
    ]


def test_scan_grid_point_reproduces_eval_exactly(tmp_path, capsys):
    # A grid whose first node coincides with the config value must produce
    # the same formatted numbers as a plain eval of that config.
    cfg = _example_config()
    _, eval_out, _ = _run(capsys, "eval", "--config", _write(tmp_path, cfg))
    payload = json.loads(eval_out)

    cfg["scan"] = {"axes": [{"path": "links.0.v", "min": 0.1, "max": 0.5, "steps": 3}]}
    _, scan_out, _ = _run(capsys, "scan", "--config", _write(tmp_path, cfg))
    first = _rows(scan_out)[1]
    assert first[0] == "0.1"
    assert first[1:] == [
        f"{payload['b_lin']:.12g}",
        f"{payload['b_seq']:.12g}",
        f"{payload['success_prob']:.12g}",
        "1" if payload["violation"] else "0",
    ]


def test_scan_rows_are_row_major(tmp_path, capsys):
    cfg = _example_config()
    cfg["scan"] = {
        "axes": [
            {"path": "links.0.v", "min": 0.1, "max": 0.2, "steps": 2},
            {"path": "links.1.v", "min": 0.3, "max": 0.4, "steps": 2},
        ]
    }
    _, out, _ = _run(capsys, "scan", "--config", _write(tmp_path, cfg))
    rows = _rows(out)[1:]
    assert [row[:2] for row in rows] == [
        ["0.1", "0.3"],
        ["0.1", "0.4"],
        ["0.2", "0.3"],
        ["0.2", "0.4"],
    ]


def test_scan_output_is_deterministic_across_thread_counts(tmp_path, capsys, monkeypatch):
    cfg = _example_config()
    cfg["scan"] = {"axes": [{"path": "links.0.v", "min": 0.0, "max": 1.0, "steps": 7}]}
    path = _write(tmp_path, cfg)

    monkeypatch.setenv("NETFILTER_THREADS", "1")
    _, serial, _ = _run(capsys, "scan", "--config", path)
    _, again, _ = _run(capsys, "scan", "--config", path)
    monkeypatch.setenv("NETFILTER_THREADS", "2")
    _, threaded, _ = _run(capsys, "scan", "--config", path)
    assert serial == again == threaded


def test_scan_out_file_matches_stdout(tmp_path, capsys):
    cfg = _example_config()
    cfg["scan"] = {"axes": [{"path": "links.0.v", "min": 0.0, "max": 1.0, "steps": 3}]}
    path = _write(tmp_path, cfg)
    out_file = tmp_path / "rows.csv"

    _, stdout_text, _ = _run(capsys, "scan", "--config", path)
    code, silent, _ = _run(capsys, "scan", "--config", path, "--out", str(out_file))
    assert code == 0
    assert silent == ""
    assert out_file.read_text(encoding="utf-8") == stdout_text


def test_scan_rejects_bad_thread_count(tmp_path, capsys, monkeypatch):
    cfg = _example_config()
    cfg["scan"] = {"axes": [{"path": "links.0.v", "min": 0.0, "max": 1.0, "steps": 2}]}
    monkeypatch.setenv("NETFILTER_THREADS", "many")
    code, _, err = _run(capsys, "scan", "--config", _write(tmp_path, cfg))
    assert code == 2
    assert "NETFILTER_THREADS" in err


def test_scan_region_contains_reference_point(tmp_path, capsys):
    # A coarse scan over (x1, x2, v2) around a reported filtered-violation
    # region: the node (0.23, 0.44, 0.99) is claimed to violate with
    # post-selection success of at least 0.60.
    cfg = {
        "links": [
            {"family": "grud", "v": 0.1, "x": 0.13},
            {"family": "grud", "v": 0.79, "x": 0.34},
        ],
        "filters": {"middle": [[0.8, 0.97]]},
        "scan": {
            "axes": [
                {"path": "links.0.x", "min": 0.13, "max": 0.33, "steps": 3},
                {"path": "links.1.x", "min": 0.34, "max": 0.54, "steps": 3},
                {"path": "links.1.v", "min": 0.79, "max": 0.99, "steps": 3},
            ]
        },
    }
    code, out, _ = _run(capsys, "scan", "--config", _write(tmp_path, cfg))
    assert code == 0
    rows = _rows(out)[1:]
    target = [row for row in rows if row[:3] == ["0.23", "0.44", "0.99"]]
    assert len(target) == 1
    row = target[0]
    assert row[6] == "1" and float(row[5]) >= 0.60, (
        f"expected a violation with success >= 0.60 at (0.23, 0.44, 0.99); "
        f"got b_seq {row[4]}, success {row[5]}, violation {row[6]}"
    )


def test_scan_separable_partner_region_nonempty(tmp_path, capsys):
    # A chain pairing a tunable entangled link with a weakly mixed one
    # (p2 in [0.25, 0.30]) under a one-sided filter of strength 0.46 is
    # claimed to contain hidden violations somewhere on this grid.
    cfg = {
        "links": [
            {"family": "grud", "v": 0.0, "x": 0.1},
            {"family": "werner", "p": 0.25},
        ],
        "filters": {"middle": [[0.46, 1.0]]},
        "scan": {
            "axes": [
                {"path": "links.0.v", "min": 0.0, "max": 1.0, "steps": 6},
                {"path": "links.0.x", "min": 0.1, "max": 0.7, "steps": 6},
                {"path": "links.1.p", "min": 0.25, "max": 0.30, "steps": 6},
            ]
        },
    }
    code, out, _ = _run(capsys, "scan", "--config", _write(tmp_path, cfg))
    assert code == 0
    rows = _rows(out)[1:]
    hidden = [row for row in rows if row[6] == "1" and float(row[3]) <= 1.0]
    max_b_seq = max(float(row[4]) for row in rows)
    assert hidden, f"no hidden violation on the grid; max b_seq {max_b_seq:.6g}"


# ---------------------------------------------------------------------------
# threshold
# ---------------------------------------------------------------------------


def _bitflip_threshold_config():
    return {
        "links": [
            {"family": "pure_theta", "theta": 0.62},
            {"family": "pure_theta", "theta": 0.62},
        ],
        "channels": [
            {"link": 1, "type": "bit_flip", "param": 0.1},
            {"link": 2, "type": "bit_flip", "param": 0.15},
        ],
        "scan": {"axes": [{"path": "channels.0.param", "min": 0.0, "max": 0.4, "steps": 2}]},
    }


def test_threshold_agrees_with_dense_grid(tmp_path, capsys):
    cfg = _bitflip_threshold_config()
    code, out, _ = _run(
        capsys, "threshold", "--config", _write(tmp_path, cfg), "--axis",
        "channels.0.param", "--target", "b_lin",
    )
    assert code == 0
    payload = json.loads(out)
    assert payload["axis"] == "channels.0.param"
    assert payload["range"] == [0.0, 0.4]

    # Locate the sign change on a dense independent grid.
    partner = apply_channel(pure_theta_state(0.62), bit_flip(0.15))
    grid = np.linspace(0.0, 0.4, 10001)
    values = np.array(
        [b_lin([apply_channel(pure_theta_state(0.62), bit_flip(float(p))), partner]) - 1.0
         for p in grid]
    )
    signs = np.sign(values)
    (crossings,) = np.nonzero(signs[:-1] * signs[1:] <= 0)
    assert crossings.size >= 1
    lo, hi = grid[crossings[0]], grid[crossings[0] + 1]
    assert lo - 1e-4 <= payload["threshold"] <= hi + 1e-4


def test_threshold_without_crossing(tmp_path, capsys):
    cfg = {
        "links": [{"family": "werner", "p": 0.5}, {"family": "werner", "p": 0.5}],
        "scan": {"axes": [{"path": "links.0.p", "min": 0.0, "max": 0.6, "steps": 2}]},
    }
    code, _, err = _run(
        capsys, "threshold", "--config", _write(tmp_path, cfg), "--axis", "links.0.p",
        "--target", "b_lin",
    )
    assert code == 4
    assert "no crossing" in err


def test_threshold_axis_must_be_declared(tmp_path, capsys):
    cfg = _bitflip_threshold_config()
    code, _, err = _run(
        capsys, "threshold", "--config", _write(tmp_path, cfg), "--axis",
        "channels.1.param", "--target", "b_lin",
    )
    assert code == 2
    assert "exactly one axis" in err


def test_annihilating_filter_exits_with_code_3(tmp_path, capsys):
    cfg = {
        "links": [
            {"family": "product", "m": [0.0, 0.0, 1.0], "n": [0.0, 0.0, 1.0]},
            {"family": "product", "m": [0.0, 0.0, 1.0], "n": [0.0, 0.0, 1.0]},
        ],
        "filters": {"first": 0.0, "middle": [[1.0, 1.0]]},
    }
    code, _, err = _run(capsys, "eval", "--config", _write(tmp_path, cfg))
    assert code == 3
    assert "annihilated" in err


# ---------------------------------------------------------------------------
# optimize
# ---------------------------------------------------------------------------


def test_optimize_without_free_paths_is_an_eval(tmp_path, capsys):
    cfg = _example_config()
    path = _write(tmp_path, cfg)
    _, eval_out, _ = _run(capsys, "eval", "--config", path)
    code, out, _ = _run(capsys, "optimize", "--config", path, "--free", "")
    assert code == 0
    payload = json.loads(out)
    assert payload["free"] == [] and payload["argmax"] == {}
    assert payload["best"] == json.loads(eval_out)
    assert payload["seed"] == 0


def test_optimize_rejects_non_filter_paths(tmp_path, capsys):
    code, _, err = _run(
        capsys, "optimize", "--config", _write(tmp_path, _example_config()),
        "--free", "links.0.v",
    )
    assert code == 2
    assert "filter" in err


def test_optimize_cannot_push_product_link_past_one(tmp_path, capsys):
    cfg = {
        "links": [
            {"family": "product", "m": [0.0, 0.0, 1.0], "n": [1.0, 0.0, 0.0]},
            {"family": "werner", "p": 1.0},
        ],
        "filters": {"middle": [[0.5, 0.5]]},
    }
    code, out, _ = _run(
        capsys, "optimize", "--config", _write(tmp_path, cfg),
        "--free", "filters.middle.0.0,filters.middle.0.1", "--seed", "5",
    )
    assert code == 0
    payload = json.loads(out)
    assert payload["seed"] == 5
    assert payload["best"]["b_seq"] <= 1.0 + 1e-9


def test_optimize_recovers_reference_violation(tmp_path, capsys):
    # Freeing the intermediate filter pair of the two-link example should
    # rediscover the reported peak b_seq of about 1.081.
    cfg = _example_config()
    code, out, _ = _run(
        capsys, "optimize", "--config", _write(tmp_path, cfg),
        "--free", "filters.middle.0.0,filters.middle.0.1",
    )
    assert code == 0
    payload = json.loads(out)
    best = payload["best"]["b_seq"]
    assert best >= 1.081 - 2e-3, (
        f"optimizer reached b_seq {best:.6g}, below the reported peak 1.081"
    )


# ---------------------------------------------------------------------------
# oracle
# ---------------------------------------------------------------------------


def test_oracle_agrees_at_fixed_settings(tmp_path, capsys):
    cfg = dict(_example_config(), settings=SETTINGS)
    code, out, _ = _run(capsys, "oracle", "--config", _write(tmp_path, cfg))
    assert code == 0
    payload = json.loads(out)
    assert payload["agrees"] is True
    assert payload["abs_diff"] <= 1e-10
    assert payload["max_distribution_dev"] <= 1e-10
    assert "seed" not in payload


def test_oracle_with_random_settings_reports_seed(tmp_path, capsys):
    cfg = dict(_example_config(), seed=11)
    code, out, _ = _run(capsys, "oracle", "--config", _write(tmp_path, cfg))
    assert code == 0
    payload = json.loads(out)
    assert payload["agrees"] is True
    assert payload["seed"] == 11


def test_oracle_refuses_long_chains(tmp_path, capsys):
    cfg = {
        "links": [{"family": "werner", "p": 0.9}] * 4,
        "settings": SETTINGS,
    }
    code, _, err = _run(capsys, "oracle", "--config", _write(tmp_path, cfg))
    assert code == 2
    assert "at most 3" in err


# ---------------------------------------------------------------------------
# reproduce
# ---------------------------------------------------------------------------


def test_reproduce_unknown_id(capsys):
    code, _, err = _run(capsys, "reproduce", "no-such-id")
    assert code == 2
    assert "bilocal-grud" in err and "xstate-pair" in err


def test_reproduce_xstate_pair(capsys):
    code, out, _ = _run(capsys, "reproduce", "xstate-pair")
    assert code == 0
    assert "result: PASS" in out


def test_reproduce_identity_filter_reduction(capsys):
    code, out, _ = _run(capsys, "reproduce", "theorem1")
    assert code == 0
    assert "result: PASS" in out


def test_reproduce_bilocal_grud(capsys):
    code, out, _ = _run(capsys, "reproduce", "bilocal-grud")
    assert code == 0, f"reference scenario reported FAIL:\n{out}"
