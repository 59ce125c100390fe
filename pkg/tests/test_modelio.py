import json

import numpy as np
import pytest

from dcfs.model import build_topology, forward, train_offline, train_offline_shared
from dcfs.modelio import (
    FORMAT,
    FORMAT_ONLINE,
    ModelFormatError,
    count_centers,
    load_model,
    read_returns,
    read_series,
    save_model,
    write_series,
)
from dcfs.synth import DatasetError, to_index


@pytest.fixture
def data():
    rng = np.random.default_rng(0)
    X = rng.normal(size=(300, 7))
    return X, np.tanh(X).sum(1)


def test_round_trip_exact(tmp_path, data):
    model = train_offline(data, build_topology(7, 3, 2, 5))
    save_model(model, tmp_path / "m.json")
    back = load_model(tmp_path / "m.json")
    assert back.topology == model.topology
    for a, b in zip(model.systems, back.systems):
        for fa, fb in zip(a, b):
            assert fa.grid.c.tobytes() == fb.grid.c.tobytes()
            assert fa.partitions == fb.partitions
    assert np.array_equal(forward(model, data[0]), forward(back, data[0]))
    assert json.loads((tmp_path / "m.json").read_text())["format"] == FORMAT


def test_online_format_keeps_weights(tmp_path, data):
    model = train_offline(data, build_topology(7, 3, 1, 4))
    model.online = True
    save_model(model, tmp_path / "m.json")
    back = load_model(tmp_path / "m.json")
    assert back.online
    assert json.loads((tmp_path / "m.json").read_text())["format"] == FORMAT_ONLINE
    assert np.array_equal(back.systems[0][0].grid.w, model.systems[0][0].grid.w)


def test_center_counts(tmp_path, data):
    topo = build_topology(7, 3, 1, 4, shared=True)
    save_model(train_offline_shared(data, topo), tmp_path / "s.json")
    assert count_centers(tmp_path / "s.json") == 4**3 * topo.L
    topo = build_topology(7, 3, 1, 4)
    save_model(train_offline(data, topo), tmp_path / "g.json")
    assert count_centers(tmp_path / "g.json") == 4**3 * sum(topo.widths)


def test_bad_model_files(tmp_path, data):
    p = tmp_path / "m.json"
    p.write_text("{not json")
    with pytest.raises(ModelFormatError):
        load_model(p)
    save_model(train_offline(data, build_topology(7, 3, 2, 4)), p)
    d = json.loads(p.read_text())
    d["format"] = "dcfs-model/9"
    p.write_text(json.dumps(d))
    with pytest.raises(ModelFormatError):
        load_model(p)
    d["format"] = FORMAT
    d["levels"] = d["levels"][:1]
    p.write_text(json.dumps(d))
    with pytest.raises(ModelFormatError):
        load_model(p)


def test_series_contract(tmp_path):
    p = tmp_path / "r.csv"
    write_series(p, [0.01, -0.02], "return")
    t, v, col = read_series(p)
    assert col == "return" and t.tolist() == [1, 2] and v.tolist() == [0.01, -0.02]
    p.write_text("date,close\n1,2\n")
    with pytest.raises(DatasetError):
        read_series(p)
    p.write_text("t,return\n2,0.1\n1,0.2\n")
    with pytest.raises(DatasetError):
        read_series(p)
    p.write_text("t,return\n1,abc\n")
    with pytest.raises(DatasetError):
        read_series(p)
    p.write_text("t,value\n0,100\n1,-3\n")
    with pytest.raises(DatasetError):
        read_returns(p)


def test_price_file_round_trip(tmp_path):
    r = np.random.default_rng(2).normal(0, 0.015, 1000)
    write_series(tmp_path / "p.csv", np.concatenate([[100.0], to_index(r, 100.0)]), "value", t0=0)
    assert np.max(np.abs(read_returns(tmp_path / "p.csv") - r)) <= 1e-12
