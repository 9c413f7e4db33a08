import json
import math

import numpy as np
import pandas as pd
import pytest

from qwdirac.config import FiguresConfig, SqwConfig
from qwdirac.export import (
    SCHEMA_VERSION,
    config_comment,
    coordinate_names,
    distribution_frame,
    grid_frame,
    histogram_frame,
    report_text,
    table_text,
    write_text,
)
from qwdirac.walk import Histogram


def test_config_comment():
    config = FiguresConfig(figure=1)
    comment = config_comment(config)
    assert comment.startswith("# config: command = figures; bins = 50; figure = 1;")
    assert comment.endswith("t = 100\n")
    assert comment.count("\n") == 1
    assert config_comment(None) == ""


def test_table_text_formats_floats():
    frame = pd.DataFrame({"v": [0.1, 1.0 / 3.0, 2.0], "n": [1, 2, 3]})
    text = table_text(frame)
    assert text == "v,n\n0.1,1\n0.333333333333333,2\n2,3\n"
    assert "\r" not in text


def test_table_text_is_reproducible():
    config = SqwConfig(qubit="1,0", t=2)
    frame = distribution_frame({(2,): 0.25, (-2,): 0.25, (0,): 0.5}, 1)
    first = table_text(frame, config)
    assert first == table_text(frame, SqwConfig(qubit="1,0", t=2))
    lines = first.splitlines()
    assert lines[0].startswith("# config: command = sqw;")
    assert lines[1:] == ["x,probability", "-2,0.25", "0,0.5", "2,0.25"]


def test_report_text_cleans_values():
    config = FiguresConfig(figure=2)
    report = {
        "schema": 99,
        "value": np.float64(0.5),
        "missing": float("nan"),
        "huge": math.inf,
        "z": 0.5 - 0.25j,
        "alpha": (2, 0),
        "nested": {1: [np.int64(3)]},
    }
    document = json.loads(report_text(report, config))
    assert document["schema"] == SCHEMA_VERSION
    assert document["command"] == "figures"
    assert document["config"]["figure"] == "2"
    assert document["value"] == 0.5
    assert document["missing"] is None
    assert document["huge"] is None
    assert document["z"] == "0.5-0.25i"
    assert document["alpha"] == [2, 0]
    assert document["nested"] == {"1": [3]}


def test_write_text_creates_directories(tmp_path):
    path = write_text(tmp_path / "a" / "b" / "out.csv", "x\n1\n")
    assert path.read_bytes() == b"x\n1\n"


def test_coordinate_names():
    assert coordinate_names(1) == ("x",)
    assert coordinate_names(3, "v") == ("v1", "v2", "v3")


def test_distribution_frame_2d():
    frame = distribution_frame({(1, -1): 0.5, (-1, 1): 0.5}, 2)
    assert list(frame.columns) == ["x1", "x2", "probability"]
    assert frame["x1"].tolist() == [-1, 1]


def test_histogram_frame():
    histogram = Histogram(edges=(np.array([0.0, 1.0, 3.0]),), masses=np.array([0.25, 0.75]))
    frame = histogram_frame(histogram, {"law": np.array([1.0, 2.0])})
    assert list(frame.columns) == ["v", "mass", "density", "law"]
    np.testing.assert_allclose(frame["v"], [0.5, 2.0])
    np.testing.assert_allclose(frame["density"], [0.25, 0.375])


def test_grid_frame_order():
    """The first axis varies slowest"""
    frame = grid_frame([np.array([0.0, 1.0]), np.array([5.0, 6.0, 7.0])], {"f": np.arange(6.0).reshape(2, 3)})
    assert frame["v1"].tolist() == [0.0, 0.0, 0.0, 1.0, 1.0, 1.0]
    assert frame["v2"].tolist() == [5.0, 6.0, 7.0] * 2
    assert frame["f"].tolist() == pytest.approx([0, 1, 2, 3, 4, 5])
