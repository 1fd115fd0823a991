import numpy as np
import pytest

from hclust import lance_williams as lw
from hclust.dendrogram import canonical_equal
from hclust.errors import DataError
from hclust.ingest import DataMatrix, load_csv, normalize, write_csv
from hclust.metrics import pairwise


def write(tmp_path, text, name="data.csv"):
    path = tmp_path / name
    path.write_text(text, encoding="utf-8")
    return path


def test_load_with_header(tmp_path):
    X = load_csv(write(tmp_path, "a,b\n1,2\n3,4\n5,6\n"))
    assert (X.n, X.m) == (3, 2)
    assert X.columns == ("a", "b")
    assert X.labels == ("0", "1", "2")
    assert X.weights is None


def test_label_weight_and_column_selection(tmp_path):
    path = write(tmp_path, "name;x;w;y\np;1.5;2;0\nq;2.5;1;1\n")
    X = load_csv(path, delimiter=";", label_column="name", weight_column="w")
    assert X.labels == ("p", "q")
    assert X.columns == ("x", "y")
    assert X.weights.tolist() == [2.0, 1.0]
    assert load_csv(path, delimiter=";", columns=["y"], label_column=0).values.tolist() == [[0.0], [1.0]]


def test_no_header_by_index(tmp_path):
    X = load_csv(write(tmp_path, "7,1\n8,2\n"), header=False, label_column=0)
    assert X.labels == ("7", "8")
    assert X.values.tolist() == [[1.0], [2.0]]


def test_unit_weights_change_nothing(tmp_path):
    rng = np.random.default_rng(0)
    V = rng.random((12, 2))
    rows = "\n".join(f"{a!r},{b!r},1" for a, b in V.tolist())
    X = load_csv(write(tmp_path, "x,y,w\n" + rows + "\n"), weight_column="w")
    D = pairwise(X.values, "squared_euclidean")
    for method in ("ward", "centroid", "average"):
        assert canonical_equal(lw.cluster(D, method, X.weights), lw.cluster(D, method), tol=0)


def test_malformed_cell_named_by_row(tmp_path):
    text = "a,b\n1,2\n3,4\n5,6\n7,8\n9,oops\n"
    with pytest.raises(DataError, match=r"row 5 \(line 6\)"):
        load_csv(write(tmp_path, text))


def test_text_column_reported(tmp_path):
    rows = "".join(f"p{i},{i}\n" for i in range(30))
    with pytest.raises(DataError) as exc:
        load_csv(write(tmp_path, "name,x\n" + rows))
    msg = str(exc.value)
    assert "... and 20 more" in msg
    assert "'name' are not numeric in any row" in msg


def test_missing_cell_rejected(tmp_path):
    with pytest.raises(DataError, match="row 2"):
        load_csv(write(tmp_path, "a,b\n1,2\n3,\n"))
    with pytest.raises(DataError, match="row 1"):
        load_csv(write(tmp_path, "a,b\n1\n"))


def test_bad_files(tmp_path):
    with pytest.raises(FileNotFoundError):
        load_csv(tmp_path / "absent.csv")
    with pytest.raises(DataError):
        load_csv(write(tmp_path, ""))
    with pytest.raises(DataError):
        load_csv(write(tmp_path, "a,b\n"))
    with pytest.raises(DataError, match="unknown column"):
        load_csv(write(tmp_path, "a,b\n1,2\n"), label_column="c")
    with pytest.raises(DataError, match="duplicate"):
        load_csv(write(tmp_path, "k,a\nx,1\nx,2\n"), label_column="k")
    with pytest.raises(DataError, match="nonpositive weight"):
        load_csv(write(tmp_path, "a,w\n1,1\n2,0\n"), weight_column="w")


def test_minmax():
    X = normalize(DataMatrix(np.array([[0.0], [5.0], [10.0]])), "minmax")
    assert X.values[:, 0].tolist() == [0.0, 0.5, 1.0]


def test_zscore_centres():
    X = normalize(DataMatrix(np.array([[-1.0, 3.0], [0.0, 7.0], [1.0, 8.0]])), "zscore")
    assert np.allclose(X.values.mean(axis=0), 0.0, atol=1e-15)
    assert np.allclose(X.values.std(axis=0), 1.0)


def test_constant_column_kept_with_warning():
    X = DataMatrix(np.array([[2.0, 1.0], [2.0, 3.0]]))
    with pytest.warns(UserWarning, match="constant"):
        out = normalize(X, "minmax")
    assert out.values[:, 0].tolist() == [2.0, 2.0]
    assert out.values[:, 1].tolist() == [0.0, 1.0]


def test_minmax_in_unit_interval():
    V = np.random.default_rng(4).normal(0, 1e6, (200, 5))
    out = normalize(DataMatrix(V), "minmax").values
    assert out.min() >= 0.0 and out.max() <= 1.0


def test_unknown_policy():
    with pytest.raises(ValueError):
        normalize(DataMatrix(np.zeros((2, 1))), "robust")


def test_round_trip_twelve_digits(tmp_path):
    rng = np.random.default_rng(9)
    X = DataMatrix(rng.normal(0, 1e3, (20, 3)), tuple(f"r{i}" for i in range(20)), rng.uniform(0.1, 5, 20))
    path = tmp_path / "out.csv"
    write_csv(X, path)
    back = load_csv(path, label_column="label", weight_column="weight")
    assert back.labels == X.labels
    assert np.allclose(back.values, X.values, rtol=1e-11, atol=0)
    assert np.allclose(back.weights, X.weights, rtol=1e-11, atol=0)
    assert [f"{v:.12g}" for v in back.values.ravel()] == [f"{v:.12g}" for v in X.values.ravel()]
