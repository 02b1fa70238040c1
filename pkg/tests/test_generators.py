import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from graphspread.distances import ExplicitLengths, InverseSimilarityGeodesic, distances
from graphspread.errors import ContractError, DisconnectedGraphError
from graphspread.generators import (
    GrayImage,
    complete_graph,
    gaussian_kernel,
    image_grid_graph,
    path_graph,
    random_geometric,
    random_geometric_graph,
    randomize_weights,
    ring_graph,
    star_graph,
    synthetic_image,
    trial_rng,
)
from graphspread.graph import is_connected, normalized_laplacian
from graphspread.uncertainty import sandwich_curve, trace_curve


def _edges(g):
    return {(u, v) for u, v, _ in g.edges()}


def test_fixed_families():
    k3 = complete_graph(3)
    assert len(k3.edges()) == 3 and all(w == 1 for *_, w in k3.edges())
    assert _edges(star_graph(4)) == {(0, 1), (0, 2), (0, 3)}
    np.testing.assert_array_equal(ring_graph(4).weights.sum(1), 2)
    assert _edges(path_graph(4)) == {(0, 1), (1, 2), (2, 3)}
    for f in (complete_graph, star_graph, ring_graph, path_graph):
        assert is_connected(f(7))
        with pytest.raises(ContractError):
            f(1)


def test_trial_streams_are_distinct_and_repeatable():
    a = trial_rng(7, 0).random(5)
    np.testing.assert_array_equal(a, trial_rng(7, 0).random(5))
    assert not np.array_equal(a, trial_rng(7, 1).random(5))
    assert not np.array_equal(a, trial_rng(8, 0).random(5))


def test_randomize_weights():
    g = star_graph(10)
    a = randomize_weights(g, trial_rng(3, 4))
    b = randomize_weights(g, trial_rng(3, 4))
    np.testing.assert_array_equal(a.weights, b.weights)
    assert _edges(a) == _edges(g)
    w = np.array([w for *_, w in a.edges()])
    assert np.all((w > 0) & (w < 1))
    assert np.array_equal(a.weights, a.weights.T)
    assert len(set(w)) == len(w)


def test_randomize_weights_needs_an_edge():
    from graphspread.graph import WeightedGraph

    with pytest.raises(ContractError):
        randomize_weights(WeightedGraph(np.zeros((2, 2))), 0)


def test_gaussian_kernel_examples():
    e = np.array([[0, 1.0, 0.0], [1.0, 0, np.inf], [0.0, np.inf, 0]])
    g = gaussian_kernel(e, 1.0, 1.0)
    assert g.weights[0, 1] == pytest.approx(np.exp(-1), abs=1e-15)
    assert g.weights[0, 2] == 1.0  # zero-length edge keeps weight alpha
    assert g.weights[1, 2] == 0.0
    assert np.all(np.diag(g.weights) == 0)
    assert gaussian_kernel(e, 2.5, 3.0).weights[0, 2] == 2.5
    with pytest.raises(ContractError):
        gaussian_kernel(e, 0.0, 1.0)
    with pytest.raises(ContractError):
        gaussian_kernel(e, 1.0, -1.0)


@given(st.floats(0, 5), st.floats(0, 5), st.floats(0.01, 4))
def test_gaussian_kernel_monotone(x, y, beta):
    lo, hi = sorted((x, y))
    e = np.array([[0, lo, hi], [lo, 0, np.inf], [hi, np.inf, 0]])
    w = gaussian_kernel(e, 1.0, beta).weights
    assert w[0, 2] <= w[0, 1]


def test_random_geometric_ten_nodes_radius_03():
    e, cloud = random_geometric(10, 0.3, trial_rng(1, 0))
    e2, cloud2 = random_geometric(10, 0.3, trial_rng(1, 0))
    np.testing.assert_array_equal(e, e2)
    np.testing.assert_array_equal(cloud.points, cloud2.points)
    assert np.all((cloud.points >= 0) & (cloud.points <= 1))

    d = np.linalg.norm(cloud.points[:, None] - cloud.points[None], axis=-1)
    off = ~np.eye(10, dtype=bool)
    np.testing.assert_array_equal(np.isfinite(e) & off, (d < 0.3) & off)
    finite = e[np.isfinite(e) & off]
    assert np.all((finite >= 0) & (finite <= 1))
    np.testing.assert_allclose(finite, (d / d.max())[np.isfinite(e) & off], rtol=0, atol=0)

    g = gaussian_kernel(e)
    assert is_connected(g)


def test_random_geometric_two_points():
    e, _ = random_geometric(2, 2.0, 0)  # any two points in the square are closer than 2
    assert e[0, 1] == e[1, 0] == 1.0


def test_random_geometric_gives_up():
    with pytest.raises(DisconnectedGraphError, match="connectivity rate"):
        random_geometric(30, 1e-3, 0, max_tries=5)
    with pytest.raises(ContractError):
        random_geometric(5, 0.0, 0)


def test_point_cloud_csv():
    _, cloud = random_geometric(4, 2.0, 0)
    rows = cloud.to_csv().splitlines()
    assert rows[0] == "x,y" and len(rows) == 5
    np.testing.assert_array_equal(np.loadtxt(rows[1:], delimiter=","), cloud.points)


def test_geometric_curve_uses_lengths_for_spread_and_weights_for_spectrum():
    w, e, _ = random_geometric_graph(10, 0.3, 1.0, 1.0, trial_rng(5, 0))
    c = sandwich_curve(w, 0, ExplicitLengths(e), 1e-6)
    p2 = distances(w, ExplicitLengths(e), 0) ** 2
    ref = trace_curve(normalized_laplacian(w), p2, 1e-6)
    np.testing.assert_allclose(c.g, ref.g, atol=1e-12)
    np.testing.assert_allclose(c.s, ref.s, atol=1e-12)
    # spread distances come from E, not from the inverse of W
    assert not np.allclose(p2, distances(w, InverseSimilarityGeodesic(), 0) ** 2)


def _brute_force_edges(w, h):
    count = 0
    cells = [(x, y) for y in range(h) for x in range(w)]
    for i, (x1, y1) in enumerate(cells):
        for x2, y2 in cells[i + 1 :]:
            if max(abs(x1 - x2), abs(y1 - y2)) == 1:
                count += 1
    return count


@pytest.mark.parametrize("w,h", [(2, 2), (3, 2), (2, 5), (4, 4), (7, 3)])
def test_image_grid_edge_count(w, h):
    g = image_grid_graph(synthetic_image(w, h, "gradient"))
    assert g.n == w * h
    assert len(g.edges()) == 4 * w * h - 3 * (w + h) + 2 == _brute_force_edges(w, h)
    assert is_connected(g)


def test_image_grid_weights():
    g = image_grid_graph(synthetic_image(5, 4, "constant"), alpha=2.0)
    assert {wt for *_, wt in g.edges()} == {2.0}
    chk = image_grid_graph(synthetic_image(4, 4, "checker"), 1.0, 1.0)
    for u, v, wt in chk.edges():
        diagonal = (u % 4 != v % 4) and (u // 4 != v // 4)
        assert wt == (1.0 if diagonal else pytest.approx(np.exp(-1), abs=1e-15))


def test_gray_image_validation():
    with pytest.raises(ContractError):
        GrayImage(2, 2, [0, 0.5, 1])
    with pytest.raises(ContractError):
        GrayImage(2, 1, [0, 1.5])
    with pytest.raises(ContractError):
        image_grid_graph(GrayImage(3, 1, [0, 0, 0]))


@settings(max_examples=25, deadline=None)
@given(st.integers(2, 6), st.integers(2, 6), st.integers(0, 2**32 - 1))
def test_image_graph_symmetric_positive(w, h, seed):
    g = image_grid_graph(synthetic_image(w, h, "blobs", seed))
    wt = g.weights
    assert np.array_equal(wt, wt.T)
    assert np.all(wt[wt != 0] > 0) and np.all(wt <= 1)
