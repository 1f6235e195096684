import math

import numpy as np
import pytest

import configspace
import ranking

SCHEMA_OCCURRENCES = {
    'ExtVP': [6, 6, 8, 0, 0],
    'PT':    [6, 6, 5, 2, 1],
    'WPT':   [7, 3, 0, 0, 10],
    'ST':    [1, 3, 4, 9, 3],
    'VP':    [0, 2, 3, 9, 6],
}


@pytest.fixture
def two_by_two():
    return configspace.ConfigSpace.from_mapping({'schema': ['st', 'vp'],
                                                 'storage': ['csv', 'orc']})

def plain_dominates(u, v):
    """u is no worse than v everywhere and better somewhere (minimizing)."""
    return (all(a <= b for a, b in zip(u, v))
            and any(a < b for a, b in zip(u, v)))

def brute_force_fronts(vectors):
    v = [[float(x) for x in row] for row in vectors]
    remaining = set(range(len(v)))
    front_of = {}
    level = 0
    while remaining:
        front = [i for i in remaining
                 if not any(plain_dominates(v[j], v[i]) for j in remaining if j != i)]
        for i in front:
            front_of[i] = level
        remaining -= set(front)
        level += 1
    return [front_of[i] for i in range(len(v))]


def test_rank_score_table():
    options = list(SCHEMA_OCCURRENCES)
    table = ranking.sd_scores_from_occurrences('schema', options,
                                               list(SCHEMA_OCCURRENCES.values()))
    assert table.query_count == 20
    assert table.scores == pytest.approx([0.725, 0.675, 0.4625, 0.375, 0.2625])
    assert table.ranked_options() == options
    assert table.occurrences.sum(axis=0).tolist() == [20] * 5

def test_score_endpoints():
    table = ranking.sd_scores_from_occurrences('x', ['p', 'q', 'r'],
                                               [[4, 0, 0], [0, 4, 0], [0, 0, 4]])
    assert table.scores.tolist() == [1.0, 0.5, 0.0]

def test_single_option_rejected():
    with pytest.raises(ranking.CriterionError):
        ranking.sd_scores_from_occurrences('x', ['p'], [[3]])

def test_uneven_occurrences_rejected():
    with pytest.raises(ranking.CriterionError):
        ranking.sd_scores_from_occurrences('x', ['p', 'q'], [[2, 0], [0, 1]])

def test_sd_scores_from_matrix(two_by_two, matrix_of):
    matrix = matrix_of(two_by_two, [[1, 1], [2, 1], [3, 5], [4, 5]])
    schema = ranking.sd_scores(matrix, 'schema')
    assert schema.scores.tolist() == [1.0, 0.0]
    storage = ranking.sd_scores(matrix, 'storage')
    # Q2 ties at 3 ms; declaration order puts csv first
    assert storage.occurrences.tolist() == [[2, 0], [0, 2]]
    assert ranking.sd_scores(matrix, 'storage', 'min').scores.tolist() == [1.0, 0.0]

def test_sd_scores_errors(two_by_two, matrix_of):
    matrix = matrix_of(two_by_two, [[1], [2], [3], [4]])
    with pytest.raises(ranking.CriterionError):
        ranking.sd_scores(matrix, 'partition')
    with pytest.raises(ranking.CriterionError):
        ranking.sd_scores(matrix, 'schema', 'mode')

def test_sd_ranking_set(two_by_two, matrix_of):
    matrix = matrix_of(two_by_two, [[1, 1], [2, 1], [3, 5], [4, 5]])
    rs = ranking.sd_ranking_set(matrix, 'schema')
    assert rs.criterion == 'sd:schema'
    assert rs.labels == ['a.i', 'a.ii', 'b.i', 'b.ii']
    assert [s for _, s in rs] == [1.0, 1.0, 0.0, 0.0]

def test_sd_ranking_groups_top_option(benchmark_space, matrix_of):
    rnd = np.random.default_rng(11)
    runtime = rnd.uniform(10, 20, size=(60, 6))
    runtime[48:] -= 9           # every ExtVP configuration is fastest
    matrix = matrix_of(benchmark_space, runtime)
    rs = ranking.sd_ranking_set(matrix, 'schemas')
    assert all(label.startswith('e.') for label in rs.labels[:12])
    assert rs.entries[0][1] == 1.0

def test_nondominated_example():
    result = ranking.nondominated_sort([(1, 2), (2, 1), (3, 3)])
    assert result.fronts == [[0, 1], [2]]
    assert math.isinf(result.crowding[0]) and math.isinf(result.crowding[2])

def test_single_vector():
    result = ranking.nondominated_sort([(5, 5, 5)])
    assert result.fronts == [[0]]

def test_maximize():
    result = ranking.nondominated_sort([(1, 2), (2, 1), (3, 3)], 'maximize')
    assert result.fronts == [[2], [0, 1]]

def test_ragged_vectors():
    with pytest.raises(ranking.CriterionError):
        ranking.nondominated_sort([(1, 2), (1,)])

@pytest.mark.parametrize('seed', range(50))
def test_fronts_match_brute_force(seed):
    rnd = np.random.default_rng(seed)
    n = int(rnd.integers(2, 101))
    m = int(rnd.integers(1, 21))
    high = int(rnd.choice([3, 6, 1000]))
    vectors = rnd.integers(1, high, size=(n, m))
    result = ranking.nondominated_sort(vectors)
    assert result.front_of.tolist() == brute_force_fronts(vectors)
    assert sorted(i for f in result.fronts for i in f) == list(range(n))

def test_dominates_agrees_with_componentwise_check():
    rnd = np.random.default_rng(5)
    for _ in range(200):
        u, v = rnd.integers(1, 4, size=(2, 4))
        assert ranking.dominates(u, v) == plain_dominates(u, v)
        assert ranking.dominates(u, v, 'maximize') == plain_dominates(-u, -v)

def test_crowding_distance():
    dist = ranking.crowding_distance([[0.0], [1.0], [3.0], [4.0]])
    assert math.isinf(dist[0]) and math.isinf(dist[3])
    assert dist[1] == pytest.approx(0.75)
    assert dist[2] == pytest.approx(0.75)

def test_pareto_q(small_space, matrix_of):
    runtime = np.full((8, 3), 10.0)
    runtime[5] = [1, 1, 1]
    runtime[2] = [2, 20, 2]
    matrix = matrix_of(small_space, runtime)
    rs = ranking.pareto_q(matrix)
    assert rs.labels[0] == matrix.labels[5]
    assert rs.entries[0][1] == 1.0
    assert rs.score_of(matrix.labels[2]) == 0.5
    assert len(rs) == 8

def test_pareto_q_top_k_not_dominated(benchmark_space, matrix_of):
    rnd = np.random.default_rng(5)
    matrix = matrix_of(benchmark_space, rnd.integers(1, 8, size=(60, 4)))
    rs = ranking.pareto_q(matrix)
    top = ranking.top_k(rs, 3).labels
    for label in top:
        row = matrix.runtime[matrix.row(label)]
        beaten_by = sum(ranking.dominates(other, row) for other in matrix.runtime)
        assert beaten_by < 3

def test_pareto_agg(small_space, matrix_of):
    runtime = np.arange(1, 9, dtype=float).reshape(8, 1) * [1, 1]
    matrix = matrix_of(small_space, runtime)
    tables = ranking.sd_tables(matrix)
    rs = ranking.pareto_agg(matrix, tables)
    assert rs.labels[0] == 'a.i.1'
    assert rs.criterion == 'pareto_agg'
    with pytest.raises(ranking.CriterionError):
        ranking.pareto_agg(matrix, {'schema': tables['schema']})

def test_rta_values():
    area, normalized = ranking.rta(0.73, 0.771, 0.75)
    assert area == pytest.approx(0.7308, abs=1e-3)
    area, normalized = ranking.rta(1, 1, 1)
    assert area == pytest.approx(1.29904, abs=1e-5)
    assert normalized == pytest.approx(1.0)
    assert ranking.rta(0, 0, 0) == (0.0, 0.0)
    with pytest.raises(ranking.CriterionError):
        ranking.rta(1.2, 0, 0)

def test_rta_ranking(small_space, matrix_of):
    runtime = np.arange(1, 9, dtype=float).reshape(8, 1) * [1, 2]
    matrix = matrix_of(small_space, runtime)
    tables = ranking.sd_tables(matrix)
    rs = ranking.rta_ranking_set(matrix, tables)
    assert rs.labels[0] == 'a.i.1'
    assert rs.entries[0][1] == pytest.approx(1.0)
    assert rs.entries[-1][1] == pytest.approx(0.0)
    raw = [ranking.rta(*s)[0] for s in ranking.rta_scores(matrix, tables)]
    by_area = sorted(range(8), key=lambda i: (-raw[i], matrix.labels[i]))
    assert rs.labels == [matrix.labels[i] for i in by_area]

def test_rta_needs_three_dimensions(two_by_two, matrix_of):
    matrix = matrix_of(two_by_two, [[1], [2], [3], [4]])
    with pytest.raises(ranking.CriterionError):
        ranking.rta_ranking_set(matrix, ranking.sd_tables(matrix))

def test_top_k():
    rs = ranking.RankingSet('x', [('d.ii.3', 3), ('b.ii.2', 2), ('e.ii.4', 1), ('a.i.1', 0)])
    assert ranking.top_k(rs, 3).labels == ['d.ii.3', 'b.ii.2', 'e.ii.4']
    assert ranking.top_k(rs, 4) == rs
    assert ranking.top_k(rs, 2).labels == ranking.top_k(rs, 3).labels[:2]
    with pytest.raises(ranking.CriterionError):
        ranking.top_k(rs, 0)
    with pytest.raises(ranking.CriterionError):
        ranking.top_k(rs, 5)

def test_duplicate_labels_rejected():
    with pytest.raises(ranking.CriterionError):
        ranking.RankingSet('x', [('a', 1), ('a', 2)])

def test_deterministic(benchmark_space, matrix_of):
    rnd = np.random.default_rng(9)
    matrix = matrix_of(benchmark_space, rnd.uniform(1, 5, size=(60, 5)))
    assert ranking.pareto_q(matrix) == ranking.pareto_q(matrix)
    tables = ranking.sd_tables(matrix)
    assert ranking.rta_ranking_set(matrix, tables) == ranking.rta_ranking_set(matrix, tables)
