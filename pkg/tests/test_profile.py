from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from metricvote.profile import (
    ProfileFormatError,
    PseudoMetric,
    VoteProfile,
    check_consistency,
    check_triangle,
    pairwise_fraction,
    pairwise_matrix,
    parse_metric,
    parse_profile,
    restrict_profile,
    social_cost,
    voters_ranking_first,
    voters_ranking_last,
)


@st.composite
def profiles(draw, max_n=5, max_m=5):
    n = draw(st.integers(1, max_n))
    m = draw(st.integers(1, max_m))
    return VoteProfile.from_rankings([draw(st.permutations(range(n))) for _ in range(m)])


def test_parse_roundtrip():
    text = "# a comment\n3 2\n0 1 2\n\n2 1 0\n"
    p = parse_profile(text)
    assert p.n == 3 and p.m == 2
    assert p.rankings == ((0, 1, 2), (2, 1, 0))
    assert parse_profile(p.to_text()) == p
    assert parse_profile(text.encode()) == p


@pytest.mark.parametrize(
    "text, lineno, fragment",
    [
        ("", 1, "header"),
        ("3\n", 1, "header"),
        ("2 1\n0 0\n", 2, "not a permutation"),
        ("2 1\n0 2\n", 2, "out of range"),
        ("2 2\n0 1\n", 2, "expected 2 ranking lines"),
        ("2 1\n0 x\n", 2, "non-integer"),
        ("3 1\n0 1\n", 2, "expected 3 candidates"),
    ],
)
def test_parse_errors_carry_line_numbers(text, lineno, fragment):
    with pytest.raises(ProfileFormatError) as exc:
        parse_profile(text)
    assert exc.value.lineno == lineno
    assert fragment in str(exc.value)


def test_metric_parse_and_validation():
    m = parse_metric("1 1/2\n0 3\n")
    assert m.dist == ((1, Fraction(1, 2)), (0, 3))
    assert parse_metric(m.to_text()) == m
    with pytest.raises(ProfileFormatError):
        parse_metric("1 -1\n")
    with pytest.raises(ProfileFormatError):
        parse_metric("1 2\n3\n")
    with pytest.raises(ValueError):
        PseudoMetric.from_rows([[Fraction(-1)]])


def test_profile_rejects_non_permutations():
    with pytest.raises(ValueError):
        VoteProfile.from_rankings([[0, 0]])
    with pytest.raises(ValueError):
        VoteProfile.from_rankings([])


def test_pairwise_and_sets(unanimous3, split):
    assert pairwise_fraction(unanimous3, 0, 2) == 1
    assert pairwise_fraction(split, 0, 1) == Fraction(1, 2)
    with pytest.raises(ValueError):
        pairwise_fraction(split, 1, 1)
    assert voters_ranking_first(unanimous3, 0, [1, 2]) == frozenset({0, 1, 2})
    assert voters_ranking_last(unanimous3, 2, [0, 1]) == frozenset({0, 1, 2})
    assert voters_ranking_last(split, 1, [0]) == frozenset({0})
    # vacuous: every voter ranks x ahead of the empty set
    assert voters_ranking_first(split, 0, []) == frozenset({0, 1})


def test_social_cost_and_checks(split):
    metric = PseudoMetric.from_rows([[1, 1], [2, 0]])
    assert social_cost(metric, 0) == 3 and social_cost(metric, 1) == 1
    assert check_consistency(metric, split) is None
    assert check_triangle(metric) is None
    bad = PseudoMetric.from_rows([[2, 1], [2, 0]])
    assert check_consistency(bad, split) == (0, 0, 1)
    broken = PseudoMetric.from_rows([[5, 0], [0, 0]])
    v, u, x, y = check_triangle(broken)
    assert broken[v][x] > broken[v][y] + broken[u][y] + broken[u][x]


def test_zero_metric_is_consistent_with_everything(cyclic3):
    zero = PseudoMetric.from_rows([[0] * 3] * 3)
    assert check_consistency(zero, cyclic3) is None and check_triangle(zero) is None


def test_restrict_profile(unanimous3):
    sub, index_map = restrict_profile(unanimous3, [2, 1])
    assert index_map == {1: 0, 2: 1}
    assert sub.rankings == ((0, 1),) * 3


@given(profiles())
@settings(max_examples=60, deadline=None)
def test_pairwise_matrix_matches_definition(p):
    mat = pairwise_matrix(p)
    for x in range(p.n):
        for y in range(p.n):
            if x != y:
                assert mat[x][y] == pairwise_fraction(p, x, y)
                assert mat[x][y] + mat[y][x] == 1


@given(profiles())
@settings(max_examples=40, deadline=None)
def test_digest_is_deterministic(p):
    assert p.digest() == parse_profile(p.to_text()).digest()
