import numpy as np
import pytest
from hypothesis import given, settings as hyp_settings, strategies as st

from bubblewalk.core.exception import ResourceGuardException, ValidationException
from bubblewalk.models.scaling import ScalingRule
from bubblewalk.models.vertex import ROOT, Letter, VertexAddress, VertexBatch, parse_word
from bubblewalk.services.graph_service import GraphService

V = VertexAddress

words = st.lists(st.sampled_from(list(Letter)), max_size=40).map(tuple)


def bfs_distances(graph: GraphService, source: VertexAddress, radius: int) -> dict:
    """Plain BFS used as the distance oracle."""
    dist = {source: 0}
    frontier = [source]
    for d in range(1, radius + 1):
        layer = []
        for v in frontier:
            for u in graph.neighbors(v):
                if u not in dist:
                    dist[u] = d
                    layer.append(u)
        frontier = layer
    return dist


@pytest.mark.unit
class TestGraphService:
    """Unit tests for GraphService on the small explicit rule."""

    def test_apply_letter_examples(self, fig1_graph):
        """a rotates, b fixes ordinary vertices and moves midpoints down."""
        assert fig1_graph.apply_letter(V(1, 0, 3), Letter.A) == V(1, 0, 0)
        assert fig1_graph.apply_letter(V(1, 0, 1), Letter.B) == V(1, 0, 1)
        assert fig1_graph.apply_letter(V(1, 0, 2), Letter.B) == V(2, 0, 0)

    def test_b_orientation(self, fig1_graph):
        """b cycles midpoint -> child 0 -> child 1 -> midpoint."""
        mid = V(1, 0, 2)
        assert fig1_graph.apply_letter(V(2, 0, 0), Letter.B) == V(2, 1, 0)
        assert fig1_graph.apply_letter(V(2, 1, 0), Letter.B) == mid
        assert fig1_graph.apply_letter(mid, Letter.B_INV) == V(2, 1, 0)

    def test_apply_word_examples(self, fig1_graph):
        """Words act from the left, letter by letter."""
        assert fig1_graph.apply_word(ROOT, parse_word("a a_inv")) == ROOT
        assert fig1_graph.apply_word(ROOT, parse_word("aa")) == V(1, 0, 2)
        assert fig1_graph.apply_word(V(1, 0, 2), parse_word("bbb")) == V(1, 0, 2)

    def test_leaf_midpoints_are_fixed(self, fig1_graph):
        """The truncated graph has no level below the explicit list."""
        leaf_mid = V(3, 2, 4)
        assert fig1_graph.apply_letter(leaf_mid, Letter.B) == leaf_mid

    def test_neighbors_examples(self, fig1_graph):
        """Root has degree 2; branching vertices have degree 4."""
        assert fig1_graph.neighbors(ROOT) == {V(1, 0, 1), V(1, 0, 3)}
        assert fig1_graph.neighbors(V(1, 0, 2)) == {V(1, 0, 1), V(1, 0, 3), V(2, 0, 0), V(2, 1, 0)}
        assert fig1_graph.neighbors(V(2, 0, 0)) == {V(2, 0, 1), V(2, 0, 5), V(1, 0, 2), V(2, 1, 0)}

    def test_dist_to_root_examples(self, fig1_graph):
        """Closed-form distance to the root."""
        assert fig1_graph.dist_to_root(ROOT) == 0
        assert fig1_graph.dist_to_root(V(2, 0, 0)) == 3
        assert fig1_graph.dist_to_root(V(1, 0, 3)) == 1

    def test_dist_examples(self, fig1_graph):
        """Bidirectional BFS distances, None beyond the cap."""
        x = V(2, 1, 3)
        assert fig1_graph.dist(x, x, 0) == 0
        assert fig1_graph.dist(V(2, 0, 0), V(2, 1, 0), 5) == 1
        assert fig1_graph.dist(V(1, 0, 1), V(1, 0, 3), 10) == 2
        assert fig1_graph.dist(V(1, 0, 1), V(1, 0, 3), 1) is None

    def test_ball_examples(self, fig1_graph):
        """Ball sizes 1, 3 and 6 around the root."""
        assert fig1_graph.ball(ROOT, 0) == {ROOT}
        assert len(fig1_graph.ball(ROOT, 1)) == 3
        assert fig1_graph.ball(ROOT, 3) == {ROOT, V(1, 0, 1), V(1, 0, 3), V(1, 0, 2), V(2, 0, 0), V(2, 1, 0)}

    @pytest.mark.parametrize("bad", [V(1, 0, 9), V(2, 2, 0), V(2, 1, 6)])
    def test_distances_reject_noncanonical(self, fig1_graph, bad):
        """Addresses off the graph raise instead of yielding a distance."""
        with pytest.raises(ValidationException):
            fig1_graph.geodesic_distance(bad, ROOT)
        with pytest.raises(ValidationException):
            fig1_graph.dist(ROOT, bad, 5)
        with pytest.raises(ValidationException):
            fig1_graph.ball(bad, 1)

    def test_ball_size_bound_examples(self, fig1_graph):
        """The per-level size bound at n = 0, 1, 3."""
        assert fig1_graph.ball_size_bound(0) == 6
        assert fig1_graph.ball_size_bound(1) == 6
        assert fig1_graph.ball_size_bound(3) == 22

    def test_ball_guard(self, canonical_graph):
        """Balls past MAX_BALL_SIZE are refused with the guard named."""
        with pytest.raises(ResourceGuardException) as exc_info:
            canonical_graph.ball(ROOT, 10_000)

        assert "graph.ball" in exc_info.value.message
        assert exc_info.value.exit_code == 4

    @pytest.mark.parametrize("rule", [ScalingRule.explicit(2, 3, 4), ScalingRule.canonical()])
    def test_dist_to_root_matches_bfs(self, rule):
        """Closed form equals BFS on B_{s_3}(o)."""
        graph = GraphService(rule)
        radius = rule.partial_sum(3)
        for x, d in bfs_distances(graph, ROOT, radius).items():
            assert graph.dist_to_root(x) == d

    @pytest.mark.parametrize("rule", [ScalingRule.explicit(2, 3, 4), ScalingRule.canonical()])
    def test_geodesic_matches_bfs(self, rule):
        """Closed-form pair distance equals BFS from several sources."""
        graph = GraphService(rule)
        radius = rule.partial_sum(3)
        ball = sorted(graph.ball(ROOT, radius))
        sources = ball[:: max(1, len(ball) // 12)]
        for source in sources:
            for y, d in bfs_distances(graph, source, 2 * radius).items():
                if graph.dist_to_root(y) <= radius:
                    assert graph.geodesic_distance(source, y) == d

    def test_a_power_fixes_level_cycle(self, fig1_graph):
        """a^{2 alpha_1} fixes the root cycle but moves a child start."""
        word = (Letter.A,) * 4
        for pos in range(4):
            assert fig1_graph.apply_word(V(1, 0, pos), word) == V(1, 0, pos)
        assert fig1_graph.apply_word(V(2, 0, 0), word) != V(2, 0, 0)

    def test_ball_volume_matches_bfs(self, canonical_graph):
        """Per-level counting equals the BFS ball for every radius up to 40."""
        for r in range(0, 41):
            assert canonical_graph.ball_volume(r) == len(canonical_graph.ball(ROOT, r))

    def test_ball_within_size_bound(self, canonical_graph):
        """|B_n(o)| never exceeds the displayed bound for n <= 200."""
        for n in range(0, 201):
            assert canonical_graph.ball_volume(n) <= canonical_graph.ball_size_bound(n)

    def test_ball_batch_matches_ball(self, canonical_graph):
        """Array enumeration and BFS agree as sets."""
        batch = canonical_graph.ball_batch(20)
        assert set(batch.to_addresses()) == canonical_graph.ball(ROOT, 20)

    def test_step_batch_matches_scalar(self, canonical_graph, rng):
        """Array kernel agrees with apply_letter on every ball vertex and letter."""
        batch = canonical_graph.ball_batch(25)
        codes = rng.integers(0, 4, size=batch.size)
        moved = canonical_graph.step_batch(batch, codes).to_addresses()
        for x, code, y in zip(batch.to_addresses(), codes.tolist(), moved):
            assert canonical_graph.apply_letter(x, Letter.from_code(code)) == y

    def test_geodesic_batch_matches_scalar(self, canonical_graph, rng):
        """Vectorized distance agrees with the scalar closed form."""
        ball = canonical_graph.ball_batch(30)
        i = rng.integers(0, ball.size, size=500)
        j = rng.integers(0, ball.size, size=500)
        xs, ys = ball.take(i), ball.take(j)
        batch = canonical_graph.geodesic_batch(xs, ys)
        for x, y, d in zip(xs.to_addresses(), ys.to_addresses(), batch.tolist()):
            assert canonical_graph.geodesic_distance(x, y) == d

    def test_dist_to_root_batch(self, canonical_graph):
        """Batch and scalar distances to the root agree."""
        ball = canonical_graph.ball_batch(15)
        expected = [canonical_graph.dist_to_root(x) for x in ball.to_addresses()]
        assert canonical_graph.dist_to_root_batch(ball).tolist() == expected


@pytest.mark.unit
class TestGraphProperties:
    """Property checks over random words and vertices."""

    @hyp_settings(max_examples=200, deadline=None)
    @given(w=words, level=st.integers(1, 12), path=st.integers(0, 2**11 - 1), pos=st.integers(0, 10**6))
    def test_word_then_inverse_is_identity(self, w, level, path, pos):
        """x.w.w^-1 = x."""
        graph = GraphService(ScalingRule.canonical())
        alpha = graph.rule.alpha(level)
        x = V(level, path % 2 ** (level - 1), pos % (2 * alpha))
        y = graph.apply_word(x, w)
        back = tuple(letter.inverse for letter in reversed(w))
        assert graph.apply_word(y, back) == x

    @hyp_settings(max_examples=200, deadline=None)
    @given(level=st.integers(1, 12), path=st.integers(0, 2**11 - 1), pos=st.integers(0, 10**6))
    def test_b_cubed_is_identity(self, level, path, pos):
        """b is a product of disjoint 3-cycles."""
        graph = GraphService(ScalingRule.canonical())
        alpha = graph.rule.alpha(level)
        x = V(level, path % 2 ** (level - 1), pos % (2 * alpha))
        assert graph.apply_word(x, (Letter.B,) * 3) == x

    @hyp_settings(max_examples=100, deadline=None)
    @given(w=words)
    def test_displacement_bounded_by_length(self, w):
        """A word of length L moves the root at most L."""
        graph = GraphService(ScalingRule.canonical())
        assert graph.dist_to_root(graph.apply_word(ROOT, w)) <= len(w)

    def test_batch_is_validated(self, fig1_graph):
        """Batches of canonical vertices pass validation."""
        batch = VertexBatch.from_addresses([ROOT, V(3, 3, 7)])
        assert fig1_graph.validate_batch(batch).size == 2
        assert np.all(fig1_graph.dist_to_root_batch(batch) >= 0)
