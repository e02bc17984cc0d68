import numpy as np
import pytest

from bubblewalk.core.parallel import chunk_rng, chunk_sizes, run_chunked, worker_count


def _draw(offset: int, size: int, rng: np.random.Generator):
    return offset, rng.integers(0, 1_000_000, size=size).tolist()


@pytest.mark.unit
class TestParallel:
    """Unit tests for seeded replica chunks."""

    def test_chunk_sizes(self):
        """Full chunks first, the remainder last."""
        assert chunk_sizes(10, 4) == [4, 4, 2]
        assert chunk_sizes(8, 4) == [4, 4]
        assert chunk_sizes(0, 4) == []

    def test_worker_count(self):
        """Explicit counts win; 0 means every core."""
        assert worker_count(3) == 3
        assert worker_count(0) >= 1

    def test_streams_are_distinct(self):
        """Different chunks draw different numbers."""
        a = chunk_rng(1, 0).integers(0, 2**32, size=8)
        b = chunk_rng(1, 1).integers(0, 2**32, size=8)
        assert not np.array_equal(a, b)

    @pytest.mark.parametrize("threads", [1, 2, 8])
    def test_independent_of_worker_count(self, threads):
        """Results depend on (reps, seed, chunk) only."""
        reference = run_chunked(_draw, 1000, seed=42, threads=1, chunk=64)
        assert run_chunked(_draw, 1000, seed=42, threads=threads, chunk=64) == reference

    def test_offsets_cover_every_replica(self):
        """Chunks are laid end to end."""
        chunks = run_chunked(_draw, 130, seed=1, threads=2, chunk=64)
        assert [offset for offset, _ in chunks] == [0, 64, 128]
        assert sum(len(values) for _, values in chunks) == 130
