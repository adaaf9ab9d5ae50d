import math
import tempfile
from pathlib import Path

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.stats import chi2

import bipspec.graphs as graphs_mod
from bipspec import (
    BipartiteGraph,
    DegreeSpec,
    EdgeListFormatError,
    default_mixing_steps,
    is_regular,
    normalized_er,
    normalized_regular,
    read_edge_list,
    sample_er,
    sample_regular,
    write_edge_list,
)

from oracles import count_regular_bit_matrices

_SCRATCH = Path(tempfile.mkdtemp(prefix="bipspec_tests_"))


class TestSampleEr:
    def test_p_zero_gives_empty(self):
        g = sample_er(5, 7, 0.0, seed=1)
        assert g.edge_count == 0

    def test_p_one_gives_complete(self):
        g = sample_er(5, 7, 1.0, seed=1)
        assert g.edge_count == 35

    def test_edge_count_concentration(self):
        m, n, p = 200, 100, 0.3
        g = sample_er(m, n, p, seed=123)
        mean = m * n * p
        sd = math.sqrt(m * n * p * (1 - p))
        assert abs(g.edge_count - mean) <= 4 * sd

    def test_seed_determinism(self):
        a = sample_er(20, 30, 0.4, seed=9)
        b = sample_er(20, 30, 0.4, seed=9)
        assert a == b
        assert a != sample_er(20, 30, 0.4, seed=10)

    def test_rejects_bad_probability(self):
        with pytest.raises(ValueError):
            sample_er(3, 3, 1.5, seed=0)


class TestSampleRegular:
    @pytest.mark.parametrize("m,n,dl", [(4, 4, 2), (6, 4, 2), (9, 3, 1), (8, 8, 3), (12, 8, 4)])
    @pytest.mark.parametrize("seed", [0, 1, 17])
    def test_output_always_regular(self, m, n, dl, seed):
        spec = DegreeSpec(dl, m * dl // n)
        g = sample_regular(m, n, spec, seed)
        assert is_regular(g, spec)

    def test_k44_unique_graph(self):
        g = sample_regular(4, 4, DegreeSpec(4, 4), seed=3)
        assert g.X.sum() == 16

    def test_zero_degree(self):
        g = sample_regular(3, 3, DegreeSpec(0, 0), seed=3)
        assert g.edge_count == 0

    def test_every_chain_prefix_keeps_degrees(self):
        # proposals are replayed deterministically, so checking all step
        # prefixes asserts regularity after every accepted move
        spec = DegreeSpec(2, 2)
        for steps in range(0, 60, 5):
            g = sample_regular(4, 4, spec, seed=5, mixing_steps=steps)
            assert is_regular(g, spec)

    def test_seed_determinism_bitwise(self):
        spec = DegreeSpec(3, 3)
        a = sample_regular(9, 9, spec, seed=42)
        b = sample_regular(9, 9, spec, seed=42)
        assert np.array_equal(a.X, b.X)

    def test_python_kernel_matches_jitted(self, monkeypatch):
        spec = DegreeSpec(3, 3)
        fast = sample_regular(10, 10, spec, seed=8)
        monkeypatch.setattr(graphs_mod, "_HAVE_NUMBA", False)
        slow = sample_regular(10, 10, spec, seed=8)
        assert fast == slow

    def test_infeasible_specs_rejected(self):
        with pytest.raises(ValueError):
            sample_regular(4, 4, DegreeSpec(5, 5), seed=0)  # degree > class size
        with pytest.raises(ValueError):
            sample_regular(3, 2, DegreeSpec(1, 2), seed=0)  # handshake fails

    def test_default_mixing_steps_formula(self):
        assert default_mixing_steps(4, 0) == 0
        edges = 8
        assert default_mixing_steps(4, 2) == math.ceil(10 * edges * math.log(edges))

    def test_uniformity_chi_squared(self):
        # all 90 labeled (2,2)-regular graphs on 4+4 vertices, 1e5 samples
        n_states = count_regular_bit_matrices(4, 4, 2, 2)
        assert n_states == 90
        samples = 100_000
        spec = DegreeSpec(2, 2)
        counts = {}
        for t in range(samples):
            g = sample_regular(4, 4, spec, seed=t, mixing_steps=1000)
            key = g.X.tobytes()
            counts[key] = counts.get(key, 0) + 1
        assert len(counts) == n_states
        expected = samples / n_states
        stat = sum((c - expected) ** 2 / expected for c in counts.values())
        assert stat < chi2.ppf(0.999, n_states - 1)


class TestIsRegular:
    def test_complete_graph(self):
        g = sample_er(3, 5, 1.0, seed=0)
        assert is_regular(g, DegreeSpec(5, 3))

    def test_zero_graph(self):
        g = sample_er(3, 5, 0.0, seed=0)
        assert is_regular(g, DegreeSpec(0, 0))

    def test_one_edge_removed_breaks_regularity(self):
        spec = DegreeSpec(2, 2)
        g = sample_regular(4, 4, spec, seed=1)
        X = np.array(g.X)
        i, j = g.edges()[0]
        X[i, j] = 0
        assert not is_regular(BipartiteGraph(4, 4, X), spec)


class TestNormalized:
    def test_regular_block_values_and_row_sums(self):
        spec = DegreeSpec(2, 2)
        g = sample_regular(6, 6, spec, seed=2)
        norm = normalized_regular(g, spec)
        dens = 2 / 6
        scale = math.sqrt(dens * (1 - dens))
        vals = np.unique(norm.block)
        assert np.allclose(sorted(vals), sorted([(1 - dens) / scale, -dens / scale]))
        assert np.allclose(norm.block.sum(axis=1), 0.0, atol=1e-12)
        assert np.allclose(norm.block.sum(axis=0), 0.0, atol=1e-12)

    def test_full_matrix_symmetric_zero_diagonal_blocks(self):
        spec = DegreeSpec(2, 3)
        g = sample_regular(6, 4, spec, seed=2)
        full = normalized_regular(g, spec).entries
        assert np.array_equal(full, full.T)
        assert not full[:6, :6].any()
        assert not full[6:, 6:].any()

    def test_degenerate_density_rejected(self):
        g = sample_regular(4, 4, DegreeSpec(4, 4), seed=0)
        with pytest.raises(ValueError):
            normalized_regular(g, DegreeSpec(4, 4))
        g0 = sample_regular(4, 4, DegreeSpec(0, 0), seed=0)
        with pytest.raises(ValueError):
            normalized_regular(g0, DegreeSpec(0, 0))

    def test_non_regular_graph_rejected(self):
        g = sample_er(6, 6, 0.5, seed=11)
        with pytest.raises(ValueError):
            normalized_regular(g, DegreeSpec(3, 3))

    def test_er_half_gives_sign_entries(self):
        g = sample_er(10, 10, 0.5, seed=4)
        block = normalized_er(g, 0.5).block
        assert set(np.unique(block)) <= {-1.0, 1.0}

    def test_er_standardization_identity(self):
        # exact two-point standardization: mean 0, variance 1 under the law
        for p in (0.2, 0.3, 0.5, 0.8):
            hi = (1 - p) / math.sqrt(p * (1 - p))
            lo = -p / math.sqrt(p * (1 - p))
            assert p * hi + (1 - p) * lo == pytest.approx(0.0, abs=1e-12)
            assert p * hi * hi + (1 - p) * lo * lo == pytest.approx(1.0, abs=1e-12)

    def test_er_entry_bound(self):
        for p in (0.1, 0.3, 0.5):
            g = sample_er(12, 12, p, seed=7)
            block = normalized_er(g, p).block
            assert np.abs(block).max() <= 1.0 / math.sqrt(p) + 1e-12

    def test_er_degenerate_p_rejected(self):
        g = sample_er(3, 3, 0.5, seed=0)
        for p in (0.0, 1.0):
            with pytest.raises(ValueError):
                normalized_er(g, p)


class TestEdgeListIO:
    @given(m=st.integers(1, 6), n=st.integers(1, 6), bits=st.integers(0, 2 ** 36 - 1))
    @settings(max_examples=50, deadline=None)
    def test_round_trip(self, m, n, bits):
        X = np.array([[(bits >> (i * 6 + j)) & 1 for j in range(n)] for i in range(m)],
                     dtype=np.uint8)
        g = BipartiteGraph(m, n, X)
        path = _SCRATCH / "round_trip.txt"
        write_edge_list(g, path)
        assert read_edge_list(path) == g

    def test_empty_graph_header_only(self, tmp_path):
        g = BipartiteGraph(3, 2, np.zeros((3, 2), dtype=np.uint8))
        path = tmp_path / "empty.txt"
        write_edge_list(g, path)
        assert path.read_text() == "3 2\n"

    def test_k22_has_four_edge_lines(self, tmp_path):
        g = BipartiteGraph(2, 2, np.ones((2, 2), dtype=np.uint8))
        path = tmp_path / "k22.txt"
        write_edge_list(g, path)
        lines = path.read_text().splitlines()
        assert lines[0] == "2 2"
        assert len(lines) == 5

    @pytest.mark.parametrize("content,lineno", [
        ("", 1),
        ("2\n", 1),
        ("a b\n", 1),
        ("2 2\n0\n", 2),
        ("2 2\n0 x\n", 2),
        ("2 2\n0 5\n", 2),
        ("2 2\n0 1\n0 1\n", 3),
    ])
    def test_malformed_files_carry_line_numbers(self, tmp_path, content, lineno):
        path = tmp_path / "bad.txt"
        path.write_text(content)
        with pytest.raises(EdgeListFormatError, match=f"line {lineno}"):
            read_edge_list(path)

    def test_deterministic_bytes(self, tmp_path):
        g = sample_er(5, 5, 0.5, seed=3)
        p1, p2 = tmp_path / "a.txt", tmp_path / "b.txt"
        write_edge_list(g, p1)
        write_edge_list(g, p2)
        assert p1.read_bytes() == p2.read_bytes()


class TestBipartiteGraphType:
    def test_rejects_non_binary_entries(self):
        with pytest.raises(ValueError):
            BipartiteGraph(2, 2, np.array([[0, 2], [1, 0]]))

    def test_immutable_after_construction(self):
        g = sample_er(3, 3, 0.5, seed=0)
        with pytest.raises(ValueError):
            g.X[0, 0] = 1
