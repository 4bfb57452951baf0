"""
Tests for instance and decomposition file formats.
"""

import pytest

from twapprox.errors import DecompositionFormatError, InstanceFormatError
from twapprox.formats import (
    format_instance,
    format_td,
    instance_hash,
    parse_instance,
    parse_td,
    read_instance,
)
from twapprox.graph import ProblemKind
from twapprox.treedecomp import TreeDecomposition

P3_TEXT = """c the infeasible path
p cvc 3 2
w 1 0
w 2 1
w 3 0
e 1 2
e 2 3
"""


class TestParseInstance:
    """Tests for parse_instance."""

    def test_parse_p3(self):
        """Test parsing a small CVC instance."""
        inst = parse_instance(P3_TEXT)
        assert inst.kind is ProblemKind.CVC
        assert inst.graph.edges == ((1, 2), (2, 3))
        assert inst.weight == {1: 0, 2: 1, 3: 0}

    def test_missing_weight_defaults_to_zero(self):
        """Test vertices without a w line get weight 0."""
        inst = parse_instance("p tss 2 1\ne 1 2\n")
        assert inst.weight == {1: 0, 2: 0}

    def test_edge_count_mismatch(self):
        """Test the header edge count is enforced."""
        with pytest.raises(InstanceFormatError):
            parse_instance("p cvc 3 3\ne 1 2\n")

    def test_duplicate_edge(self):
        """Test duplicate edges are rejected."""
        with pytest.raises(InstanceFormatError):
            parse_instance("p cvc 2 2\ne 1 2\ne 2 1\n")

    def test_error_carries_line_number(self):
        """Test errors report the offending line."""
        with pytest.raises(InstanceFormatError) as exc_info:
            parse_instance("p cvc 2 1\nw 1 x\ne 1 2\n")
        assert exc_info.value.line_number == 2
        assert "line 2" in str(exc_info.value)

    def test_vertex_out_of_range(self):
        """Test vertex ids beyond n are rejected."""
        with pytest.raises(InstanceFormatError):
            parse_instance("p vds 2 1\ne 1 3\n")

    def test_unknown_kind(self):
        """Test unknown problem kinds are rejected."""
        with pytest.raises(InstanceFormatError):
            parse_instance("p mis 2 0\n")

    def test_problem_line_first(self):
        """Test data before the problem line is rejected."""
        with pytest.raises(InstanceFormatError):
            parse_instance("e 1 2\np cvc 2 1\n")

    def test_format_is_canonical(self):
        """Test formatting reproduces the canonical text."""
        inst = parse_instance(P3_TEXT)
        assert format_instance(inst) == "p cvc 3 2\nw 1 0\nw 2 1\nw 3 0\ne 1 2\ne 2 3\n"
        again = parse_instance(format_instance(inst))
        assert again.graph.edges == inst.graph.edges
        assert again.weight == inst.weight

    def test_hash_ignores_comments(self):
        """Test the hash depends on content, not comments or order."""
        a = parse_instance(P3_TEXT)
        b = parse_instance("p cvc 3 2\ne 2 3\ne 1 2\nw 2 1\n")
        assert instance_hash(a) == instance_hash(b)
        assert len(instance_hash(a)) == 64

    def test_read_instance(self, tmp_path):
        """Test reading from disk."""
        path = tmp_path / "p3.cvc"
        path.write_text(P3_TEXT)
        assert read_instance(path).graph.m == 2


class TestParseTd:
    """Tests for PACE tree decompositions."""

    def test_parse(self):
        """Test parsing bags and tree edges."""
        td = parse_td("c path\ns td 2 2 3\nb 1 1 2\nb 2 2 3\n1 2\n")
        assert td.bags == {1: frozenset({1, 2}), 2: frozenset({2, 3})}
        assert td.tree_edges == ((1, 2),)
        assert td.width == 1

    def test_bag_count_mismatch(self):
        """Test the header bag count is enforced."""
        with pytest.raises(DecompositionFormatError):
            parse_td("s td 3 2 3\nb 1 1 2\nb 2 2 3\n1 2\n")

    def test_declared_width_exceeded(self):
        """Test bags larger than width+1 are rejected."""
        with pytest.raises(DecompositionFormatError):
            parse_td("s td 1 2 3\nb 1 1 2 3\n")

    def test_unknown_bag_in_edge(self):
        """Test tree edges must name declared bags."""
        with pytest.raises(DecompositionFormatError):
            parse_td("s td 1 2 2\nb 1 1 2\n1 2\n")

    def test_empty_bag(self):
        """Test a bag line with only an id is an empty bag."""
        td = parse_td("s td 1 0 0\nb 1\n")
        assert td.bags == {1: frozenset()}

    def test_format_then_parse(self):
        """Test the writer output parses to the same decomposition."""
        td = TreeDecomposition({1: frozenset({1, 2}), 2: frozenset({2, 3})}, ((1, 2),))
        text = format_td(td, 3)
        assert text.startswith("s td 2 2 3\n")
        assert parse_td(text) == td
