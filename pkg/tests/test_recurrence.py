"""
Tests for recursive family specs and the transfer-matrix solver.
"""

from collections import defaultdict

import networkx as nx
import pytest

from c2lab.config import Settings
from c2lab.exceptions import (
    EdgeCountError,
    ExperimentalFeatureError,
    FamilySpecError,
    PreconditionError,
    StateHygieneError,
    StateOverflowError,
    TemplateError,
)
from c2lab.families import decomplete, gen_circulant
from c2lab.recurrence import (
    RecursiveFamilySpec,
    VertexRef,
    builtin_families,
    compile_template,
    direct_c2,
    materialize,
    process_layers,
    seed_states,
    solve_family,
    transfer_matrix,
    validate_family,
)

MINIMAL = """
format = 1
name = "tiny"

[base]
vertices = 2
edges = [[0, 1]]

[layer]
width = 1
r = 1
edges = [["L0:0", "L1:0"]]
"""


@pytest.fixture
def nonskew():
    return compile_template(RecursiveFamilySpec.builtin("nonskew_3grid"))


@pytest.fixture
def skew():
    return compile_template(RecursiveFamilySpec.builtin("skew_c3k_1_3"))


@pytest.fixture
def zigzag():
    return compile_template(RecursiveFamilySpec.builtin("zigzag"))


def _isomorphic(a, b) -> bool:
    return nx.is_isomorphic(a.to_networkx(), b.to_networkx())


class TestSpecFile:
    """Test reading family specs."""

    def test_builtin_names(self):
        """Test the shipped families are listed."""
        assert builtin_families() == ["nonskew_3grid", "skew_c3k_1_3", "zigzag"]

    def test_unknown_builtin(self):
        """Test a missing built-in family."""
        with pytest.raises(FamilySpecError):
            RecursiveFamilySpec.builtin("nope")

    def test_minimal_defaults(self):
        """Test optional fields take their defaults."""
        spec = RecursiveFamilySpec.from_toml(MINIMAL)

        assert spec.layer.stride == 1
        assert spec.layer.deletions == []
        assert spec.boundary.vertices is None

    def test_unknown_key(self):
        """Test unknown top-level keys are rejected."""
        with pytest.raises(FamilySpecError):
            RecursiveFamilySpec.from_toml('extra = "x"\n' + MINIMAL)

    def test_bad_toml(self):
        """Test syntax errors are reported as spec errors."""
        with pytest.raises(FamilySpecError):
            RecursiveFamilySpec.from_toml("format = = 1")

    def test_load_from_path(self, family_data):
        """Test loading a spec file from disk."""
        spec = RecursiveFamilySpec.load(family_data / "path.toml")

        assert spec.name == "path"


class TestTemplate:
    """Test template compilation and derived constants."""

    def test_vertex_refs(self):
        """Test parsing vertex references."""
        assert VertexRef.parse("L1:2") == VertexRef(1, 2)
        assert VertexRef.parse("B:0") == VertexRef(None, 0)
        assert str(VertexRef(2, 0)) == "L2:0"
        with pytest.raises(TemplateError):
            VertexRef.parse("X:1")

    def test_grid_constants(self, nonskew):
        """Test window and base level of the 3-grid."""
        assert nonskew.transient == frozenset({6, 7})
        assert nonskew.window == 1
        assert nonskew.base_level == 4

    def test_zigzag_constants(self, zigzag):
        """Test window and base level of the zigzag."""
        assert zigzag.max_depth == 2
        assert zigzag.window == 2
        assert zigzag.base_level == 7

    def test_self_loop(self):
        """Test template self-loops are rejected."""
        text = MINIMAL.replace('["L0:0", "L1:0"]', '["L0:0", "L0:0"]')

        with pytest.raises(TemplateError):
            compile_template(RecursiveFamilySpec.from_toml(text))

    def test_reach_beyond_r(self):
        """Test references deeper than r are rejected."""
        text = MINIMAL.replace('"L1:0"', '"L2:0"')

        with pytest.raises(TemplateError):
            compile_template(RecursiveFamilySpec.from_toml(text))

    def test_boundary_mismatch(self):
        """Test a declared boundary must match the window."""
        text = MINIMAL + '\n[boundary]\nvertices = ["B:0", "L0:0"]\n'

        with pytest.raises(TemplateError):
            compile_template(RecursiveFamilySpec.from_toml(text))

    def test_bad_deletion_offset(self, family_data):
        """Test deletions reaching further back than r."""
        with pytest.raises(TemplateError):
            compile_template(RecursiveFamilySpec.load(family_data / "bad_deletion_offset.toml"))

    def test_offset_labels(self, zigzag):
        """Test encoding is level independent and invertible."""
        top = 9
        for v in (0, 1, zigzag.layer_vertex(9, 0), zigzag.layer_vertex(8, 0)):
            assert zigzag.decode(zigzag.encode(v, top), top) == v
        assert zigzag.encode(zigzag.layer_vertex(9, 0), 9) == zigzag.encode(zigzag.layer_vertex(5, 0), 5)

    def test_encode_outside_window(self, nonskew):
        """Test vertices below the window cannot be encoded."""
        with pytest.raises(StateHygieneError):
            nonskew.encode(nonskew.layer_vertex(1, 0), 3)


class TestMembers:
    """Test building family members."""

    def test_grid_member(self, nonskew, grid_333):
        """Test G_2 of the 3-grid is the decompleted (3, 0, 3) grid."""
        member = materialize(nonskew, 2)

        assert member.graph.vertex_count == 8
        assert member.graph.edge_count == 14
        assert _isomorphic(member.graph, grid_333)

    @pytest.mark.parametrize("n", [2, 3, 4])
    def test_skew_members_are_circulants(self, skew, n):
        """Test the skew family gives decompleted C_3k(1, 3)."""
        expected = decomplete(gen_circulant(3 * (n + 1), [1, 3]))

        assert _isomorphic(materialize(skew, n).graph, expected)

    @pytest.mark.parametrize("n", [2, 3, 5])
    def test_zigzag_members(self, zigzag, n):
        """Test the zigzag family gives decompleted C_n(1, 2)."""
        expected = decomplete(gen_circulant(n + 3, [1, 2]))

        assert _isomorphic(materialize(zigzag, n).graph, expected)

    def test_permanent_part(self, nonskew):
        """Test X_n drops transient edges of the layers."""
        full = materialize(nonskew, 3)
        permanent = materialize(nonskew, 3, permanent_only=True)

        assert permanent.graph.edge_count == full.graph.edge_count - len(full.transient_edge_ids())
        assert not any(permanent.transient)

    def test_provenance(self, nonskew):
        """Test every edge of the top layer is traced to it."""
        member = materialize(nonskew, 3)

        assert [member.provenance[e] for e in member.layer_edge_ids(3)] == [(3, t) for t in range(8)]

    def test_negative_index(self, nonskew):
        """Test negative member indices are rejected."""
        with pytest.raises(PreconditionError):
            materialize(nonskew, -1)


class TestValidation:
    """Test family validation."""

    @pytest.mark.parametrize("name", ["nonskew_3grid", "skew_c3k_1_3", "zigzag"])
    def test_builtins_validate(self, name):
        """Test the shipped families pass every check."""
        assert validate_family(RecursiveFamilySpec.builtin(name)).name == name

    @pytest.mark.parametrize("name", ["torus_undecompleted", "path"])
    def test_edge_count(self, family_data, name):
        """Test families violating 2|V| = |E| + 2."""
        with pytest.raises(EdgeCountError):
            validate_family(RecursiveFamilySpec.load(family_data / f"{name}.toml"))


class TestTransfer:
    """Test seeds and transfer matrices."""

    def test_odd_p_is_experimental(self, zigzag):
        """Test odd characteristic needs the experimental flag."""
        with pytest.raises(ExperimentalFeatureError):
            seed_states(zigzag, 3, Settings(experimental_odd_p=False))

    def test_seed(self, zigzag):
        """Test the seed sits one level above the base level."""
        seed = seed_states(zigzag, 2)

        assert seed.level == 8
        assert seed.states
        assert all(c == 1 for c in seed.states.values())

    def test_two_layers_compose(self, zigzag):
        """Test processing two layers at once equals two single-layer steps."""
        level = zigzag.base_level + 2

        for state in sorted(seed_states(zigzag, 2).states):
            stepped = defaultdict(int)
            for middle, coeff in process_layers(zigzag, state, 2, level).items():
                for image, inner in process_layers(zigzag, middle, 2, level - 1).items():
                    stepped[image] += coeff * inner
            expected = {s: c % 2 for s, c in stepped.items() if c % 2}

            assert process_layers(zigzag, state, 2, level, layers=2) == expected

    def test_state_cap(self, nonskew):
        """Test discovery stops at the state cap."""
        with pytest.raises(StateOverflowError):
            transfer_matrix(nonskew, 2, settings=Settings(state_cap=1))

    def test_matrix_shape(self, zigzag):
        """Test the system is square and predicts the first member above the base."""
        system = transfer_matrix(zigzag, 2)
        size = len(system.states)

        assert system.matrix.rows == system.matrix.cols == size
        assert len(system.seed) == len(system.functional) == size
        assert system.predicted(0, 2) == direct_c2(materialize(zigzag, 8).graph, 2, Settings()).value


class TestSolve:
    """Test solving families."""

    def test_direct_falls_back_to_brute(self, triangle, settings):
        """Test graphs outside the formula range use brute force."""
        result = direct_c2(triangle, 2, settings)

        assert result.method == "brute"
        assert result.value == 1

    def test_zigzag(self, zigzag):
        """Test zigzags have c2 = 1 mod 2."""
        solution = solve_family(zigzag, 2)

        assert solution.period == [1]
        assert solution.value_at_index(5) == 1
        assert all(v.predicted in (None, v.direct) for v in solution.verified)
        assert solution.verified[-1].n >= solution.base_level + 3

    @pytest.mark.slow
    def test_skew_parity(self, skew):
        """Test c2 of C_3k(1, 3) minus a vertex is k mod 2."""
        solution = solve_family(skew, 2)

        assert solution.offset == 1
        assert solution.preperiod == []
        assert solution.period == [0, 1]
        assert solution.state_count == 72
        for n in range(solution.offset, 12):
            assert solution.value_at(n) == (n + 1) % 2

    @pytest.mark.slow
    def test_nonskew_grid(self, nonskew):
        """Test the 3-grid recurrence agrees with every direct value."""
        solution = solve_family(nonskew, 2)

        assert solution.offset == 1
        assert solution.preperiod == []
        assert solution.period == [0]
        assert solution.state_count == 56
        assert all(v.predicted == v.direct for v in solution.verified if v.predicted is not None)
        assert solution.value_at(2) == solution.verified[2 - solution.offset].direct
