import numpy as np
import pytest

from hyperprofile import (
    DataFormatError,
    Hyperprofile,
    NodeSpec,
    TaskSpec,
    ValidationError,
    build_base_profile,
    build_hyperprofile,
    max_normalized,
    read_fleet_csv,
    read_profile_csv,
    write_profile_csv,
)

ENERGY_AT_1000_1E6 = 6.110704167061695
TIME_AT_1000_1E6 = 8040332487.445837


def fleet(*bandwidths):
    return [NodeSpec(node_id=f"node{i}", bandwidth_kbps=b) for i, b in enumerate(bandwidths)]


class TestBuildHyperprofile:
    def test_single_node_coordinates(self, reference_model):
        profile = build_hyperprofile(fleet(1000.0), TaskSpec(data_size_bytes=1e6), reference_model)
        assert profile.kind == "hyper"
        assert profile.dimensions == ("energy_j", "time_ns")
        assert profile.coords[0, 0] == pytest.approx(ENERGY_AT_1000_1E6, rel=1e-12)
        assert profile.coords[0, 1] == pytest.approx(TIME_AT_1000_1E6, rel=1e-12)

    def test_identical_bandwidths_identical_coordinates(self, reference_model):
        profile = build_hyperprofile(fleet(800.0, 800.0), TaskSpec(data_size_bytes=5e5), reference_model)
        assert np.array_equal(profile.coords[0], profile.coords[1])
        assert profile.node_ids[0] != profile.node_ids[1]

    def test_higher_bandwidth_dominates_at_large_payloads(self, reference_model):
        # Componentwise dominance needs the payload-proportional term to
        # outweigh the growth of the time overhead between neighboring
        # bandwidths; at 1 MB it does across the whole default grid.
        bandwidths = (250.0, 500.0, 1000.0, 2000.0, 4000.0, 8000.0, 15000.0)
        profile = build_hyperprofile(fleet(*bandwidths), TaskSpec(data_size_bytes=1e6), reference_model)
        coords = profile.coords
        for i in range(len(bandwidths) - 1):
            for j in range(i + 1, len(bandwidths)):
                assert coords[j, 0] < coords[i, 0]
                assert coords[j, 1] < coords[i, 1]

    def test_dominance_fails_for_tiny_payloads(self, reference_model):
        # At 60 kB the exponential time overhead grows faster than the
        # per-byte term shrinks between 8 and 15 Mbps, so the faster link
        # is predicted to take longer overall. Documents the boundary.
        profile = build_hyperprofile(
            fleet(8000.0, 15000.0), TaskSpec(data_size_bytes=6e4), reference_model
        )
        assert profile.coords[1, 1] > profile.coords[0, 1]

    def test_coordinates_strictly_positive(self, reference_model):
        profile = build_hyperprofile(
            fleet(250.0, 15000.0), TaskSpec(data_size_bytes=6e4), reference_model
        )
        assert np.all(profile.coords > 0)

    def test_empty_fleet_rejected(self, reference_model):
        with pytest.raises(ValidationError, match="empty fleet"):
            build_hyperprofile([], TaskSpec(data_size_bytes=1e6), reference_model)

    def test_permuting_nodes_permutes_points_only(self, reference_model):
        task = TaskSpec(data_size_bytes=2e6)
        nodes = fleet(500.0, 1000.0, 4000.0)
        forward = build_hyperprofile(nodes, task, reference_model)
        backward = build_hyperprofile(list(reversed(nodes)), task, reference_model)
        by_id_fwd = dict(zip(forward.node_ids, map(tuple, forward.coords)))
        by_id_bwd = dict(zip(backward.node_ids, map(tuple, backward.coords)))
        assert by_id_fwd == by_id_bwd


class TestBuildBaseProfile:
    def test_copies_metrics_in_order(self):
        nodes = [
            NodeSpec("a", 1000.0, static_metrics={"cpu_load": 0.2}),
            NodeSpec("b", 1000.0, static_metrics={"cpu_load": 0.7}),
        ]
        profile = build_base_profile(nodes, ["cpu_load"])
        assert profile.kind == "base"
        assert profile.dimensions == ("cpu_load",)
        assert profile.coords[:, 0].tolist() == [0.2, 0.7]

    def test_missing_metric_names_node_and_metric(self):
        nodes = [
            NodeSpec("a", 1000.0, static_metrics={"cpu_load": 0.2}),
            NodeSpec("b", 1000.0, static_metrics={}),
        ]
        with pytest.raises(ValidationError) as excinfo:
            build_base_profile(nodes, ["cpu_load"])
        message = str(excinfo.value)
        assert "b" in message and "cpu_load" in message

    def test_empty_metric_list_rejected(self):
        with pytest.raises(ValidationError, match="at least one dimension"):
            build_base_profile([NodeSpec("a", 1000.0, static_metrics={"x": 1.0})], [])

    def test_multi_metric_ordering(self):
        nodes = [NodeSpec("a", 1000.0, static_metrics={"x": 1.0, "y": 2.0})]
        profile = build_base_profile(nodes, ["y", "x"])
        assert profile.coords[0].tolist() == [2.0, 1.0]


class TestHyperprofileInvariants:
    def test_coordinate_width_must_match_dimensions(self):
        with pytest.raises(ValidationError, match="shape"):
            Hyperprofile(("x", "y"), ("a",), np.array([[1.0, 2.0, 3.0]]), "base")

    def test_node_ids_must_be_unique(self):
        with pytest.raises(ValidationError, match="unique"):
            Hyperprofile(("x",), ("a", "a"), np.array([[1.0], [2.0]]), "base")

    def test_negative_coordinates_rejected(self):
        with pytest.raises(ValidationError, match="nonnegative"):
            Hyperprofile(("x",), ("a",), np.array([[-0.5]]), "base")

    def test_coords_are_read_only(self):
        profile = Hyperprofile(("x",), ("a",), np.array([[1.0]]), "base")
        with pytest.raises(ValueError):
            profile.coords[0, 0] = 2.0

    def test_points_view(self):
        profile = Hyperprofile(("x", "y"), ("a", "b"), np.array([[1.0, 2.0], [3.0, 4.0]]), "base")
        points = profile.points
        assert points[0].node_id == "a"
        assert points[1].coords == (3.0, 4.0)

    def test_invalid_kind_rejected(self):
        with pytest.raises(ValidationError, match="kind"):
            Hyperprofile(("x",), ("a",), np.array([[1.0]]), "profile")


class TestMaxNormalization:
    def test_scales_each_dimension_to_unit_max(self):
        profile = Hyperprofile(
            ("x", "y"), ("a", "b"), np.array([[2.0, 10.0], [4.0, 5.0]]), "base"
        )
        normalized = max_normalized(profile)
        assert normalized.coords.max(axis=0).tolist() == [1.0, 1.0]
        assert normalized.coords[0].tolist() == [0.5, 1.0]

    def test_zero_dimension_left_unchanged(self):
        profile = Hyperprofile(("x", "y"), ("a", "b"), np.array([[0.0, 1.0], [0.0, 2.0]]), "base")
        normalized = max_normalized(profile)
        assert normalized.coords[:, 0].tolist() == [0.0, 0.0]

    def test_preserves_ids_and_order(self):
        profile = Hyperprofile(("x",), ("b", "a"), np.array([[1.0], [3.0]]), "base")
        normalized = max_normalized(profile)
        assert normalized.node_ids == ("b", "a")


class TestProfileCsv:
    def test_round_trip(self, reference_model, tmp_path):
        profile = build_hyperprofile(
            fleet(500.0, 1000.0, 2000.0), TaskSpec(data_size_bytes=1e6), reference_model
        )
        path = tmp_path / "profile.csv"
        write_profile_csv(profile, path)
        loaded = read_profile_csv(path)
        assert loaded.dimensions == profile.dimensions
        assert loaded.node_ids == profile.node_ids
        assert np.array_equal(loaded.coords, profile.coords)

    def test_header_names_dimensions(self, tmp_path):
        profile = Hyperprofile(("cpu_load",), ("a",), np.array([[0.4]]), "base")
        path = tmp_path / "profile.csv"
        write_profile_csv(profile, path)
        assert path.read_text().splitlines()[0] == "node_id,cpu_load"

    def test_bad_header_rejected(self, tmp_path):
        path = tmp_path / "profile.csv"
        path.write_text("id,x\na,1\n")
        with pytest.raises(DataFormatError, match="header"):
            read_profile_csv(path)


class TestFleetCsv:
    def test_parses_with_and_without_header(self, tmp_path):
        with_header = tmp_path / "fleet1.csv"
        with_header.write_text("node_id,bandwidth_kbps\nalpha,1000\nbeta,2000\n")
        bare = tmp_path / "fleet2.csv"
        bare.write_text("alpha,1000\nbeta,2000\n")
        for path in (with_header, bare):
            nodes = read_fleet_csv(path)
            assert [n.node_id for n in nodes] == ["alpha", "beta"]
            assert [n.bandwidth_kbps for n in nodes] == [1000.0, 2000.0]

    def test_parses_static_metrics(self, tmp_path):
        path = tmp_path / "fleet.csv"
        path.write_text("alpha,1000,cpu_load=0.25;memory_gb=8\n")
        (node,) = read_fleet_csv(path)
        assert node.static_metrics == {"cpu_load": 0.25, "memory_gb": 8.0}

    def test_duplicate_ids_rejected(self, tmp_path):
        path = tmp_path / "fleet.csv"
        path.write_text("alpha,1000\nalpha,2000\n")
        with pytest.raises(DataFormatError, match="duplicate"):
            read_fleet_csv(path)

    def test_bad_bandwidth_reports_line(self, tmp_path):
        path = tmp_path / "fleet.csv"
        path.write_text("alpha,1000\nbeta,fast\n")
        with pytest.raises(DataFormatError, match="line 2"):
            read_fleet_csv(path)

    def test_bad_metric_syntax_rejected(self, tmp_path):
        path = tmp_path / "fleet.csv"
        path.write_text("alpha,1000,cpu_load\n")
        with pytest.raises(DataFormatError, match="name=value"):
            read_fleet_csv(path)

    def test_empty_fleet_rejected(self, tmp_path):
        path = tmp_path / "fleet.csv"
        path.write_text("node_id,bandwidth_kbps\n")
        with pytest.raises(DataFormatError, match="no nodes"):
            read_fleet_csv(path)


class TestSpecs:
    def test_task_requires_positive_payload(self):
        with pytest.raises(ValidationError):
            TaskSpec(data_size_bytes=0.0)

    def test_task_requires_positive_partitions(self):
        with pytest.raises(ValidationError):
            TaskSpec(data_size_bytes=1.0, partitions=0)

    def test_node_requires_positive_bandwidth(self):
        with pytest.raises(ValidationError):
            NodeSpec("a", 0.0)

    def test_node_requires_nonempty_id(self):
        with pytest.raises(ValidationError):
            NodeSpec("", 100.0)
