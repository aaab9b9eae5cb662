import math
import random

import pytest

from skalab.errors import SpecMismatch, TooLarge, UnsupportedField
from skalab.finite_field import build_field_spec, field_for_size
from skalab.incidence_graph import build_plane_graph, count_induced_edges
from skalab.projective_plane import enumerate_plane, incident, sample_flag
from skalab.subplane_cover import (
    Automorphism,
    apply,
    baer_flag_ids,
    baer_subplane,
    build_cover,
    cover_sample_count,
    cover_with_maps,
    det3,
    flag_transitivity_check,
    random_automorphism,
    random_matrix,
    sample_automorphisms,
)


class TestBaerSubplane:
    def test_q9(self):
        q = baer_subplane(9)
        assert (len(q.left), len(q.right)) == (13, 13)
        assert count_induced_edges(build_plane_graph(9), q) == 52

    def test_q25(self):
        q = baer_subplane(25)
        assert (len(q.left), len(q.right)) == (31, 31)
        assert count_induced_edges(build_plane_graph(25), q) == 186

    def test_prime_field_rejected(self):
        with pytest.raises(UnsupportedField):
            baer_subplane(5)

    def test_selected_vertices_have_subfield_coordinates(self):
        plane = enumerate_plane(9)
        q = baer_subplane(9)
        for lid in q.left:
            assert all(c.a1 == 0 for c in plane.lines[lid].coords)
        for pid in set(range(len(plane.points))) - set(q.right):
            assert any(c.a1 != 0 for c in plane.points[pid].coords)


class TestApply:
    def test_identity_fixes_flags(self):
        plane = enumerate_plane(3)
        ident = Automorphism.identity(plane.spec)
        for i in range(len(plane.flag_ids)):
            flag = plane.flag(i)
            assert apply(ident, flag) == flag

    def test_incidence_preserved_exhaustive_q3(self):
        plane = enumerate_plane(3)
        maps = [random_automorphism(3, seed) for seed in range(20)]
        for m in maps:
            for i in range(len(plane.flag_ids)):
                image = apply(m, plane.flag(i))
                assert incident(image.line, image.point)

    def test_inverse_round_trip(self):
        plane = enumerate_plane(9)
        m = random_automorphism(9, seed=5)
        for i in range(0, len(plane.flag_ids), 37):
            flag = plane.flag(i)
            assert apply(m, apply(m.inverse(), flag)) == flag

    def test_spec_mismatch(self):
        m = random_automorphism(9, seed=0)
        flag = enumerate_plane(3).flag(0)
        with pytest.raises(SpecMismatch):
            apply(m, flag)

    def test_inverse_transpose_identity(self):
        # inv^T multiplied against the transpose gives the identity matrix
        m = random_automorphism(9, seed=11)
        spec = m.spec
        prod = [
            [
                sum(
                    (m.inverse_transpose[i][k] * m.matrix[j][k] for k in range(3)),
                    spec.zero(),
                )
                for j in range(3)
            ]
            for i in range(3)
        ]
        for i in range(3):
            for j in range(3):
                want = spec.one() if i == j else spec.zero()
                assert prod[i][j] == want


class TestRandomAutomorphism:
    def test_never_singular(self):
        for seed in range(50):
            assert not det3(random_automorphism(9, seed).matrix).is_zero()

    def test_deterministic(self):
        a = random_automorphism(9, seed=4)
        b = random_automorphism(9, seed=4)
        assert a.matrix == b.matrix

    def test_acceptance_probability_q3(self):
        # fraction of uniform raw matrices that are invertible, vs |GL(3,3)|/3^9
        spec = build_field_spec(3, 1)
        invertible = sum(
            1
            for seed in range(10_000)
            if not det3(random_matrix(spec, random.Random(seed))).is_zero()
        )
        q = 3
        expected = (q**3 - 1) * (q**3 - q) * (q**3 - q**2) / q**9
        assert expected == pytest.approx(11232 / 19683)
        assert abs(invertible / 10_000 - expected) < 0.05


class TestFlagTransitivity:
    def test_q2(self):
        assert flag_transitivity_check(2) is True

    def test_q3(self):
        assert flag_transitivity_check(3) is True

    def test_q9_guard(self):
        with pytest.raises(TooLarge):
            flag_transitivity_check(9)


class TestBuildCover:
    def test_sample_count_formula(self):
        assert cover_sample_count(9, 3.0) == math.ceil(81 * math.log(910)) == 552

    def test_full_coverage_q9(self):
        family = build_cover(9, c=3.0, seed=0)
        assert family.sample_count == 552
        assert family.coverage_fraction == 1.0
        assert family.uncovered_flag_ids == []

    def test_per_map_count_is_baer_flag_count(self):
        family = build_cover(9, c=0.5, seed=2)
        assert set(family.per_map_counts) == {52}

    def test_undersampled_reports_partial_coverage(self):
        family = build_cover(9, c=0.01, seed=0)
        assert family.coverage_fraction < 1.0

    def test_identity_only_family(self):
        ident = Automorphism.identity(field_for_size(9))
        family = cover_with_maps(9, [ident])
        assert family.coverage_fraction == 52 / 910

    def test_coverage_monotone_in_prefix(self):
        maps = sample_automorphisms(9, 30, seed=1)
        prev = 0.0
        for k in (1, 5, 10, 20, 30):
            frac = cover_with_maps(9, maps[:k]).coverage_fraction
            assert frac >= prev
            prev = frac

    def test_threads_match_serial(self):
        maps = sample_automorphisms(9, 40, seed=3)
        serial = cover_with_maps(9, maps, threads=1)
        parallel = cover_with_maps(9, maps, threads=4)
        assert serial.covered == parallel.covered
        assert serial.per_map_counts == parallel.per_map_counts

    def test_prime_field_rejected(self):
        with pytest.raises(UnsupportedField):
            build_cover(5, c=3.0, seed=0)

    def test_report_json_keys(self):
        family = build_cover(9, c=0.05, seed=0)
        data = family.to_json_dict()
        assert set(data) == {"q", "p", "N", "c", "seed", "coverage_fraction", "uncovered_flag_ids"}
        assert data["q"] == 9 and data["p"] == 3


class TestHitRate:
    def test_per_flag_hit_probability(self):
        # one uniform automorphism hits a fixed flag with prob |H0 flags| / |flags|
        plane = enumerate_plane(9)
        base = baer_flag_ids(plane)
        maps = sample_automorphisms(9, 10_000, seed=0)
        fixed = sample_flag(9, seed=0)
        hits = 0
        for m in maps:
            image = apply(m.inverse(), fixed)
            idx = plane.flag_index[
                (plane.line_id[image.line], plane.point_id[image.point])
            ]
            if idx in base:
                hits += 1
        p = 52 / 910
        sigma = math.sqrt(10_000 * p * (1 - p))
        assert abs(hits - 10_000 * p) <= 3 * sigma
