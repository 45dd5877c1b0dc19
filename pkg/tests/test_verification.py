import numpy as np
import pytest

from vcnn.classifier import LabeledPrototypeSet, Labeling, evaluate_margins
from vcnn.constructions import takacs_arrangement, takacs_shatter
from vcnn.errors import InvalidInputError
from vcnn.verification import (
    SearchConfig,
    search_lower_bound,
    shatter_coefficient_exhaustive,
    verify_shattering,
)


class TestVerifyShattering:
    def test_reports_first_corrupted_labelling(self):
        arr = takacs_arrangement(2)
        bad_bits = 11

        def corrupted(arrangement, labeling):
            witness = takacs_shatter(arrangement, labeling)
            if labeling.bits == bad_bits:
                return LabeledPrototypeSet(witness.prototypes, -witness.labels)
            return witness

        cert = verify_shattering(arr, corrupted)
        assert not cert.verified
        assert cert.first_failure == bad_bits
        assert "misclassifies" in cert.failure_reason or "margin" in cert.failure_reason

    def test_margin_threshold_failure_is_data(self):
        arr = takacs_arrangement(2)
        # an absurd margin demand fails without raising
        cert = verify_shattering(arr, takacs_shatter, mu=10.0)
        assert not cert.verified
        assert cert.first_failure is not None

    def test_desk_scale_guard(self):
        arr = takacs_arrangement(11)  # 24 points
        with pytest.raises(InvalidInputError):
            verify_shattering(arr, takacs_shatter)

    def test_min_margin_recorded(self):
        cert = verify_shattering(takacs_arrangement(2), takacs_shatter)
        assert cert.verified
        margins = [
            float(evaluate_margins(w, cert.arrangement.points)[1].min())
            for w in cert.witnesses.values()
        ]
        assert cert.min_margin == pytest.approx(min(margins))


class TestSearchConfig:
    def test_validation(self):
        with pytest.raises(InvalidInputError):
            SearchConfig(d=0, m=1, n=1)
        with pytest.raises(InvalidInputError):
            SearchConfig(d=2, m=1, n=1, trials=0)
        with pytest.raises(InvalidInputError):
            SearchConfig(d=2, m=1, n=1, mu=0.0)


class TestSearchLowerBound:
    def test_halfplane_case_shatters_three_points(self):
        cfg = SearchConfig(d=2, m=2, n=3, trials=16, point_sets=2, steps=80, rng_seed=0)
        n_found, cert = search_lower_bound(cfg)
        assert n_found == 3
        assert cert is not None and cert.verified
        assert len(cert.witnesses) == 8

    def test_reproducible_bit_for_bit(self):
        cfg = SearchConfig(d=2, m=2, n=3, trials=8, point_sets=1, steps=40, rng_seed=7)
        r1 = search_lower_bound(cfg)
        r2 = search_lower_bound(cfg)
        assert r1[0] == r2[0]
        if r1[1] is not None:
            assert r1[1].min_margin == r2[1].min_margin
            for bits in r1[1].witnesses:
                assert np.array_equal(
                    r1[1].witnesses[bits].prototypes, r2[1].witnesses[bits].prototypes
                )

    def test_witnesses_reverify_without_generator(self):
        cfg = SearchConfig(d=2, m=2, n=3, trials=16, point_sets=2, steps=80, rng_seed=0)
        _, cert = search_lower_bound(cfg)
        for bits, witness in cert.witnesses.items():
            got, margins = evaluate_margins(witness, cert.arrangement.points)
            assert np.all(got == Labeling(bits, 3).to_array())
            assert np.all(margins >= cert.mu)


class TestShatterCoefficient:
    def test_single_prototype_realises_only_constants(self, rng):
        pts = rng.uniform(-1, 1, size=(5, 2))
        cfg = SearchConfig(d=2, m=1, n=5, trials=8, steps=40, rng_seed=3)
        assert shatter_coefficient_exhaustive(pts, 1, cfg) == 2

    def test_collinear_points_with_two_prototypes(self):
        pts = np.array([[0.0, 0.0], [1.0, 0.0], [2.0, 0.0]])
        cfg = SearchConfig(d=2, m=2, n=3, trials=12, steps=60, rng_seed=1)
        # threshold patterns on a line: exactly 6 of the 8 labelings
        assert shatter_coefficient_exhaustive(pts, 2, cfg) == 6

    def test_count_never_exceeds_two_to_the_n(self, rng):
        pts = rng.uniform(-1, 1, size=(4, 2))
        cfg = SearchConfig(d=2, m=3, n=4, trials=8, steps=40, rng_seed=5)
        assert shatter_coefficient_exhaustive(pts, 3, cfg) <= 16

    def test_desk_scale_guard(self, rng):
        pts = rng.uniform(-1, 1, size=(17, 2))
        cfg = SearchConfig(d=2, m=2, n=17, trials=1, steps=1)
        with pytest.raises(InvalidInputError):
            shatter_coefficient_exhaustive(pts, 2, cfg)
