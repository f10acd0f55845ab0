import numpy as np
import pytest

from unelisa.baselines import dawid_skene, majority_vote, sml
from unelisa.model import StructuralError

from test_predict import make_expert_data


class TestMajorityVote:
    def test_basic_rows(self):
        values = np.array([[1, 1, -1], [-1, -1, -1]], dtype=int)
        result = majority_vote(values)
        assert list(result.labels) == [1, -1]
        assert result.scores[0] == pytest.approx(2 / 3)

    def test_tie_goes_positive(self):
        result = majority_vote(np.array([[1, -1]], dtype=int))
        assert result.labels[0] == 1

    def test_row_order_equivariance(self):
        rng = np.random.Generator(np.random.PCG64(1))
        values = rng.choice([-1, 1], size=(40, 5))
        perm = rng.permutation(40)
        a = majority_vote(values)
        b = majority_vote(values[perm])
        assert np.array_equal(a.labels[perm], b.labels)


class TestDawidSkene:
    def test_replicated_perfect_classifier(self):
        base, truth = make_expert_data(2, n=1000, psis=(1.0,), pi=0.5)
        values = np.repeat(base, 3, axis=1)
        result, params = dawid_skene(values)
        assert float(np.mean(result.labels == truth)) == 1.0
        for s in (1, 2, 3):
            assert params.sensitivity[s] == pytest.approx(1 - 1e-6, abs=1e-8)
            assert params.specificity[s] == pytest.approx(1 - 1e-6, abs=1e-8)

    def test_random_classifiers_near_chance(self):
        rng = np.random.Generator(np.random.PCG64(3))
        values = rng.choice([-1, 1], size=(2000, 5))
        truth = rng.choice([-1, 1], size=2000)
        result, _ = dawid_skene(values)
        assert float(np.mean(result.labels == truth)) == pytest.approx(0.5, abs=0.05)

    def test_single_classifier_copies_up_to_flip(self):
        values, truth = make_expert_data(4, n=500, psis=(0.9,), pi=0.5)
        result, _ = dawid_skene(values)
        agree = float(np.mean(result.labels == values[:, 0]))
        assert agree in (0.0, 1.0)

    def test_log_likelihood_monotone(self):
        values, _ = make_expert_data(5, n=800, psis=(0.9, 0.7, 0.6), pi=0.6)
        _, params = dawid_skene(values)
        diffs = np.diff(np.array(params.log_likelihood_history))
        assert diffs.min() >= -1e-10

    def test_mixed_reliabilities_recovered(self):
        values, truth = make_expert_data(6, n=20_000, psis=(0.95, 0.8, 0.3), pi=0.5)
        result, params = dawid_skene(values)
        assert float(np.mean(result.labels == truth)) > 0.9
        assert params.sensitivity[1] == pytest.approx(0.95, abs=0.03)
        # anti-correlated classifier shows up as uninformative-or-flipped
        assert params.sensitivity[3] + params.specificity[3] - 1 < 0


class TestSML:
    def test_needs_three_columns(self):
        with pytest.raises(StructuralError):
            sml(np.ones((10, 2), dtype=int))

    def test_sampled_weights_ordered_like_population_oracle(self):
        # accuracies (0.9, 0.8, 0.6) at balanced prior: population covariance
        # is rank-one off the diagonal with vector (0.8, 0.6, 0.2), so the
        # fitted weights must come out ordered and positive
        from unelisa.baselines import rank_one_weights

        values, truth = make_expert_data(8, n=20_000, psis=(0.9, 0.8, 0.6), pi=0.5)
        v = rank_one_weights(np.cov(values.astype(float), rowvar=False))
        assert v[0] > v[1] > v[2] > 0
        result = sml(values)
        acc = float(np.mean(result.labels == truth))
        assert acc > 0.85
        assert acc >= float(np.mean(values[:, 2] == truth))  # beats the worst expert

    def test_rank_one_completion_on_population_covariance(self):
        from unelisa.baselines import rank_one_weights

        b = np.array([0.8, 0.6, 0.2])
        want = b / np.linalg.norm(b)
        # the exactly rank-one matrix is a fixpoint of the completion
        exact = np.outer(b, b)
        assert np.allclose(rank_one_weights(exact), want, atol=1e-9)
        # from the observed unit diagonal, 20 passes land close to the
        # population direction with the right ordering
        cov = np.outer(b, b)
        np.fill_diagonal(cov, 1.0)
        v = rank_one_weights(cov)
        assert np.allclose(v, want, atol=0.05)
        assert v[0] > v[1] > v[2] > 0

    def test_duplicated_columns_equal_weights(self):
        from unelisa.baselines import rank_one_weights

        base, _ = make_expert_data(9, n=8000, psis=(0.85,), pi=0.5)
        values = np.column_stack([base, base, base])
        v = rank_one_weights(np.cov(values.astype(float), rowvar=False))
        assert np.abs(v - v.mean()).max() < 1e-6
        result = sml(values)
        assert np.array_equal(result.labels, base[:, 0])

    def test_random_columns_near_chance(self):
        rng = np.random.Generator(np.random.PCG64(11))
        values = rng.choice([-1, 1], size=(2000, 5))
        truth = rng.choice([-1, 1], size=2000)
        result = sml(values)
        assert float(np.mean(result.labels == truth)) == pytest.approx(0.5, abs=0.05)

    def test_degenerate_covariance_falls_back_to_majority(self):
        result = sml(np.ones((20, 3), dtype=int))  # constant columns: zero covariance
        assert "degenerate_covariance" in result.flags
        assert (result.labels == 1).all()

    def test_unit_norm_weights_row_order_equivariance(self):
        values, _ = make_expert_data(12, n=1000, psis=(0.9, 0.7, 0.6), pi=0.5)
        rng = np.random.Generator(np.random.PCG64(13))
        perm = rng.permutation(1000)
        a = sml(values)
        b = sml(values[perm])
        assert np.array_equal(a.labels[perm], b.labels)
