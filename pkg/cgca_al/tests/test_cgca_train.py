import numpy as np
import pytest
import torch

import cgca_al as c


@pytest.fixture(scope="module")
def short_run(spec, dataset):
    train_set, test_sets = dataset
    model = c.CgcaAl(spec)
    config = c.TrainConfig(max_epochs=5, patience=3, seed=0)
    result = c.train(model, train_set, config)
    return model, result, train_set, test_sets


class TestTraining:
    def test_loss_decreases_after_first_epoch(self, short_run):
        _, result, _, _ = short_run
        losses = [h["train_loss"] for h in result.history]
        assert losses[1] < losses[0]

    def test_history_is_complete(self, short_run):
        _, result, _, _ = short_run
        assert result.epochs_run == len(result.history)
        assert 1 <= result.best_epoch <= result.epochs_run
        for h in result.history:
            assert set(h) == {"epoch", "train_loss", "val_loss", "val_f1"}

    def test_reproducible_given_seed(self, spec, dataset):
        train_set, _ = dataset
        losses = []
        for _ in range(2):
            torch.manual_seed(7)           # seeds the parameter init
            model = c.CgcaAl(spec)
            res = c.train(model, train_set,
                          c.TrainConfig(max_epochs=2, patience=2, seed=7))
            losses.append([h["train_loss"] for h in res.history])
        assert losses[0] == losses[1]

    def test_early_stopping_respects_patience(self, spec, dataset):
        train_set, _ = dataset
        model = c.CgcaAl(spec)
        res = c.train(model, train_set,
                      c.TrainConfig(max_epochs=300, patience=2, seed=0))
        assert res.epochs_run <= res.best_epoch + 2
        assert res.epochs_run < 300

    def test_predictions_clipped(self, short_run):
        model, _, train_set, _ = short_run
        y = c.predict(model, train_set.features[:16])
        assert y.shape == (16, 8)
        assert y.min() >= 0.0 and y.max() <= 1.0


class TestF1:
    def test_perfect_and_degenerate_cases(self):
        one = torch.ones(4, dtype=torch.int)
        zero = torch.zeros(4, dtype=torch.int)
        assert c.f1_score(one, one) == 1.0
        assert c.f1_score(zero, zero) == 1.0   # no positives anywhere
        assert c.f1_score(one, zero) == 0.0
        assert c.f1_score(zero, one) == 0.0

    def test_hand_counted(self):
        pred = torch.tensor([1, 0, 1, 0])
        true = torch.tensor([1, 1, 0, 0])
        assert c.f1_score(pred, true) == 0.5


class TestPriorForScenario:
    def test_matches_batch_prediction(self, workspace, spec, short_run):
        import json
        model, _, _, _ = short_run
        line = (workspace / "ds" / "test_F1.ndjson").read_text().splitlines()[0]
        rec = json.loads(line)
        y = c.prior_for_scenario(model, spec, rec)
        feats = torch.from_numpy(c.scenario_features(rec, spec)).unsqueeze(0)
        assert np.allclose(y, c.predict(model, feats)[0])
