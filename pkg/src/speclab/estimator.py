"""Scikit-learn style classifier trained with the matrix update rules."""

import numpy as np
from sklearn.base import BaseEstimator, ClassifierMixin
from sklearn.utils.validation import check_is_fitted

from .data import SampleBatch
from .metrics import accuracy_metrics
from .optimizers import EmpiricalCrossEntropy, OptimizerConfig, OptimizerState, step


class SpectrumDescentClassifier(BaseEstimator, ClassifierMixin):
    """Linear softmax classifier fit by a normalized-steepest-descent rule.

    Parameters mirror OptimizerConfig; `rule` picks the geometry ("ngd",
    "signgd", "specgd", momentum variants, "shampoo", "adam"). Training
    minimizes softmax cross-entropy on the given batch, stopping at the
    step budget or when the gradient Frobenius norm falls below
    `stop_grad_norm`. When `eval_set=(X, y)` is passed to fit, balanced and
    worst-class accuracy are tracked every `record_every` steps in
    `history_`.
    """

    def __init__(
        self,
        rule="specgd",
        eta=5e-4,
        beta=0.9,
        steps=10000,
        record_every=10,
        stop_grad_norm=1e-6,
        random_state=0,
    ):
        self.rule = rule
        self.eta = eta
        self.beta = beta
        self.steps = steps
        self.record_every = record_every
        self.stop_grad_norm = stop_grad_norm
        self.random_state = random_state

    def _one_hot(self, y):
        index = {c: i for i, c in enumerate(self.classes_)}
        Y = np.zeros((len(y), len(self.classes_)))
        Y[np.arange(len(y)), [index[c] for c in y]] = 1.0
        return Y

    def fit(self, X, y, eval_set=None):
        X = np.asarray(X, dtype=np.float64)
        y = np.asarray(y)
        self.classes_ = np.unique(y)
        Y = self._one_hot(y)
        n, d = X.shape
        k = len(self.classes_)
        rng = np.random.Generator(np.random.Philox(self.random_state))
        W = rng.standard_normal((k, d)) / np.sqrt(d)

        config = OptimizerConfig(rule=self.rule, eta=self.eta, beta=self.beta)
        provider = EmpiricalCrossEntropy(SampleBatch(X=X, Y=Y, labels=y))
        state = OptimizerState.from_matrix(W)
        eval_batch = None
        if eval_set is not None:
            Xe, ye = eval_set
            eval_batch = SampleBatch(
                X=np.asarray(Xe, dtype=np.float64),
                Y=self._one_hot(ye),
                labels=np.searchsorted(self.classes_, ye),
            )
        self.history_ = []

        def checkpoint(t, gnorm):
            entry = {"step": t, "grad_norm": gnorm}
            if eval_batch is not None:
                acc = accuracy_metrics(state.Ws[0], eval_batch)
                entry["balanced_accuracy"] = acc.balanced
                entry["worst_class_accuracy"] = acc.worst
            self.history_.append(entry)

        for t in range(self.steps):
            G = provider.gradient(state)[0]
            gnorm = float(np.linalg.norm(G))
            if t % self.record_every == 0:
                checkpoint(t, gnorm)
            if gnorm < self.stop_grad_norm:
                break
            state = step(config, state, G)
        checkpoint(state.step, float(np.linalg.norm(provider.gradient(state)[0])))
        self.coef_ = state.Ws[0]
        self.n_iter_ = state.step
        return self

    def decision_function(self, X):
        check_is_fitted(self, "coef_")
        return np.asarray(X, dtype=np.float64) @ self.coef_.T

    def predict(self, X):
        return self.classes_[np.argmax(self.decision_function(X), axis=1)]
