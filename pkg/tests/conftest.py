import warnings

import pytest

from crimecat import classifiers as C
from crimecat.corpus import split as split_corpus
from crimecat.smoke import separable_corpus

warnings.filterwarnings("ignore", message=".*nested tensors.*")


@pytest.fixture(scope="session")
def separable_split():
    corpus = separable_corpus(3, 50, seed=7)
    return split_corpus(corpus, 0.2, seed=1)


@pytest.fixture(scope="session")
def trained_mini(separable_split):
    spec = C.ModelSpec(model_id="mini")
    config = C.TrainingConfig(learning_rate=1e-3, batch_size=16, max_epochs=5, seed=0)
    model, history = C.train(separable_split, spec, config)
    return model, history
