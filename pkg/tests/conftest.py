import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


@pytest.fixture(scope="session")
def atlas():
    from arplate.synth import default_atlas

    return default_atlas()


@pytest.fixture(scope="session")
def quick_classifier(atlas, tmp_path_factory):
    """A small but competent classifier shared by pipeline-level tests."""
    from arplate.acr import GlyphClassifier
    from arplate.synth import AugmentParams, gen_char_dataset, load_char_dataset

    data = tmp_path_factory.mktemp("quickcorpus")
    gen_char_dataset(atlas, 25, AugmentParams(seed=401), data)
    X, y = load_char_dataset(data)
    return GlyphClassifier(preset="desk", epochs=12, seed=7).fit(X, y)


@pytest.fixture(scope="session")
def quick_weights_path(quick_classifier, tmp_path_factory):
    path = tmp_path_factory.mktemp("weights") / "quick.acrw"
    quick_classifier.save(path)
    return path
