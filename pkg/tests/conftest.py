import os
from pathlib import Path

import pytest

from lifedrop.data import FILE_BYTES, TEST_FILE, TRAIN_FILES

from corpusgen import generate_corpus


def _looks_like_cifar(directory: Path) -> bool:
    names = (*TRAIN_FILES, TEST_FILE)
    return all((directory / n).is_file() and (directory / n).stat().st_size == FILE_BYTES
               for n in names)


@pytest.fixture(scope="session")
def cifar_dir(tmp_path_factory) -> Path:
    """Directory with the six batch files: real data if CIFAR10_DIR points
    at it, otherwise a generated look-alike corpus (see corpusgen)."""
    env = os.environ.get("CIFAR10_DIR")
    if env and _looks_like_cifar(Path(env)):
        return Path(env)
    root = tmp_path_factory.mktemp("cifar-like")
    generate_corpus(root)
    return root


@pytest.fixture(scope="session")
def using_real_cifar() -> bool:
    env = os.environ.get("CIFAR10_DIR")
    return bool(env and _looks_like_cifar(Path(env)))
