# tests/conftest.py
import os

import django
import pytest
from hypothesis import settings as hypothesis_settings

os.environ.setdefault("DJANGO_SETTINGS_MODULE", "project.settings")

# Initialize Django (so REST_FRAMEWORK, INSTALLED_APPS and AMS_ASSETS_DIR are loaded)
django.setup()

hypothesis_settings.register_profile("ams", deadline=None, max_examples=200)
hypothesis_settings.load_profile("ams")


@pytest.fixture(scope="session")
def assets_dir():
    from django.conf import settings

    return settings.AMS_ASSETS_DIR


@pytest.fixture(scope="session")
def chord_model(assets_dir):
    from apps.harmony.training import corpus_files, train_model

    return train_model(corpus_files(assets_dir / "corpora"))


@pytest.fixture(scope="session")
def theme_library(assets_dir):
    from apps.melody.themes import ThemeLibrary

    return ThemeLibrary.load_directory(assets_dir / "themes")


@pytest.fixture
def engine_config():
    from apps.conductor.config import EngineConfig

    return EngineConfig.load()
