import pytest

from cablesim.fixture import FixtureSpec, generate_fixture, write_bundle


@pytest.fixture(scope="session")
def mini_bundle():
    return generate_fixture(FixtureSpec.mini())


@pytest.fixture(scope="session")
def mini_bundle_dir(tmp_path_factory, mini_bundle):
    out = tmp_path_factory.mktemp("mini_bundle")
    write_bundle(mini_bundle, out)
    return out


@pytest.fixture(scope="session")
def full_bundle():
    return generate_fixture()
