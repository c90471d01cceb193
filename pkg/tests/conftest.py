import pytest

from triform.examples import (
    media_core_graph,
    media_graph,
    media_mutations,
    media_pg_rules,
    media_shacl_rules,
    media_shex_rules,
)


@pytest.fixture(scope="session")
def g_media_core():
    return media_core_graph()


@pytest.fixture(scope="session")
def g_media():
    return media_graph()


@pytest.fixture(scope="session")
def shacl_c1_c5():
    return media_shacl_rules()


@pytest.fixture(scope="session")
def shex_c1_c5():
    return media_shex_rules()


@pytest.fixture(scope="session")
def pg_c1_c5():
    return media_pg_rules()


@pytest.fixture(scope="session")
def mutations():
    return media_mutations()
