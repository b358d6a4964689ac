import pytest

from qhorder import build_indicator, digraph, directed_cycle, replace


def corpus_hosts():
    return {
        "single-arc": digraph(("u", "v"), [("u", "v")]),
        "path2": digraph(("u", "v", "w"), [("u", "v"), ("v", "w")]),
        "c2": directed_cycle(2),
        "c3": directed_cycle(3),
        "c4": directed_cycle(4),
        "two-arcs": digraph(("u", "v", "s", "t"), [("u", "v"), ("s", "t")]),
    }


@pytest.fixture(scope="session")
def indicator():
    return build_indicator()


@pytest.fixture(scope="session")
def hosts():
    return corpus_hosts()


@pytest.fixture(scope="session")
def replacements(indicator, hosts):
    return {name: replace(h, indicator) for name, h in hosts.items()}
