"""Shared fixtures: the worked two-object examples used across the suite,
plus the terminal section echoing the acceptance criteria results."""

from __future__ import annotations

import pytest

from sqpo import Graph, Hierarchy, Homomorphism, Rule, identity

ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


@pytest.fixture
def merge_add_setup():
    """Two colour types, four instances; rule merges one white with one
    black circle and adds two squares that should share a type."""
    t = Graph(
        ["w", "b"],
        node_attrs={"w": {"colour": ["white"]}, "b": {"colour": ["black"]}},
    )
    g = Graph(
        ["w1", "w2", "b1", "b2"],
        node_attrs={
            "w1": {"colour": ["white"]},
            "w2": {"colour": ["white"]},
            "b1": {"colour": ["black"]},
            "b2": {"colour": ["black"]},
        },
    )
    typing = Homomorphism(g, t, {"w1": "w", "w2": "w", "b1": "b", "b2": "b"})
    hierarchy = (
        Hierarchy().add_object("G", g).add_object("T", t).add_typing("G", "T", typing)
    )
    lhs = Graph(
        ["cw", "cb"],
        node_attrs={"cw": {"colour": ["white"]}, "cb": {"colour": ["black"]}},
    )
    rhs = Graph(
        ["cwb", "s1", "s2"], node_attrs={"cwb": {"colour": ["white", "black"]}}
    )
    rule = Rule(
        lhs, lhs, rhs, identity(lhs), Homomorphism(lhs, rhs, {"cw": "cwb", "cb": "cwb"})
    )
    return hierarchy, rule


@pytest.fixture
def clone_delete_setup():
    """A circle and a square type with two instances each; rule deletes the
    circle type and clones the square type into two refinements."""
    t = Graph(
        ["circ", "sq"],
        node_attrs={"circ": {"shape": ["circle"]}, "sq": {"shape": ["square"]}},
    )
    g = Graph(
        ["c1", "c2", "q1", "q2"],
        node_attrs={
            "c1": {"shape": ["circle"]},
            "c2": {"shape": ["circle"]},
            "q1": {"shape": ["square"]},
            "q2": {"shape": ["square"]},
        },
    )
    typing = Homomorphism(g, t, {"c1": "circ", "c2": "circ", "q1": "sq", "q2": "sq"})
    hierarchy = (
        Hierarchy().add_object("G", g).add_object("T", t).add_typing("G", "T", typing)
    )
    lhs = Graph(
        ["circ", "sq"],
        node_attrs={"circ": {"shape": ["circle"]}, "sq": {"shape": ["square"]}},
    )
    iface = Graph(
        ["sq_w", "sq_b"],
        node_attrs={"sq_w": {"shape": ["square"]}, "sq_b": {"shape": ["square"]}},
    )
    rule = Rule(
        lhs,
        iface,
        iface,
        Homomorphism(iface, lhs, {"sq_w": "sq", "sq_b": "sq"}),
        identity(iface),
    )
    return hierarchy, rule
