"""Graph-cellular-automaton similarity for urban spatial networks."""

__version__ = "0.1.0"
