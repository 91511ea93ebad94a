"""Bundled example data: a seven-node network of controlled mass-spring-damper nodes."""
from importlib import resources

from .io import parse_network
from .network import StructuredNetwork

_NETWORK_JSON = "example_network.json"


def example_network_dir():
    """Directory holding the example network as text files plus manifest."""
    return resources.files("sscnet") / "data" / "example-network"


def example_network() -> StructuredNetwork:
    text = (resources.files("sscnet") / "data" / _NETWORK_JSON).read_text(encoding="utf-8")
    return parse_network(text, _NETWORK_JSON)
