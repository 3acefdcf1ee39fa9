"""layercast: recovery models and resource allocation for layered network-coded multicast."""

from .message import LayeredMessage

__version__ = "0.1.0"

__all__ = ["LayeredMessage", "__version__"]
