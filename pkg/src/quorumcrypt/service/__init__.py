"""Service layer: the node process, its RPC interface and the dealer."""

from .client import Client, RpcClientError, result_bytes
from .dealer import deal
from .node import Node, run_node, serve

__all__ = ["Client", "Node", "RpcClientError", "deal", "result_bytes", "run_node", "serve"]
