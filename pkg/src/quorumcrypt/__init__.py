"""Threshold cryptography as a distributed service.

The package is layered the same way a node is: ``groups`` and ``schemes``
hold the cryptography, ``protocols`` and ``orchestration`` run threshold
protocol instances, ``network`` moves protocol messages between nodes,
``service`` exposes the node over HTTP and ``bench`` measures it.
"""

__version__ = "0.1.0"
