"""Retransmission-free block delivery built on systematic fountain coding.

The package splits into a codec layer (gf256, codec), a wire format
(wire), the two protocol engines (sender, receiver) with their loss
estimator and redundancy planner (estimator, planner), a slotted
simulator with an optimal-ARQ baseline (sim), and transports that run
the real engines over an in-process impaired network or UDP sockets
(transport).  The command line front end lives in cli.
"""

__version__ = "0.1.0"
