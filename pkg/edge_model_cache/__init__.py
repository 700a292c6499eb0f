"""
Edge LLM model caching simulator.

Simulates an edge server that caches global models for mobile LLM agents,
compares the least Age-of-Thought eviction policy against FIFO, LFU and
cloud-only serving, and reports a five-component execution cost.
"""

__version__ = "0.1.0"
