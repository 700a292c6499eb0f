# Test suite for edge_model_cache; shared fixtures live in conftest.py
