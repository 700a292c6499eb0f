# edge_model_cache/cli/commands/__init__.py
