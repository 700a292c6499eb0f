# Init for cache package
