# Init for cost package
