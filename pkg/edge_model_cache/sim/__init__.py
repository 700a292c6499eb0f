# Init for sim package
