# Init for harness package
