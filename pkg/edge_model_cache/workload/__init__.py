# Init for workload package
