# Core problem representation and shared primitives
