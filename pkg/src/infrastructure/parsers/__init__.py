# Parsers for per-session corpus artifacts
