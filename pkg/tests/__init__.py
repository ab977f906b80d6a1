"""ab-riesz test suite."""
