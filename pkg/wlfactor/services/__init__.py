"""Domain services for the factoring pipeline."""
