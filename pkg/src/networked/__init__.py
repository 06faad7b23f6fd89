"""Learning from networked examples."""
