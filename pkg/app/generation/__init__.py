"""Generation of new categorization points that raise projection coverage."""
