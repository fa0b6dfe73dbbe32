"""Model documents, data sets, reports and other text formats."""
