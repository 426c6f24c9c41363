"""memoplan-py unit tests."""
