"""Fault-tolerant state-preparation toolkit."""
