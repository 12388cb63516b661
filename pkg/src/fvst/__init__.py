"""Feedback vertex set in tournaments: exact, LP-based and layered approximation algorithms."""
