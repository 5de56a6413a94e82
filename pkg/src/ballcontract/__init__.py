"""Uniform contractions of congruent balls in Minkowski spaces."""
