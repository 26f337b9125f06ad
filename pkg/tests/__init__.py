# Tests for the d3fl simulator
