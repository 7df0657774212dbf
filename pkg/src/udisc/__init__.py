"""Success probabilities of universal programmable unambiguous discriminators."""
