"""Dataset generation and the batch-normalised MLP surrogate."""
