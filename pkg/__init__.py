# Uncertainty-relation lab package