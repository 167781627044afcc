"""Exact computations in the first Weyl algebra and the algebras CSD_n."""
