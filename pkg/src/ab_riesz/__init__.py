"""ab-riesz: Bochner-Riesz kernels of the planar Aharonov-Bohm operator."""
