"""nctorus is a django application to compute with noncommutative N-tori:
twisted Fourier series, connections on free modules, gauge fixing of flat
connections and their moduli, and the Heisenberg lattice example."""
