"""simdgrid: explicitly vectorized kernels over octree leaf subgrids, a
work-stealing task runtime, and a node-level benchmark harness."""

__version__ = "0.1.0"
