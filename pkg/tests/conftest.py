import os

# Tiny-matrix LAPACK calls dominate several suites; OpenBLAS threading only
# thrashes them on small boxes.  Must be set before numpy loads BLAS.
os.environ.setdefault("OMP_NUM_THREADS", "1")
os.environ.setdefault("OPENBLAS_NUM_THREADS", "1")
