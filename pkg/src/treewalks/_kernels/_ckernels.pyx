# Compiled walk kernels.  Must stay draw-for-draw identical to pykernels.py:
# one uniform double per time step, consumed through the numpy BitGenerator
# C interface.

import numpy as np

cimport numpy as cnp
from cpython.pycapsule cimport PyCapsule_GetPointer
from numpy.random cimport bitgen_t

cnp.import_array()


cdef bitgen_t* _bitgen_of(object gen):
    capsule = gen.bit_generator.capsule
    return <bitgen_t*> PyCapsule_GetPointer(capsule, "BitGenerator")


def depth_walk(object gen, int d, double gamma, Py_ssize_t steps):
    """Depth process of a lazy (or simple, gamma=0) walk started at the root."""
    cdef bitgen_t* rng = _bitgen_of(gen)
    cdef cnp.ndarray[cnp.int64_t, ndim=1] depths = np.empty(steps + 1, dtype=np.int64)
    cdef long long depth = 0
    cdef double u, v
    cdef double inv = 1.0 - gamma
    cdef Py_ssize_t t
    depths[0] = 0
    with gen.bit_generator.lock:
        for t in range(steps):
            u = rng.next_double(rng.state)
            if u >= gamma:
                v = (u - gamma) / inv
                if depth == 0:
                    depth = 1
                elif v * d < 1.0:
                    depth -= 1
                else:
                    depth += 1
            depths[t + 1] = depth
    return depths


def coupled_shift_walk(object gen, int d, double gamma, object codes_obj):
    """Walk depths plus depths of the edge-shift-permuted image (see pykernels)."""
    cdef cnp.ndarray[cnp.int64_t, ndim=1] codes = np.ascontiguousarray(codes_obj, dtype=np.int64)
    cdef Py_ssize_t steps = codes.shape[0]
    cdef bitgen_t* rng = _bitgen_of(gen)
    cdef cnp.ndarray[cnp.int64_t, ndim=1] depths_x = np.empty(steps + 1, dtype=np.int64)
    cdef cnp.ndarray[cnp.int64_t, ndim=1] depths_y = np.empty(steps + 1, dtype=np.int64)
    cdef cnp.ndarray[cnp.int64_t, ndim=1] path = np.empty(steps + 1, dtype=np.int64)
    cdef cnp.ndarray[cnp.int64_t, ndim=1] work = np.empty(2 * steps + 4, dtype=np.int64)
    cdef Py_ssize_t center = steps + 2
    cdef long long depth = 0, k, c, c1, a2
    cdef Py_ssize_t t, s, lo, hi
    cdef double u, v
    cdef double inv = 1.0 - gamma
    depths_x[0] = 0
    depths_y[0] = 0
    with gen.bit_generator.lock:
        for t in range(steps):
            u = rng.next_double(rng.state)
            if u >= gamma:
                v = (u - gamma) / inv
                if depth == 0:
                    k = <long long>(v * d)
                    if k >= d:
                        k = d - 1
                    path[0] = k
                    depth = 1
                elif v * d < 1.0:
                    depth -= 1
                else:
                    k = <long long>(v * d - 1.0)
                    if k >= d - 1:
                        k = d - 2
                    path[depth] = k
                    depth += 1
            depths_x[t + 1] = depth

            lo = center
            hi = center + depth
            for s in range(depth):
                work[lo + s] = path[s]
            for s in range(t + 1):
                c = codes[s]
                if c < 0:
                    continue
                if lo == hi:
                    lo -= 1
                    work[lo] = c
                elif work[lo] == c:
                    if hi - lo == 1:
                        lo += 1
                    else:
                        a2 = work[lo + 1]
                        lo += 1
                        work[lo] = a2 + 1 if a2 >= c else a2
                else:
                    c1 = work[lo]
                    work[lo] = c1 - 1 if c1 > c else c1
                    lo -= 1
                    work[lo] = c
            depths_y[t + 1] = hi - lo
    return depths_x, depths_y
