"""Shared fixtures: cached icosphere meshes and their operators.

Mesh generation and operator assembly are deterministic, so session-scoped
caching is safe and keeps the suite fast; eigen-solves stay inside the
tests that exercise them.
"""

import numpy as np
import pytest

from specgeom.mesh import assemble_operators, mesh_from_arrays
from specgeom.meshgen import icosphere, torus_of_revolution


@pytest.fixture(scope="session")
def ico_mesh():
    cache = {}

    def get(level, radius=1.0):
        key = (level, radius)
        if key not in cache:
            verts, faces = icosphere(level, radius)
            cache[key] = mesh_from_arrays(verts, faces)
        return cache[key]

    return get


@pytest.fixture(scope="session")
def ico_ops(ico_mesh):
    cache = {}

    def get(level, radius=1.0):
        key = (level, radius)
        if key not in cache:
            cache[key] = assemble_operators(ico_mesh(level, radius))
        return cache[key]

    return get


@pytest.fixture(scope="session")
def revolution_torus_mesh():
    verts, faces = torus_of_revolution(2.0, 0.7, 48, 24)
    return mesh_from_arrays(verts, faces)


@pytest.fixture(scope="session")
def two_sphere_mesh():
    """Two disjoint unit icospheres, the standard disconnected test case."""
    v1, f1 = icosphere(3)
    v2, f2 = icosphere(3)
    v2 = v2 + np.array([5.0, 0.0, 0.0])
    verts = np.vstack([v1, v2])
    faces = np.vstack([f1, f2 + len(v1)])
    return mesh_from_arrays(verts, faces)
