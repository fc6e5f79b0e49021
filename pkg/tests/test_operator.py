import io

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from conftest import dense_power_oracle, random_ambient, random_animal
from polylap.eigen import eigen_sym
from polylap.lattice import IntegerLattice, boundary_layers, cycle_graph, make_ball, make_box
from polylap.operator import (
    apply_laplacian,
    assemble,
    boundary_measure,
    coeff_axy,
    dump_matrix_market,
    load_matrix_market,
    pad,
    quadratic_form,
    zero_extend,
)


def test_apply_laplacian_examples():
    out = apply_laplacian(IntegerLattice(1), {(0,): 1.0})
    assert out[(0,)] == -2 and out[(1,)] == 1 and out[(-1,)] == 1
    assert all(v == 0 for k, v in out.items() if k not in {(0,), (1,), (-1,)})
    c3 = cycle_graph(3, [0, 1])
    assert all(v == 0 for v in apply_laplacian(c3, {0: 4.0, 1: 4.0, 2: 4.0}).values())


def test_zero_extend_vanishes_on_padding():
    dom = make_box(2, (0, 0), (2, 2))
    padded = pad(dom, 2)
    ext = zero_extend(padded, np.arange(1.0, 10.0))
    assert np.all(ext[:9] == np.arange(1.0, 10.0))
    assert np.all(ext[9:] == 0) and len(ext) == padded.size
    with pytest.raises(ValueError):
        zero_extend(padded, np.ones(4))


def test_assemble_examples():
    c3 = cycle_graph(3, [0, 1])
    assert np.array_equal(assemble(c3, 1).matrix, [[2, -1], [-1, 2]])
    assert np.array_equal(assemble(c3, 2).matrix, [[6, -3], [-3, 6]])
    op = assemble(make_box(2, (0, 0), (1, 1)), 1)
    assert np.allclose(np.linalg.eigvalsh(op.matrix), [2, 4, 4, 6], atol=1e-12)


def test_l1_matrix_is_degree_minus_adjacency():
    dom = random_animal(np.random.default_rng(5), 3, 40)
    m = assemble(dom, 1).matrix
    for i, x in enumerate(dom.vertices):
        for j, y in enumerate(dom.vertices):
            dist = sum(abs(a - b) for a, b in zip(x, y))
            want = 6 if i == j else (-1 if dist == 1 else 0)
            assert m[i, j] == want


@settings(max_examples=40, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), d=st.integers(1, 3), size=st.integers(1, 60), l=st.integers(1, 3))
def test_assembly_matches_dense_power_oracle(seed, d, size, l):
    dom = random_animal(np.random.default_rng(seed), d, size)
    op = assemble(dom, l)
    want, exact = dense_power_oracle(dom, l)
    assert np.max(np.abs(op.matrix - want)) <= 1e-10
    assert op.boundary.exact == pytest.approx(exact, abs=1e-10)
    assert np.array_equal(op.matrix, op.matrix.T)


@settings(max_examples=25, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), l=st.integers(1, 3))
def test_ambient_assembly_matches_dense_power_oracle(seed, l):
    rng = np.random.default_rng(seed)
    g = random_ambient(rng, int(rng.integers(3, 40)), int(rng.integers(1, 20)), int(rng.integers(0, 30)))
    op = assemble(g, l)
    want, exact = dense_power_oracle(g, l)
    assert np.max(np.abs(op.matrix - want)) <= 1e-10
    assert op.boundary.exact == pytest.approx(exact, abs=1e-10)


@settings(max_examples=30, deadline=None)
@given(d=st.integers(1, 3), l=st.integers(1, 3),
       y=st.lists(st.integers(-3, 3), min_size=3, max_size=3))
def test_coeff_axy_matches_matrix_power(d, l, y):
    # big enough box that every entry of (D - A)^l near the origin is exact
    r = l + 4
    box = make_box(d, (-r,) * d, (r,) * d)
    m, _ = dense_power_oracle(box, l)
    x, y = (0,) * d, tuple(y[:d])
    assert coeff_axy(IntegerLattice(d), x, y, l) == round(m[box.index[x], box.index[y]])


def test_coeff_axy_examples():
    z1 = IntegerLattice(1)
    assert coeff_axy(z1, (0,), (0,), 1) == 2
    assert coeff_axy(z1, (0,), (1,), 2) == -4
    assert coeff_axy(IntegerLattice(2), (0, 0), (1, 1), 2) == 2


def test_coeff_axy_rejects_irregular():
    from polylap.lattice import AmbientGraph
    star = AmbientGraph.build(4, [(0, 1), (0, 2), (0, 3)], [0])
    with pytest.raises(ValueError):
        coeff_axy(star, 0, 1, 2)


def test_boundary_measure_examples():
    bm = boundary_measure(make_box(1, (0,), (9,)), 1)
    assert (bm.exact, bm.crude) == (2, 8)
    bm = boundary_measure(make_box(2, (0, 0), (9, 9)), 1)
    # crude = 4^l d^l |delta_1| = 8 * 40
    assert bm.exact == 40 and bm.crude == 320
    assert boundary_measure(cycle_graph(3, [0, 1]), 1).exact == 2
    assert boundary_measure(cycle_graph(3, [0, 1]), 2).exact == 6


@settings(max_examples=30, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), d=st.integers(1, 3), size=st.integers(1, 50), l=st.integers(1, 3))
def test_boundary_measure_exact_below_crude(seed, d, size, l):
    dom = random_animal(np.random.default_rng(seed), d, size)
    bm = boundary_measure(dom, l)
    layers = sum(boundary_layers(dom, l).sizes())
    assert bm.crude == 4 ** l * d ** l * layers
    assert 0 <= bm.exact <= bm.crude


def test_quadratic_form_examples():
    dom = make_box(2, (0, 0), (3, 2))
    op = assemble(dom, 2)
    spec = eigen_sym(op.matrix, want_vectors=True)
    v = spec.eigenvectors[:, 3]
    assert quadratic_form(op, v) == pytest.approx(spec.eigenvalues[3] * np.dot(v, v), rel=1e-12)
    assert quadratic_form(op, np.zeros(op.n)) == 0


def _edge_energy(dom, f):
    # sum over edges of the closure of |f*(x) - f*(y)|^2 with f* zero outside Omega
    vals = dict(zip(dom.vertices, f))
    total = 0.0
    for x in dom.vertices:
        for y in dom.ambient.neighbors(x):
            if y in vals:
                if x < y:
                    total += abs(vals[x] - vals[y]) ** 2
            else:
                total += abs(vals[x]) ** 2
    return total


@settings(max_examples=30, deadline=None)
@given(seed=st.integers(0, 2**32 - 1))
def test_quadratic_form_is_dirichlet_energy(seed):
    rng = np.random.default_rng(seed)
    box = make_box(2, (0, 0), (1, 1))
    f = rng.standard_normal(4) + 1j * rng.standard_normal(4)
    assert quadratic_form(assemble(box, 1), f) == pytest.approx(_edge_energy(box, f), rel=1e-12)
    dom = random_animal(rng, 3, 25)
    g = rng.standard_normal(25)
    assert quadratic_form(assemble(dom, 1), g) == pytest.approx(_edge_energy(dom, g), rel=1e-12)


@settings(max_examples=30, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), d=st.integers(1, 3), size=st.integers(1, 40), l=st.integers(1, 3))
def test_composition_inequality(seed, d, size, l):
    # ||M_l f||^2 = ||(-Delta)^l f*||^2 restricted to Omega <= <M_2l f, f>
    rng = np.random.default_rng(seed)
    dom = random_animal(rng, d, size)
    f = rng.standard_normal(size)
    ml = assemble(dom, l).matrix
    m2l = assemble(dom, 2 * l).matrix
    lhs = float(np.dot(ml @ f, ml @ f))
    rhs = float(f @ m2l @ f)
    assert lhs <= rhs * (1 + 1e-12) + 1e-12


@settings(max_examples=25, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), d=st.integers(1, 3), size=st.integers(1, 60), l=st.integers(1, 3))
def test_positive_definite(seed, d, size, l):
    dom = random_animal(np.random.default_rng(seed), d, size)
    assert eigen_sym(assemble(dom, l).matrix).eigenvalues[0] > 0


def test_matrix_market_round_trip(tmp_path):
    scipy_io = pytest.importorskip("scipy.io")
    op = assemble(make_ball(2, (0, 0), 3), 2)
    buf = io.StringIO()
    dump_matrix_market(op, buf)
    text = buf.getvalue()
    assert text.startswith("%%MatrixMarket matrix coordinate real symmetric")
    back = load_matrix_market(io.StringIO(text))
    assert np.array_equal(back, op.matrix)
    path = tmp_path / "op.mtx"
    path.write_text(text)
    assert np.array_equal(scipy_io.mmread(str(path)).toarray(), op.matrix)
