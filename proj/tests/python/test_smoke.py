import json

import numpy as np
import pytest

import tilefuse as tf


def dense(a):
    return np.asarray(a.to_dense())


def test_csr_construction_and_roundtrip():
    a = tf.Csr(
        n_rows=2,
        n_cols=3,
        row_ptr=[0, 2, 3],
        col_idx=[0, 2, 1],
        values=[1.0, 2.0, 3.0],
    )
    assert a.n_rows == 2
    assert a.n_cols == 3
    assert a.nnz == 3
    assert np.array_equal(dense(a), [[1.0, 0.0, 2.0], [0.0, 3.0, 0.0]])
    assert "Csr(2x3" in repr(a)


def test_csr_rejects_inconsistent_structure():
    with pytest.raises((ValueError, RuntimeError)):
        tf.Csr(n_rows=2, n_cols=2, row_ptr=[0, 1], col_idx=[0], values=[1.0])
    with pytest.raises((ValueError, RuntimeError)):
        tf.Csr(
            n_rows=1, n_cols=2, row_ptr=[0, 1], col_idx=[5], values=[1.0]
        )


def test_generators():
    a = tf.gen_random_sparse(50, 0.1, seed=7)
    b = tf.gen_random_sparse(50, 0.1, seed=7)
    assert np.array_equal(dense(a), dense(b))
    assert a.nnz > 0

    band = dense(tf.gen_banded(6, 2))
    i, j = np.indices((6, 6))
    assert np.array_equal(band, np.where(np.abs(i - j) <= 2, 1.0, 0.0))


def test_matrix_market_io(tmp_path):
    path = tmp_path / "tiny.mtx"
    path.write_text(
        "%%MatrixMarket matrix coordinate real general\n"
        "2 2 2\n"
        "1 1 4.0\n"
        "2 1 -1.5\n"
    )
    a = tf.load_matrix_market(str(path))
    assert np.array_equal(dense(a), [[4.0, 0.0], [-1.5, 0.0]])


def test_fused_gemm_spmm_matches_numpy():
    rng = np.random.default_rng(3)
    a = tf.gen_random_sparse(80, 0.08, seed=3)
    b = rng.uniform(-1.0, 1.0, size=(80, 8))
    c = rng.uniform(-1.0, 1.0, size=(8, 5))
    want = dense(a) @ (b @ c)
    got_fused = tf.fused_gemm_spmm(a, b, c, workers=2)
    got_unfused = tf.unfused_gemm_spmm(a, b, c, workers=2)
    np.testing.assert_allclose(got_fused, want, rtol=1e-10, atol=1e-12)
    assert np.array_equal(got_fused, got_unfused)


def test_fused_spmm_spmm_matches_numpy():
    rng = np.random.default_rng(4)
    a = tf.gen_random_sparse(60, 0.1, seed=4)
    b = tf.gen_random_sparse(60, 0.15, seed=5)
    c = rng.uniform(-1.0, 1.0, size=(60, 4))
    want = dense(a) @ (dense(b) @ c)
    got = tf.fused_spmm_spmm(a, b, c, workers=2)
    np.testing.assert_allclose(got, want, rtol=1e-10, atol=1e-12)
    assert np.array_equal(got, tf.unfused_spmm_spmm(a, b, c, workers=2))


def test_worker_counts_agree_bitwise():
    rng = np.random.default_rng(9)
    a = tf.gen_random_sparse(100, 0.05, seed=9)
    b = rng.uniform(-1.0, 1.0, size=(100, 16))
    c = rng.uniform(-1.0, 1.0, size=(16, 16))
    d1 = tf.fused_gemm_spmm(a, b, c, workers=1)
    d8 = tf.fused_gemm_spmm(a, b, c, workers=8)
    assert np.array_equal(d1, d8)


def test_schedule_json_document():
    doc = json.loads(
        tf.schedule_json(tf.gen_banded(16, 1), workers=2, ct_size=4)
    )
    assert doc["n"] == 16
    assert doc["tile_size_t"] == 4
    assert doc["fused_ratio"] == 0.3125
    assert len(doc["wavefronts"]) == 2
    tile = doc["wavefronts"][0][0]
    assert [tile["i_lo"], tile["i_hi"]] == [0, 4]
    assert tile["j_list"] == [0, 1, 2]


def test_fused_ratio_endpoints():
    assert tf.fused_ratio(tf.gen_banded(8, 0), tile_size=4) == 0.5
    assert tf.fused_ratio(tf.gen_banded(8, 7), tile_size=4) == 0.0
    assert tf.fused_ratio(tf.gen_banded(16, 1), tile_size=4) == 0.3125


def test_shape_errors():
    rect = tf.Csr(
        n_rows=2, n_cols=3, row_ptr=[0, 1, 2], col_idx=[0, 1],
        values=[1.0, 1.0],
    )
    with pytest.raises((ValueError, RuntimeError)):
        tf.schedule_json(rect)

    a = tf.gen_banded(8, 1)
    b = np.ones((8, 4))
    c_bad = np.ones((5, 3))  # rows must match B columns
    with pytest.raises((ValueError, RuntimeError)):
        tf.fused_gemm_spmm(a, b, c_bad)
