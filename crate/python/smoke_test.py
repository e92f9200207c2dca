"""Smoke test for the krongraph_py extension module.

Builds the extension with cargo, copies it next to this script as
krongraph_py.so, imports it, and exercises design, sparse algebra,
generation and verification on small graphs.

    python3 python/smoke_test.py
"""

import pathlib
import shutil
import subprocess
import sys
import tempfile

HERE = pathlib.Path(__file__).resolve().parent
ROOT = HERE.parent


def build():
    subprocess.run(
        ["cargo", "build", "--release", "-p", "krongraph-python"],
        cwd=ROOT,
        check=True,
    )
    for name in ("libkrongraph_py.so", "libkrongraph_py.dylib"):
        lib = ROOT / "target" / "release" / name
        if lib.exists():
            shutil.copy(lib, HERE / "krongraph_py.so")
            return
    sys.exit("built library not found under target/release")


def brute_triangles(dense):
    n = len(dense)
    return sum(
        1
        for i in range(n)
        for j in range(i + 1, n)
        for k in range(j + 1, n)
        if dense[i][j] and dense[j][k] and dense[i][k]
    )


def main():
    if "--no-build" not in sys.argv:
        build()
    sys.path.insert(0, str(HERE))
    import krongraph_py as kg

    # design mode
    d = kg.Design([5, 3])
    assert d.vertices() == 24
    assert d.edges() == 60
    assert d.triangles() == 0
    assert d.distribution() == {1: 15, 3: 5, 5: 3, 15: 1}
    assert d.alpha()[:2] == (15, 15)
    assert d.power_law_valid()

    center = kg.Design([5, 3], loop="center", remove_loop=True)
    leaf = kg.Design([5, 3], loop="leaf", remove_loop=True)
    assert center.triangles() == 15
    assert leaf.triangles() == 1
    for des in (center, leaf):
        assert brute_triangles(des.materialize().to_dense()) == des.triangles()

    # big integers come back as Python ints
    big = kg.Design([3, 4, 5, 9, 16, 25, 81, 256, 625], loop="center", remove_loop=True)
    assert big.edges() == 2_318_105_678_089_508
    assert big.triangles() == 12_720_651_636_552_427
    report = big.report()
    assert report["vertices"] == 6_997_208_649_600
    assert report["alpha"] is not None

    # sparse algebra
    a = kg.SparseMatrix.star(5)
    b = kg.SparseMatrix.star(3)
    ab = a.kron(b)
    assert ab.shape == (24, 24)
    assert ab.nnz == a.nnz * b.nnz == 60
    assert ab.degrees() == d.distribution()
    sq = kg.SparseMatrix.star(5, loop="center")
    wedge = sum(v for _, _, v in (sq @ sq).ewise_mult(sq).triples())
    assert wedge == sq.closed_wedge_sum()
    tri = kg.SparseMatrix.from_triples(3, 3, [(0, 1, 1), (1, 0, 1), (1, 2, 1), (2, 1, 1), (0, 2, 1), (2, 0, 1)])
    assert tri.triangle_count() == 1
    assert tri.transpose() == tri

    # generation and verification
    with tempfile.TemporaryDirectory() as tmp:
        out = pathlib.Path(tmp) / "shards"
        run = kg.generate(center, str(out), workers=3, split=1)
        assert run["total_edges"] == center.edges()
        assert len(run["shards"]) == 3
        ok, text = kg.verify(center, str(out), triangles=True)
        assert ok, text
        assert "result\tPASS" in text

        first = out / run["shards"][0][0]
        lines = first.read_text().splitlines()
        first.write_text("\n".join(lines[1:]) + "\n")
        ok, text = kg.verify(center, str(out))
        assert not ok
        assert "check\tedges" in text and "FAIL" in text

    try:
        kg.Design([1, 3])
    except ValueError:
        pass
    else:
        raise AssertionError("m_hat = 1 must be rejected")

    print("krongraph_py smoke test: OK")


if __name__ == "__main__":
    main()
