#!/usr/bin/env python3
"""Smoke test for the pfp_py extension module.

Builds the cdylib with cargo if needed, imports it, and checks a handful of
known query answers on a small text. Run from anywhere:

    python3 python/smoke_test.py
"""

import shutil
import subprocess
import sys
import tempfile
from pathlib import Path

REPO_ROOT = Path(__file__).resolve().parent.parent


def build_extension() -> Path:
    """Compiles the extension and returns an importable module path."""
    subprocess.run(
        ["cargo", "build", "-p", "pfp-py", "--release"],
        cwd=REPO_ROOT,
        check=True,
    )
    cdylib = REPO_ROOT / "target" / "release" / "libpfp_py.so"
    if not cdylib.exists():  # macOS
        cdylib = REPO_ROOT / "target" / "release" / "libpfp_py.dylib"
    staging = Path(tempfile.mkdtemp(prefix="pfp_py_"))
    shutil.copy(cdylib, staging / "pfp_py.so")
    return staging


def main() -> int:
    sys.path.insert(0, str(build_extension()))
    import pfp_py

    text = b"GATTACATGATACATGATTAGATAGATTACAT" * 4
    idx = pfp_py.PfpIndex(text, w=4, p=16)
    n = len(text) + 4  # sentinels included
    assert idx.n == n, idx.n
    assert len(idx) == n
    assert idx.w == 4
    print(repr(idx))

    # access() must reproduce the text (sentinels after it).
    recovered = bytes(idx.access(i) for i in range(len(text)))
    assert recovered == text
    assert idx.access(n - 1) == pfp_py.SENTINEL

    # SA/ISA invert each other and SA orders the suffixes.
    for i in range(n):
        assert idx.isa(idx.sa(i)) == i
    suffixes = [text[idx.sa(i):] for i in range(n)]
    assert suffixes[4:] == sorted(suffixes[4:])  # ranks 0..3 start inside sentinels

    # LCE agrees with direct comparison on a few pairs.
    def ref_lce(i, j):
        k = 0
        while i + k < len(text) and j + k < len(text) and text[i + k] == text[j + k]:
            k += 1
        return k

    for i, j in [(0, 32), (0, 24), (5, 21), (7, 7), (1, 2)]:
        got, want = idx.lce(i, j), ref_lce(i, j) if i != j else n - i
        assert got == want, (i, j, got, want)

    # lcp/rmq_lcp consistency.
    assert idx.lcp(0) == 0
    for i in range(1, n):
        assert idx.rmq_lcp(i, i) == idx.lcp(i)

    # Serialization round trip.
    blob = idx.serialize()
    again = pfp_py.PfpIndex.deserialize(blob)
    assert again.serialize() == blob
    assert [again.sa(i) for i in range(n)] == [idx.sa(i) for i in range(n)]

    # Errors surface as Python exceptions.
    try:
        idx.sa(n)
    except IndexError:
        pass
    else:
        raise AssertionError("out-of-range sa() must raise IndexError")
    try:
        pfp_py.PfpIndex.deserialize(b"not an index")
    except ValueError:
        pass
    else:
        raise AssertionError("bad bytes must raise ValueError")

    print("smoke test passed")
    return 0


if __name__ == "__main__":
    sys.exit(main())
