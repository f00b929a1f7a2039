"""Quick check that the extension imports and agrees with known values.

    pip install -e crates/python --no-build-isolation
    python python/smoke_test.py
"""

import json
import sys

import khf

TREFOIL = "X(1,4,2,5) X(3,6,4,1) X(5,2,6,3)"


def main():
    h = khf.kh(pd=TREFOIL)
    assert sum(h.values()) == 6, h
    assert khf.reduced(1, fixture="unknot") == {(0, 0): 1}
    assert sum(khf.reduced(1, pd=TREFOIL).values()) == 3

    assert sum(khf.bn(fixture="hopf").values()) == 4

    # graded Euler characteristic against the state sum
    euler = {}
    for (hh, q), n in h.items():
        euler[q] = euler.get(q, 0) + (-1) ** (hh % 2) * n
    assert {q: c for q, c in euler.items() if c} == khf.bracket(pd=TREFOIL)

    pages = khf.spectral_pages("kh", fixture="trefoil")
    assert pages[2] == h, pages

    report = json.loads(khf.verify("all", fixture="figure-eight"))
    assert report["verdict"] == "pass", report["verdict"]
    assert set(report) == {"tool_version", "command", "inputs", "results", "verdict"}

    m = khf.mutate([1, 12, 10, 15], [0, 1, 2, 3, 4], "z", fixture="kt")
    assert sum(khf.kh(pd=m).values()) == 66

    try:
        khf.kh(pd="X(1,2")
    except ValueError:
        pass
    else:
        raise AssertionError("bad PD accepted")

    print(f"khf {khf.__version__}: smoke test passed ({len(khf.fixtures())} fixtures)")


if __name__ == "__main__":
    sys.exit(main())
