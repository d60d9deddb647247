"""Smoke test for the ramsey_forge_py extension module.

Run after `pip install --no-build-isolation ./crates/py`.
"""

import ramsey_forge_py as rf


def main():
    trees = rf.Tree.enumerate(4)
    assert len(trees) == 9, trees
    assert [str(t) for t in trees[:4]] == ["()", "(())", "((()))", "(()())"]

    t = rf.Tree("(()())")
    assert len(t) == 3 and t.leaves() == [1, 2] and t.is_binary()
    assert t.meet(1, 2) == 0 and t.lex_compare(1, 2) == -1
    assert rf.Tree("(())").norm_leq(t)

    maps = rf.rigid_surjections(rf.Tree("((()))"), rf.Tree("(())"))
    assert len(maps) == 3
    for f in maps:
        assert f.is_rigid_surjection()
        section = f.rigid_adjoint()
        assert section is not None and section.is_morphism()
    f = rf.TreeMap.parse(str(maps[0]))
    assert f == maps[0]

    assert len(rf.partitions(4, 2)) == 7
    assert rf.partitions(5, 2, homogeneous=True) == []

    v = rf.witness_check("gr", colors=2, k=2, l=3, m=3)
    assert v["verdict"] == "not_witness" and len(v["bad_coloring"]) == 3
    v = rf.witness_check("dual-tree", s="(())", t="(())", u="(())")
    assert v["verdict"] == "witness"
    try:
        rf.witness_check("gr", k=2, l=3, m=6, budget=1)
    except RuntimeError as e:
        assert "budget" in str(e)
    else:
        raise AssertionError("budget of 1 should be exhausted")

    report = rf.moore_check(3, 3)
    assert report["verdict"] == "counterexample" and report["counterexample"] == "10"
    assert rf.moore_check(3, 4)["verdict"] == "holds"
    assert rf.moore_feasibility(3, 3, [True, False]) is None
    assert rf.moore_feasibility(3, 3, [True, True]) is not None

    space = rf.partial_vectors(1, 1, 2)
    assert len(space) == 3
    assert rf.is_full(space, 1, 1, 2) is not None
    assert rf.fullsets_check([(2, 0, 2)], colors=2)["verdict"] == "counterexample"
    assert rf.fullsets_check([(2, 1, 1)], colors=2)["colorings_checked"] == 8

    axioms = rf.check_axioms(3)
    assert axioms["all_passed"] and axioms["elements"] == 6

    print("smoke test passed")


if __name__ == "__main__":
    main()
