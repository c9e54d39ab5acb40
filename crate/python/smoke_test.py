"""Smoke test for the skewlat extension module: python python/smoke_test.py"""

import json

import skewlat


def main():
    nc5 = skewlat.named("NC5")
    assert isinstance(nc5, skewlat.SkewLattice) and nc5.size == 5
    report = nc5.classify()
    assert report["left_handed"] and report["ncframe"]
    assert sorted(len(c) for c in nc5.d_classes()) == [1, 2, 2]

    sigma, bijective = nc5.unit_sigma()
    assert bijective and sorted(sigma) == list(range(5))

    g = nc5.dualize()
    assert g["base"].is_homeomorphic(skewlat.named("SIER"))
    assert sorted(g["stalks"]) == [1, 2]
    back = skewlat.realize(g["base"], g["sheaf"])
    assert back.is_isomorphic(nc5)

    disc2 = skewlat.named("DISC2")
    p22 = skewlat.realize(disc2, skewlat.Sheaf.product_over_blocks(disc2.front(), [2, 2]))
    assert p22.is_isomorphic(skewlat.named("P22"))
    sier = skewlat.named("SIER")
    assert skewlat.counit_iso(sier, skewlat.Sheaf.product_over_blocks(sier.front(), [1, 2]))

    tops = max(nc5.d_classes(), key=lambda c: max(c))
    q = nc5.separate(tops[0], tops[1])
    assert q is not None and q[tops[0]] != q[tops[1]]

    chain3 = skewlat.named("CHAIN3")
    assert len(chain3.nuclei()) == 4
    assert skewlat.named("BOOL2").spectrum().is_homeomorphic(disc2)
    assert sier.dissolution_checks()["boolean"]

    again = skewlat.loads(nc5.to_json())
    assert again.is_isomorphic(nc5)
    assert json.loads(g["sheaf"].to_json())["kind"] == "sheaf"

    try:
        skewlat.SkewLattice([[0, 0], [0, 1]], [[0, 0], [0, 1]])
    except skewlat.SkewlatError as e:
        assert "absorption" in str(e)
    else:
        raise AssertionError("broken absorption accepted")
    try:
        skewlat.loads("{")
    except ValueError:
        pass
    else:
        raise AssertionError("malformed JSON accepted")

    print("smoke test passed")


if __name__ == "__main__":
    main()
