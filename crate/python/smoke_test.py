"""Smoke test for the nerveq Python extension."""
import json
import os

import nerveq

ROOT = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))
DATA = os.path.join(ROOT, "data")


def main():
    f = nerveq.Morphism("map(2->2)[2,1]")
    assert f.kind == "map" and (f.source, f.target) == (2, 2)
    assert str(f.compose(f).normalize()) == str(nerveq.Morphism("map(2->2)[1,2]"))
    g = nerveq.Morphism.from_json(f.to_json())
    assert g == f

    phi = nerveq.Associator.solve(2)
    assert phi.bracket_text() == "1 + 1/24 [x,y]"
    ok, _ = phi.check()
    assert ok

    s3 = nerveq.HopfAlgebra.group_algebra_symmetric(3)
    assert s3.dim == 6
    assert all(ok for _, ok, _ in s3.validate())

    maps = nerveq.nerve(s3, "braid(2){s1}", mode="braided", order=1)
    assert maps[0].source_power == 1 and not maps[0].is_zero()

    u = nerveq.transport(nerveq.Morphism("braid(2){s1}"), phi, order=1)
    assert str(u) == "map(2->2)[2,1] + 1/2 map(2->2)[2,1] * (t12)"

    sym = nerveq.HopfAlgebra.from_file(os.path.join(DATA, "sym_xy.json"))
    q = nerveq.quantize(sym, phi, order=2)
    assert q.ok(), q.report()
    assert json.loads(q.to_json())["schema"] == "nerveq.quantized/1"

    fun = nerveq.HopfAlgebra.fun_symmetric(3)
    assert nerveq.quantize(fun, phi, order=2).is_trivial()

    assert nerveq.run_cli(["compose", "map(1->1)[1]"]) == 0
    assert nerveq.run_cli(["compose", "map(2->1)[1,1] o map(2->2)[1]"]) == 2

    try:
        nerveq.Morphism("map(2->1)[1,1] o map(3->3)[1,2,3]")
    except ValueError:
        pass
    else:
        raise AssertionError("type error not raised")

    print("smoke test ok")


if __name__ == "__main__":
    main()
