"""Smoke test for the `preduals` extension module.

Build and install first, e.g. `maturin develop -m crates/python/Cargo.toml`,
then run `python python/smoke_test.py`.
"""

from fractions import Fraction

import preduals


def main() -> None:
    two = preduals.Lambda(2)
    assert two.is_exact and two.modulus == 2.0
    values = [preduals.x0(two, n) for n in range(9)]
    half, quarter, eighth = Fraction(1, 2), Fraction(1, 4), Fraction(1, 8)
    assert values == [1, half, half, quarter, half, quarter, quarter, eighth, half], values
    assert preduals.x0(two, -3) == 0

    a = preduals.Seq({0: "1/2", 1: Fraction(1, 2)})
    assert a == preduals.Seq.named("binomial")
    assert (a * a)[1] == half and (a ** 3).l1_norm() == 1.0
    assert (a - a.shift(1).shift(-1)) == preduals.Seq()
    assert a.involution()[-1] == half
    z = preduals.Seq({2: 1 + 2j})
    assert not z.is_exact and z[2] == 1 + 2j

    for r in preduals.verify_xzero(two, window=1024):
        assert r["status"] == "pass" and r["max_error"] == 0.0, r

    y = preduals.Seq({1: 1, 2: -1})
    ext, cert = preduals.extend(y, two, -64, 64)
    assert ext[64 + 1] == 1 and ext[64 + 2] == -1
    assert cert["max_off_support"] <= cert["bound"]

    rows = preduals.power_table(preduals.Seq.named("newman"), 128)
    assert len(rows) == 128 and all(sup <= l1 for _, l1, sup in rows)

    assert preduals.sparse_members("powers:2", 100) == [2, 4, 8, 16, 32, 64]
    report = preduals.sparse_check("powers:2", t=20, bound=4096)
    assert report["status"] == "evidence-only", report

    spec = preduals.Spec.load()
    assert spec.k == 1 and spec.images()[0] == a
    assert preduals.theta_check(spec, trials=20)["status"] == "pass"
    lim = preduals.limit([1 << n for n in range(1, 17)], spec)
    assert lim["details"]["limit"] == {"kind": "converges", "value": "(0,1)"}, lim

    assert abs(preduals.shrink(two, 1.0) - 8 / 9) < 1e-15
    assert preduals.shrink_witness(two, 1.5)["status"] == "pass"

    try:
        preduals.Lambda("1/2")
    except preduals.PredualsError:
        pass
    else:
        raise AssertionError("|lambda| <= 1 must be rejected")

    print("preduals smoke test: ok")


if __name__ == "__main__":
    main()
