"""Smoke test for the `aluthge` extension module.

Build and install first:
    pip install --no-build-isolation ./crates/py     (or: maturin develop -m crates/py/Cargo.toml)
"""
import json
import math

import aluthge


def close(x, y, tol=1e-9):
    return all(abs(a - b) <= tol for ra, rb in zip(x, y) for a, b in zip(ra, rb))


def main():
    # nilpotent goes to zero
    assert close(aluthge.aluthge_matrix([[0, 1], [0, 0]], 0.5), [[0, 0], [0, 0]])
    # rank-one idempotent at lambda = 1/2
    got = aluthge.aluthge_matrix([[1, 1], [0, 0]], 0.5)
    assert close(got, [[0.5, 0.5], [0.5, 0.5]]), got

    u, mod = aluthge.polar([[0, 2j], [0, 0]])
    assert close(mod, [[0, 0], [0, 2]]) and close(u, [[0, 1j], [0, 0]])

    a = aluthge.Element([[[1, 2], [0, 3j]], [[4]]])
    assert a.block_dims == [2, 1]
    one = aluthge.Element.identity([2, 1])
    assert aluthge.aluthge(one, 0.3).approx_eq(one)
    assert aluthge.aluthge(a, 0.0).approx_eq(a)
    again = aluthge.Element.from_json(a.to_json())
    assert again.approx_eq(a)

    orbit = aluthge.orbit(a, 0.5, 20)
    assert len(orbit) == 21
    assert orbit[-1].quasinormal_residual() < orbit[0].quasinormal_residual()

    v = aluthge.Element([[[0, 1], [1, 0]], [[1j]]])
    phi = aluthge.PreserverMap.unitary_conj(v)
    lhs = phi(aluthge.aluthge(a, 0.5))
    rhs = aluthge.aluthge(phi(a), 0.5)
    assert lhs.approx_eq(rhs)
    assert phi.kind == "unitary_conj"

    assert "fixed_point" in aluthge.list_properties()
    report = json.loads(aluthge.verify(7, ["fixed_point", "h3:unitary_conj"], [[2]], 10))
    assert report["failed"] == 0 and report["passed"] > 0
    assert math.isfinite(report["reports"][0]["max_residual"])
    print("smoke test passed:", report["passed"], "reports")


if __name__ == "__main__":
    main()
