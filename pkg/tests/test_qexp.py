import json

from congrua.qexp import (
    QExpansionCache,
    congruence_valuation,
    delta_coefficients,
    dim_cusp_forms,
    eta_product,
    gamma0_index,
    is_eisenstein_mod,
    newform_coefficients,
    primes_up_to,
)


def test_known_dimensions():
    assert [dim_cusp_forms(N, 2) for N in (1, 11, 23, 37, 389)] == [0, 1, 2, 2, 32]
    assert dim_cusp_forms(1, 12) == 1
    assert dim_cusp_forms(1, 24) == 2
    assert gamma0_index(11) == 12


def test_eta_products():
    assert delta_coefficients(8) == [0, 1, -24, 252, -1472, 4830, -6048, -16744]
    assert newform_coefficients(11, 8) == [0, 1, -2, -1, 2, 1, 2, -2]
    assert eta_product({1: 1, 23: 1}, 4) == [0, 1, -1, -1]


def test_ramanujan_congruence_is_eisenstein():
    tau = delta_coefficients(40)
    eig = {l: tau[l] for l in primes_up_to(39)}
    assert is_eisenstein_mod(eig, 691, 12, primes_up_to(39))
    assert not is_eisenstein_mod(eig, 7, 12, primes_up_to(39))


def test_congruence_valuation():
    assert congruence_valuation({2: 1, 3: 10}, {2: 10, 3: 1}, 3, [2, 3]) == 2
    assert congruence_valuation({2: 1}, {2: 2}, 3, [2]) == 0


def test_cache_roundtrip(tmp_path, monkeypatch):
    monkeypatch.delenv("CONGRUA_CACHE", raising=False)
    path = tmp_path / "q.jsonl"
    c = QExpansionCache(str(path))
    c.put(11, 2, "11.2.a", [0, 1, -2, -1])
    assert QExpansionCache(str(path)).get(11, 2, "11.2.a") == [0, 1, -2, -1]
    rec = json.loads(path.read_text().splitlines()[0])
    assert set(rec) == {"level", "weight", "label", "a_n"}


def test_env_overrides_path(tmp_path, monkeypatch):
    env = tmp_path / "env.jsonl"
    monkeypatch.setenv("CONGRUA_CACHE", str(env))
    c = QExpansionCache(str(tmp_path / "flag.jsonl"))
    c.put(1, 12, "1.12.a", [0, 1])
    assert env.exists() and not (tmp_path / "flag.jsonl").exists()
