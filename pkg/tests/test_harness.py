"""Plan validation, disk cache behavior, report determinism, exports, and
the per-command report builders."""

import json
import os

import pytest

from superkoszul.harness import (
    CLAIMS,
    DiskCache,
    CachedKoszulContext,
    PlanError,
    VerificationPlan,
    character_report,
    construct_report,
    export_basis,
    export_matrix,
    export_report,
    hook_to_label,
    record,
    resolve_cache_dir,
    run,
    run_group,
    spectrum_report,
    stable_body,
    store_report,
)
from superkoszul.koszul import KoszulContext
from superkoszul.linalg import SparseMap
from superkoszul.superspace import SuperSpace


SMALL = dict(max_k=2, max_l=2, max_i=1, max_a=1, max_p=2, max_r=2)


# ---------------------------------------------------------------------------
# plan and record invariants


def test_plan_rejects_bad_bounds():
    with pytest.raises(PlanError):
        VerificationPlan(max_k=0).validate()
    with pytest.raises(PlanError):
        VerificationPlan(m=0).validate()
    with pytest.raises(PlanError):
        VerificationPlan(jobs=0).validate()


def test_plan_rejects_bad_checks():
    with pytest.raises(PlanError):
        VerificationPlan(checks=("identities", "nonsense")).validate()
    with pytest.raises(PlanError):
        VerificationPlan(checks=()).validate()


def test_plan_round_trips_through_dict():
    plan = VerificationPlan(checks=("identities",), jobs=2, **SMALL)
    assert VerificationPlan.from_dict(plan.as_dict()) == plan


def test_record_requires_registered_claim_and_witness():
    with pytest.raises(ValueError):
        record("NOT-A-CLAIM", {}, "pass")
    with pytest.raises(ValueError):
        record("H31", {}, "fail")
    r = record("H31", {}, "fail", witness={"bad": 1})
    assert r["statement"] == CLAIMS["H31"]


def test_hook_to_label():
    assert hook_to_label((2, 1)) == (2, 1, 0, 0)
    assert hook_to_label((3,)) == (3, 0, 0, 0)
    assert hook_to_label((1, 1, 1, 1)) == (1, 1, 1, -1)
    assert hook_to_label((2, 1, 1, 1, 1)) == (2, 1, 1, -2)


# ---------------------------------------------------------------------------
# disk cache


def test_cache_round_trip(tmp_path):
    cache = DiskCache(str(tmp_path))
    payload = {"dom_dim": 2, "cod_dim": 2, "entries": [["0", "1", "1", "2"]]}
    cache.put("matrix/test", payload)
    assert cache.get("matrix/test") == payload
    assert cache.get("matrix/other") is None


def test_cache_detects_corruption(tmp_path):
    cache = DiskCache(str(tmp_path))
    path = cache.put("k", {"a": 1})
    blob = json.load(open(path))
    blob["payload"]["a"] = 2  # content no longer matches the checksum
    json.dump(blob, open(path, "w"))
    assert cache.get("k") is None
    cache.put("k", {"a": 3})
    assert cache.get("k") == {"a": 3}


def test_cache_ignores_truncated_files(tmp_path):
    cache = DiskCache(str(tmp_path))
    path = cache.put("k", [1, 2, 3])
    open(path, "w").write('{"key": "k", "payl')
    assert cache.get("k") is None


def test_resolve_cache_dir_priority(monkeypatch):
    monkeypatch.setenv("SUPERKOSZUL_CACHE", "/env/path")
    assert resolve_cache_dir("/explicit") == "/explicit"
    assert resolve_cache_dir(None) == "/env/path"
    monkeypatch.delenv("SUPERKOSZUL_CACHE")
    assert resolve_cache_dir(None) is None


def test_cached_context_coherence(tmp_path):
    space = SuperSpace(3, 1)
    cache = DiskCache(str(tmp_path))
    cached = CachedKoszulContext(space, cache)
    fresh = KoszulContext(space)
    first = cached.pair_d(1, 1)
    assert first.entries == fresh.pair_d(1, 1).entries
    # a second context with a cold RAM memo must reload identical entries
    reload_ctx = CachedKoszulContext(space, DiskCache(str(tmp_path)))
    assert reload_ctx.pair_d(1, 1).entries == first.entries
    for name in ("del", "P", "Q"):
        getattr(cached, {"del": "pair_del", "P": "pair_p", "Q": "pair_q"}[name])(1, 1)
    assert len(os.listdir(tmp_path)) >= 4


# ---------------------------------------------------------------------------
# runs and reports


@pytest.fixture(scope="module")
def small_report():
    plan = VerificationPlan(checks=("identities", "splittings"), **SMALL)
    return run(plan)


def test_small_run_passes(small_report):
    s = small_report.summary
    assert s["fail"] == 0 and s["findings"] == 0 and s["ok"]
    assert small_report.exit_code() == 0
    assert set(small_report.timings) == {"identities", "splittings"}


def test_records_sorted_and_self_described(small_report):
    keys = [(r["claim"], json.dumps(r["params"], sort_keys=True))
            for r in small_report.records]
    assert keys == sorted(keys)
    for r in small_report.records:
        assert r["statement"] == CLAIMS[r["claim"]]
        if r["status"] == "fail":
            assert r["witness"] is not None


def test_run_is_deterministic_and_parallel_safe():
    plan = VerificationPlan(checks=("identities", "characters"), **SMALL)
    one = stable_body(run(plan).to_json())
    two = stable_body(run(plan).to_json())
    assert one == two
    par = VerificationPlan(checks=("identities", "characters"), jobs=2, **SMALL)
    assert stable_body(run(par).to_json()) == one.replace('"jobs": 1', '"jobs": 2')


def test_spectra_run_reports_stated_set_finding():
    plan = VerificationPlan(checks=("spectra",), max_i=1, max_a=1,
                            max_k=2, max_l=2)
    rep = run(plan)
    assert rep.summary["fail"] == 0
    assert rep.summary["findings"] == 1
    f = rep.findings[0]
    assert f["claim"] == "SPECTRUM-DELPQD"
    assert f["params"]["cells"] == [[1, 1]]
    assert rep.exit_code() == 1


def test_twin_alphabet_identities_and_exactness():
    plan = VerificationPlan(m=2, n=1, max_k=3, max_l=3, max_i=1, max_a=2,
                            max_p=2, max_r=2,
                            checks=("identities", "exactness"))
    rep = run(plan)
    assert rep.summary["ok"]
    # the one-line homology cell sits at offset m-n = 1, k = m = 2
    cells = {(r["params"]["offset"], r["params"]["k"]): r["status"]
             for r in rep.records if r["claim"] == "K-EXACTNESS"}
    assert cells[(1, 2)] == "pass"


def test_alphabet_specific_groups_skip_on_twin():
    plan = VerificationPlan(m=2, n=1, checks=("constructions", "characters"),
                            **SMALL)
    rep = run(plan)
    assert rep.summary["fail"] == 0
    assert all(r["status"] == "skip" for r in rep.records)


def test_report_schema_validates(small_report):
    jsonschema = pytest.importorskip("jsonschema")
    from importlib.resources import files

    schema = json.loads(
        files("superkoszul").joinpath("schemas/report.schema.json").read_text()
    )
    jsonschema.validate(small_report.to_json(), schema)


# ---------------------------------------------------------------------------
# single-command reports


def test_construct_report_y():
    out = construct_report("ysummand", (1, 1))
    assert out["ok"] and out["irreducible"]
    assert out["dim"] == 15
    assert out["highest_weight"] == [1, 0, 0, 1]
    assert out["characters"]["closed_formula"]["equal"]
    assert out["characters"]["v_formula"]["equal"]
    assert out["characters"]["v_formula"]["convention"] == "unsigned"


def test_construct_report_z1_uses_derived_label():
    out = construct_report("z1", (1,))
    assert out["ok"]
    assert out["highest_weight"] == [2, 1, -1, 1]
    assert out["characters"]["v_formula"]["label"] == [2, 1, -1, 1]


def test_construct_report_h31():
    out = construct_report("h31", ())
    assert out["ok"] and out["dim"] == 1
    assert out["highest_weight"] == [1, 1, 1, 1]


def test_construct_report_ilambda():
    out = construct_report("ilambda", (2, 1))
    assert out["ok"]
    assert out["highest_weight"] == [2, 1, 0, 0]
    assert out["characters"]["closed_formula"]["convention"] == "signed"


def test_construct_report_imd_small_k_skips_closed_form():
    out = construct_report("imd", (1, 1))
    assert out["characters"]["closed_formula"].get("skipped")
    assert out["ok"]  # irreducibility and the V-formula leg still hold


def test_spectrum_report_flags_stated_mismatch():
    ok_cell = spectrum_report("delPQd", (0, 1))
    assert ok_cell["ok"] and ok_cell["matches_stated"]
    bad_cell = spectrum_report("delPQd", (1, 1))
    assert bad_cell["ok"] and bad_cell["matches_stated"] is False
    assert bad_cell["derived"] == ["5/6", "4/3"]
    assert bad_cell["stated"] == ["2/3", "1"]
    transfer = spectrum_report("PdeldQ", (0, 1, 1))
    assert transfer["ok"] and transfer["matches_stated"]


def test_character_report_formulas():
    typ = character_report("typical", (2, 1, -1, 1))
    kac = character_report("kac", (2, 1, -1, 1))
    assert typ["canonical"] == kac["canonical"] is not None
    sch = character_report("schur", (2, 1))
    assert sch["convention"] == "signed"
    auto = character_report("auto", (1, 0, 0, 0))
    assert auto["canonical"] is not None


# ---------------------------------------------------------------------------
# exports


def test_export_matrix_round_trip(tmp_path):
    out = export_matrix("d", (1, 1), (3, 1), cache_dir=str(tmp_path))
    mat = SparseMap.from_triples(out)
    fresh = KoszulContext(SuperSpace(3, 1)).pair_d(1, 1)
    assert mat.entries == fresh.entries
    # re-export reads the cached entry and must be bit-identical
    again = export_matrix("d", (1, 1), (3, 1), cache_dir=str(tmp_path))
    assert json.dumps(out, sort_keys=True) == json.dumps(again, sort_keys=True)


def test_export_matrix_unknown_kind():
    with pytest.raises(KeyError):
        export_matrix("nope", (1, 1), (3, 1))


def test_export_basis_alt2():
    out = export_basis("alt", 2, (3, 1))
    assert out["dim"] == 7 and len(out["vectors"]) == 7
    for vec in out["vectors"]:
        assert set(vec) == {"label", "weight", "parity", "expansion"}


def test_export_report_round_trip(tmp_path):
    plan = VerificationPlan(checks=("identities",), **SMALL)
    blob = run(plan).to_json()
    store_report(blob, str(tmp_path))
    back = export_report("last", cache_dir=str(tmp_path))
    assert json.dumps(back, sort_keys=True) == json.dumps(blob, sort_keys=True)
    with pytest.raises(KeyError):
        export_report("other", cache_dir=str(tmp_path))


def test_export_report_requires_cache(monkeypatch):
    monkeypatch.delenv("SUPERKOSZUL_CACHE", raising=False)
    with pytest.raises(KeyError):
        export_report("last")
