import pytest

from qlstar.checks import KNOWN_DEFECTS, PATH_ORDER, CheckResult, run_suite


@pytest.fixture(scope="module")
def results():
    out = {}
    for suite in ("core", "convexity", "paths"):
        for r in run_suite(suite, seed=0, samples=5):
            out[r.name] = r
    return out


def test_no_unexplained_failures(results):
    bad = {n: r.examples[:2] for n, r in results.items() if r.status == "fail"}
    assert not bad


def test_every_check_ran(results):
    assert all(r.cases > 0 for r in results.values())
    assert set(PATH_ORDER) <= set(results)


@pytest.mark.parametrize("name", ["Thm 14.20", "Thm 17.1(a)", "Thm 17.1(b)", "Rem 15.6 bound",
                                  "Cor 15.2", "Thm 18.4(b)", "Thm 13.4 witness"])
def test_documented_defects_still_reproduce(results, name):
    assert results[name].status == "known-defect"


@pytest.mark.parametrize("name", ["Thm 14.20 (cofinal => (iii))", "Thm 17.1(a) (q > p+2)",
                                  "Cor 15.2 (end pairs split)", "Thm 18.4(b) (T to T')",
                                  "Thm 14.18 (ii)<=>(iii)", "Thm 15.1", "Prop 18.1", "Prop 18.2"])
def test_corrected_statements_hold(results, name):
    assert results[name].status == "pass"


def test_known_defects_have_reasons():
    assert all(isinstance(v, str) and v for v in KNOWN_DEFECTS.values())


def test_result_bookkeeping():
    r = CheckResult("x")
    r.case(True)
    r.case(False, "first")
    assert (r.cases, r.violations, r.status) == (2, 1, "fail")
    assert r.to_json()["examples"] == ["first"]


def test_unknown_suite():
    with pytest.raises(KeyError):
        run_suite("nope")
