import numpy as np
import pytest

from conftest import FIXTURES
from spherecode import (
    AngleSystem,
    Case,
    Code,
    case_gap_project,
    case_ramsey_project,
    case_small_ak,
    classify_case,
    decompose,
    factor_gram,
    g_closed_form,
    gram_of,
    verify_trace,
)
from spherecode import io
from spherecode.decomposition import gap_projected_angle, ramsey_t
from spherecode.errors import PreconditionError


def load(name, dim=None):
    out = io.load_code(FIXTURES / name)
    if isinstance(out, np.ndarray):
        return factor_gram(out, dim or out.shape[0])
    return out


def angles(name):
    return io.load_angles(str(FIXTURES / name))


CORPUS = {
    "k0_simplex": ("simplex4.json", "angles_k0_quarter.json", None),
    "orthonormal": ("orthonormal3.json", "angles_orthonormal.json", None),
    "gap": ("gap6_gram.json", "angles_gap.json", None),
    "ramsey": ("ramsey10_gram.json", "angles_ramsey.json", None),
    "ramsey_forced": ("ramsey10_gram.json", "angles_ramsey.json", 1),
}


def formula_residual(rec):
    """Largest gap between a child's products and the closed forms, from raw vectors."""
    p = rec.params
    if "projected" not in p:
        return 0.0
    G = gram_of(rec.code)
    child = rec.children[-1]
    Gc = gram_of(child.code)
    if rec.case is Case.GAP_ELL:
        idx, a_s = p["subset"], rec.angles.angles[p["color"] - 1]
        want = (G[np.ix_(idx, idx)] - a_s ** 2) / (1 - a_s ** 2)
    else:
        idx, a_r, t = p["M"], rec.angles.angles[p["color"] - 1], len(p["T"])
        want = np.vectorize(lambda a: g_closed_form(a, a_r, t))(G[np.ix_(idx, idx)])
    off = ~np.eye(len(idx), dtype=bool)
    return float(np.max(np.abs(Gc - want)[off])) if off.any() else 0.0


def perturb_projected(trace, path, delta=1e-3):
    rec = dict(trace.root.walk())[path]
    L = rec.params["projected"]
    rec.params["projected"] = AngleSystem(L.beta, [L.angles[0] + delta, *L.angles[1:]])


class TestClassify:
    def test_cases(self):
        assert classify_case(AngleSystem(0.5)) == (Case.BASE_K0, None)
        assert classify_case(AngleSystem(0.5, [0.1])) == (Case.SMALL_AK, None)
        assert classify_case(AngleSystem(0.5, [0.05, 0.5])) == (Case.GAP_ELL, 2)
        assert classify_case(AngleSystem(0.5, [0.5, 0.6])) == (Case.RAMSEY, None)

    def test_largest_gap_index(self):
        case, ell = classify_case(AngleSystem(0.5, [0.01, 0.02, 0.3, 0.7]))
        assert case is Case.GAP_ELL and ell == 3

    def test_ramsey_t(self):
        assert ramsey_t(0.5, 2) == 256


@pytest.mark.parametrize("name", sorted(CORPUS))
def test_corpus_round_trip(name):
    code_file, angle_file, force_t = CORPUS[name]
    trace = decompose(load(code_file), angles(angle_file), force_t=force_t)
    assert trace.verified
    report = verify_trace(trace)
    assert report.passed and report.bound == trace.claimed_bound
    assert trace.claimed_bound >= len(trace.root.code)
    for _, rec in trace.root.walk():
        assert rec.invalid is None
        assert formula_residual(rec) <= 1e-9
    again = io.trace_from_dict(io.trace_to_dict(trace))
    assert verify_trace(again).passed


def test_expected_shapes():
    t = decompose(load("simplex4.json"), angles("angles_k0_quarter.json"))
    assert t.root.case is Case.BASE_K0 and t.claimed_bound == 5
    t = decompose(load("orthonormal3.json"), angles("angles_orthonormal.json"))
    assert t.root.case is Case.SMALL_AK and t.claimed_bound == 4
    t = decompose(load("gap6_gram.json"), angles("angles_gap.json"))
    assert t.root.case is Case.GAP_ELL and t.claimed_bound == 35
    assert [c.case for c in t.root.children] == [Case.SMALL_AK, Case.SIZE_TRIVIAL]
    t = decompose(load("ramsey10_gram.json"), angles("angles_ramsey.json"))
    assert t.root.case is Case.SIZE_TRIVIAL
    assert t.root.params["classified"] == "RAMSEY"


def test_forced_ramsey_chain():
    t = decompose(load("ramsey10_gram.json"), angles("angles_ramsey.json"), force_t=1)
    root = t.root
    assert root.case is Case.RAMSEY and root.params["color"] == 1
    want = [g_closed_form(a, 0.5, 1) for a in (0.5, 0.6)]
    assert np.allclose(root.params["projected"].angles, want, atol=1e-12)


@pytest.mark.parametrize("name,path", [("gap", "root"), ("ramsey_forced", "root"),
                                       ("ramsey_forced", "root.0")])
def test_fault_injection_located(name, path):
    code_file, angle_file, force_t = CORPUS[name]
    trace = decompose(load(code_file), angles(angle_file), force_t=force_t)
    perturb_projected(trace, path)
    report = verify_trace(trace)
    assert not report.passed
    assert report.first_failure == path


def test_perturbed_child_angles_caught_at_parent():
    trace = decompose(load("gap6_gram.json"), angles("angles_gap.json"))
    child = trace.root.children[1]
    child.angles = AngleSystem(child.angles.beta, [child.angles.angles[0] + 1e-3])
    assert verify_trace(trace).first_failure == "root"


def test_tampered_bound_fails():
    trace = decompose(load("gap6_gram.json"), angles("angles_gap.json"))
    trace.root.children[0].bound -= 1
    assert not verify_trace(trace).passed


def test_empty_code():
    t = decompose(Code(3, np.zeros((0, 3))), AngleSystem(0.5, [0.0]))
    assert t.root.case is Case.SIZE_TRIVIAL and t.claimed_bound == 0
    assert t.verified


def test_invalid_code_rejected():
    with pytest.raises(PreconditionError):
        decompose(load("simplex4.json"), AngleSystem(0.5))


class TestCaseFunctions:
    def test_small_ak_bound(self):
        rec = case_small_ak(Code(3, np.eye(3)), AngleSystem(0.5, [0.0]))
        assert rec.bound == 4 and rec.params["max_degree"] == 0

    def test_gap_project(self):
        code = load("gap6_gram.json")
        L = angles("angles_gap.json")
        child, L_new, info = case_gap_project(code, L, 2, 0, 2)
        assert len(child) == 2
        assert L_new.beta == pytest.approx(1 / 256)
        assert L_new.angles[0] == pytest.approx(gap_projected_angle(0.5, 0.5))
        assert gram_of(child)[0, 1] == pytest.approx(1 / 3, abs=1e-12)
        assert info["merged"] == []

    def test_gap_project_rejects_low_color(self):
        with pytest.raises(PreconditionError):
            case_gap_project(load("gap6_gram.json"), angles("angles_gap.json"), 2, 0, 1)

    def test_ramsey_project_leaf(self):
        child, L_new, rec = case_ramsey_project(load("ramsey10_gram.json"),
                                                angles("angles_ramsey.json"))
        assert child is None and rec.params["reason"] == "ramsey_hypothesis"
