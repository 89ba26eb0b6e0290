import json
import math

import numpy as np
import pytest

from orlicz_lab.counterexample import (
    Combo,
    CounterexampleInstance,
    MembershipCertificate,
    TImage,
    build_instance,
    certificate_from_json,
    certificate_to_json,
    diagonal_pairs,
    gap_exhibit,
    instance_from_json,
    instance_to_json,
    limit_certificate,
    membership,
    rho_c,
    summing,
    t_operator,
    verify_certificate,
    weak_approx_select,
)
from orlicz_lab.errors import (CertificateError, InputError, NotAMember,
                               TruncationTooSmall)
from orlicz_lab.finite_model import pairing
from orlicz_lab.orlicz_functions import (build_sparse_pair, conjugate,
                                         delta2_witnesses, sparse_schedule)

SQRT3 = math.sqrt(3.0)


@pytest.fixture(scope="module")
def phi():
    return build_sparse_pair(sparse_schedule(bursts=12))


@pytest.fixture(scope="module")
def instance(phi):
    return build_instance(phi, I=4, J=4, N=8, variant="L")


@pytest.fixture(scope="module")
def instance_h(phi):
    return build_instance(phi, I=4, J=4, N=8, variant="H")


def targets(ins):
    return [
        Combo(ins, {("Z0",): 1.0}),
        Combo(ins, {("Y", 1): 0.5, ("one",): 0.02}),
        Combo(ins, {("Y", 2): 1.0, ("Z", 1, 1): 0.0004}),
    ]


def image_add(a: TImage, b: TImage) -> TImage:
    assert a.variant == b.variant
    av, bv = a.v_dict(), b.v_dict()
    return TImage(
        u=tuple(x + y for x, y in zip(a.u, b.u)),
        a=a.a + b.a,
        v=tuple(sorted((k, av[k] + bv[k]) for k in av)),
        variant=a.variant,
        u_tail=a.u_tail + b.u_tail,
    )


def image_scale(a: TImage, c: float) -> TImage:
    return TImage(
        u=tuple(c * x for x in a.u),
        a=c * a.a,
        v=tuple(sorted((k, c * v) for k, v in a.v)),
        variant=a.variant,
        u_tail=c * a.u_tail,
    )


def is_member(ins, image):
    try:
        membership(ins, image)
        return True
    except NotAMember:
        return False


class TestDiagonalPairs:
    def test_enumeration_order(self):
        assert diagonal_pairs(2, 2) == [(1, 1), (2, 1), (1, 2), (2, 2)]

    def test_covers_grid(self):
        pairs = diagonal_pairs(3, 5)
        assert len(pairs) == 15
        assert set(pairs) == {(i, j) for i in range(1, 4) for j in range(1, 6)}


class TestSumming:
    def test_prefix_sums(self):
        assert summing([1.0, 2.0, 3.0]) == (1.0, 3.0, 6.0)
        assert summing([1.0, 2.0], N=4) == (1.0, 3.0, 3.0, 3.0)
        assert summing([1.0, 2.0, 3.0], N=2) == (1.0, 3.0)


class TestInstanceInvariants:
    def test_pairings_are_unit(self, instance):
        ins = instance
        for b in ins.x_seq.blocks:
            pr = pairing(ins.symbol_rv(("X", b.index)),
                         ins.symbol_rv(("Y", b.index)))
            assert pr == pytest.approx(1.0, abs=1e-12)
        assert pairing(ins.symbol_rv(("W0",)), ins.symbol_rv(("Z0",))) == 1.0
        for key in ins.third_keys:
            pr = pairing(ins.symbol_rv(("W", *key)), ins.symbol_rv(("Z", *key)))
            assert pr == pytest.approx(1.0, abs=1e-9)

    def test_disjoint_supports(self, instance):
        ins = instance
        X1 = ins.symbol_rv(("X", ins.x_seq.blocks[0].index))
        W0 = ins.symbol_rv(("W0",))
        Z = ins.symbol_rv(("Z", *ins.third_keys[0]))
        assert pairing(X1, W0) == 0.0
        assert pairing(X1, Z) == 0.0
        assert pairing(W0, Z) == 0.0

    def test_w0_height(self, instance):
        assert instance._height_of[("W0",)] == SQRT3

    def test_truncation_validation(self, phi):
        with pytest.raises(InputError):
            build_instance(phi, 0, 2, 2)
        with pytest.raises(InputError):
            build_instance(phi, 2, 2, 2, variant="Q")


class TestCombo:
    def test_arithmetic_and_vector(self, instance):
        ins = instance
        A = Combo(ins, {("W0",): 2.0}) + 1.0
        B = A - Combo(ins, {("W0",): 2.0})
        assert np.allclose(B.x, 1.0)
        C = Combo(ins, {("X", 1): 1.0}) * 3.0
        atom = ins._atom_of[("X", 1)]
        assert C.x[atom] == 3.0 * ins._height_of[("X", 1)]

    def test_abs_round_trip(self, instance):
        ins = instance
        A = Combo(ins, {("W0",): -1.0, ("Y", 2): 0.5, ("one",): -0.25})
        assert np.allclose(A.abs().x, np.abs(A.x))

    def test_abs_rejects_symbolic_tail(self, instance):
        with pytest.raises(InputError):
            Combo(instance, {("Xtail", 1): 1.0}).abs()

    def test_unknown_symbol(self, instance):
        with pytest.raises(InputError):
            Combo(instance, {("Q", 1): 1.0})


class TestTOperator:
    def test_minus_w0_image_exact(self, instance):
        img = t_operator(instance, Combo(instance, {("W0",): -1.0}))
        assert all(x == 0.0 for x in img.u)
        assert img.a == -1.0
        assert all(v == 0.0 for _, v in img.v)
        assert img.u_tail == 0.0

    def test_positivity(self, instance):
        # T is a positive operator: nonnegative positions have
        # componentwise nonnegative images
        ins = instance
        X = Combo(ins, {("X", 1): 1.0, ("W0",): 0.5, ("one",): 0.25})
        img = t_operator(ins, X)
        assert all(x >= 0.0 for x in img.u)
        assert img.a >= 0.0
        assert all(v >= 0.0 for _, v in img.v)
        assert img.u_tail >= 0.0

    def test_constant_tail_lower_bound(self, instance):
        # u(n) = c/t_n for the constant position c*1 increases toward 0,
        # so inf over n > N sits between the last truncated entry and 0
        ins = instance
        img = t_operator(ins, Combo(ins, {("one",): -2.0}))
        assert img.u[-1] - 1e-15 <= img.u_tail <= 0.0

    def test_discretized_position(self, instance):
        ins = instance
        X = Combo(ins, {("X", 1): 1.0})
        img_combo = t_operator(ins, X)
        img_rv = t_operator(ins, X.as_rv())
        assert img_rv.u == img_combo.u
        assert img_rv.u_tail == math.inf

    def test_rejects_foreign_space(self, instance):
        from orlicz_lab.finite_model import uniform_space
        with pytest.raises(InputError):
            t_operator(instance, uniform_space(3).constant(0.0))


class TestMembership:
    def test_zero_is_member_with_canonical_certificate(self, instance):
        cert = membership(instance, t_operator(instance, Combo(instance, {})))
        assert cert.lam == 0.0
        assert cert.y == (((1, 1), 0.5),)

    def test_minus_w0_not_member_with_farkas_certificate(self, instance):
        with pytest.raises(NotAMember) as exc:
            membership(instance, t_operator(
                instance, Combo(instance, {("W0",): -1.0})))
        cert = exc.value.certificate
        assert cert is not None
        assert cert["__objective__"] < -1e-9
        assert any(label.startswith("a >=") for label in cert)

    def test_x_sr_member_with_unit_lambda(self, instance):
        ins = instance
        s, r = 1, 3
        X_sr = Combo(ins, {("Xtail", r): 2.0 ** s, ("W0",): -1.0,
                           ("W", s, r): 2.0 ** (-s)})
        cert = membership(ins, t_operator(ins, X_sr))
        assert cert.lam == pytest.approx(1.0, abs=1e-6)
        assert cert.y_dict()[(s, r)] == pytest.approx(2.0 ** (-s), rel=1e-6)
        assert cert.row_weighted_sum == pytest.approx(1.0, abs=1e-9)
        assert verify_certificate(ins, t_operator(ins, X_sr), cert)

    def test_certificates_verify_on_random_members(self, instance):
        rng = np.random.default_rng(31)
        ins = instance
        syms = [("X", b.index) for b in ins.x_seq.blocks[:4]] + \
            [("W0",), ("one",)] + [("W", *k) for k in ins.third_keys[:4]]
        for _ in range(40):
            coeffs = {s: float(rng.uniform(0.0, 2.0))
                      for s in syms if rng.random() < 0.5}
            X = Combo(ins, coeffs)
            img = t_operator(ins, X)
            cert = membership(ins, img)  # nonneg positions are members
            assert verify_certificate(ins, img, cert)

    def test_cone_and_monotone(self, instance):
        # membership region of images is a monotone convex cone
        rng = np.random.default_rng(37)
        ins = instance
        syms = [("X", 1), ("X", 2), ("W0",), ("one",), ("W", 1, 1),
                ("W", 2, 1), ("Xtail", 2)]
        members = []
        for _ in range(120):
            coeffs = {s: float(rng.uniform(-1.0, 2.0))
                      for s in syms if rng.random() < 0.6}
            img = t_operator(ins, Combo(ins, coeffs))
            if is_member(ins, img):
                members.append(img)
        assert len(members) >= 10
        for k in range(0, min(len(members) - 1, 20), 2):
            A, B = members[k], members[k + 1]
            assert is_member(ins, image_add(A, B))
            assert is_member(ins, image_scale(A, float(rng.uniform(0.1, 5.0))))
            bump = TImage(u=tuple(0.1 for _ in A.u), a=0.1,
                          v=tuple((key, 0.1) for key, _ in A.v),
                          variant=A.variant, u_tail=0.1)
            assert is_member(ins, image_add(A, bump))

    def test_farkas_certificate_audits(self, instance):
        # every Farkas certificate must price the constraint rows so
        # that mu . b < 0 while mu^T A lies in the span of the equality
        ins = instance
        from orlicz_lab.counterexample import _lp_rows
        X = Combo(ins, {("W0",): -1.0, ("X", 1): 0.3})
        img = t_operator(ins, X)
        with pytest.raises(NotAMember) as exc:
            membership(ins, img)
        cert = dict(exc.value.certificate)
        obj = cert.pop("__objective__")
        labels, A, b, eq, pairs, col = _lp_rows(ins, img)
        mu = np.array([cert.get(lbl, 0.0) for lbl in labels])
        assert np.all(mu >= 0.0)
        assert float(mu @ b) < -1e-9
        combo = mu @ A
        # feasibility of the Farkas system: A^T mu + nu*eq >= 0 for some
        # scalar nu; entries with eq > 0 bound nu from below, entries
        # with eq < 0 from above
        lower = [-combo[i] / eq[i] for i in range(len(eq)) if eq[i] > 0.0]
        nu = max(lower) if lower else 0.0
        assert np.all(combo + nu * eq >= -1e-7)


class TestVerifyCertificate:
    def test_rejects_wrong_lambda(self, instance):
        ins = instance
        img = t_operator(ins, Combo(ins, {("W0",): -1.0}))
        fake = MembershipCertificate(1.0, (((1, 1), 0.5),), "L")
        assert not verify_certificate(ins, img, fake)

    def test_rejects_negative_weights(self, instance):
        img = t_operator(instance, Combo(instance, {}))
        bad = MembershipCertificate(0.0, (((1, 1), -0.5),), "L")
        assert not verify_certificate(instance, img, bad)


class TestRhoC:
    def test_rho_of_minus_w0_is_sqrt3(self, instance):
        value = rho_c(instance, Combo(instance, {("W0",): -1.0}))
        assert value == pytest.approx(SQRT3, abs=1e-4)

    def test_rho_of_zero(self, instance):
        assert abs(rho_c(instance, Combo(instance, {}))) < 1e-5

    def test_rho_of_member_nonpositive(self, instance):
        ins = instance
        X_sr = Combo(ins, {("Xtail", 3): 2.0, ("W0",): -1.0, ("W", 1, 3): 0.5})
        assert rho_c(ins, X_sr) <= 1e-5

    def test_cash_additivity(self, instance):
        ins = instance
        X = Combo(ins, {("W0",): -1.0, ("X", 1): 0.2})
        r0 = rho_c(ins, X)
        r1 = rho_c(ins, X + 0.5)
        assert r1 == pytest.approx(r0 - 0.5, abs=1e-4)

    def test_positive_homogeneity(self, instance):
        ins = instance
        X = Combo(ins, {("W0",): -1.0})
        assert rho_c(ins, X * 2.0) == pytest.approx(
            2.0 * rho_c(ins, X), abs=1e-4)


class TestWeakApproxSelect:
    def test_selection_and_bounds(self, instance):
        ins = instance
        eps = 1e-2
        s, r, X_sr, report = weak_approx_select(ins, targets(ins), eps)
        assert (s, r) == (1, 3)
        for row in report["pairings"]:
            assert row["bound"] < eps
        # the member really is X_sr = 2^s Xtail(r) - W0 + 2^-s W_{s,r}
        assert X_sr.coeffs[("Xtail", r)] == 2.0 ** s
        assert X_sr.coeffs[("W0",)] == -1.0
        assert report["certificate"].lam == pytest.approx(1.0, abs=1e-6)

    def test_eps_too_demanding(self, instance):
        with pytest.raises(TruncationTooSmall):
            weak_approx_select(instance, targets(instance), 1e-12)

    def test_validation(self, instance, instance_h):
        with pytest.raises(InputError):
            weak_approx_select(instance, targets(instance), -1.0)
        with pytest.raises(InputError):
            weak_approx_select(instance, [], 1e-2)
        with pytest.raises(InputError):
            weak_approx_select(instance_h, [Combo(instance_h, {("Z0",): 1.0})],
                               1e-2)


class TestLimitCertificate:
    def _member(self, ins, scale=1.0):
        X = Combo(ins, {("Xtail", 3): 2.0 * scale, ("W0",): -scale,
                        ("W", 1, 3): 0.5 * scale})
        return X, membership(ins, t_operator(ins, X))

    def test_constant_family(self, instance):
        X, cert = self._member(instance)
        members = [(X, cert)] * 5
        out = limit_certificate(instance, members, X)
        assert verify_certificate(instance, t_operator(instance, X), out)

    def test_converging_family(self, instance):
        ins = instance
        X, _ = self._member(ins)
        members = []
        for p in range(1, 8):
            U = X + 2.0 ** (-p)
            members.append((U, membership(ins, t_operator(ins, U))))
        out = limit_certificate(ins, members, X)
        assert verify_certificate(ins, t_operator(ins, X), out)

    def test_rejects_diverging_family(self, instance):
        X, cert = self._member(instance)
        far = X + 1.0
        with pytest.raises(InputError):
            limit_certificate(instance, [(far, membership(
                instance, t_operator(instance, far)))] * 4, X)

    def test_rejects_bad_certificate(self, instance):
        X, _ = self._member(instance)
        fake = MembershipCertificate(0.5, (((1, 1), 2.0),), "L")
        with pytest.raises(CertificateError):
            limit_certificate(instance, [(X, fake)] * 3, X)


class TestGapExhibit:
    def test_headline_report(self, instance):
        report = gap_exhibit(instance, targets(instance), 1e-2)
        assert report["rho_minus_w0"] == pytest.approx(SQRT3, abs=1e-4)
        assert report["delta"] > 1.0
        assert report["infeasibility_certificate"]
        approx = report["approximants"][0]
        assert approx["rho"] <= 1e-5
        assert all(row["bound"] < 1e-2 for row in approx["pairings"])
        assert report["truncation"]["variant"] == "L"


class TestVariantH:
    def test_minus_w0_still_excluded(self, instance_h):
        with pytest.raises(NotAMember):
            membership(instance_h, t_operator(
                instance_h, Combo(instance_h, {("W0",): -1.0})))

    def test_zero_and_nonneg_members(self, instance_h):
        ins = instance_h
        assert membership(ins, t_operator(ins, Combo(ins, {}))).lam == 0.0
        X = Combo(ins, {("X", 1): 1.0, ("W", 2): 0.5})
        img = t_operator(ins, X)
        cert = membership(ins, img)
        assert verify_certificate(ins, img, cert)

    def test_third_region_is_single_indexed(self, instance_h):
        assert instance_h.third_keys == [(j,) for j in range(1, 5)]
        img = t_operator(instance_h, Combo(instance_h, {}))
        assert all(len(k) == 1 for k, _ in img.v)


class TestSerialization:
    def test_certificate_round_trip(self, instance):
        ins = instance
        X = Combo(ins, {("Xtail", 3): 2.0, ("W0",): -1.0, ("W", 1, 3): 0.5})
        cert = membership(ins, t_operator(ins, X))
        again = certificate_from_json(certificate_to_json(cert))
        assert again.lam == cert.lam
        assert again.y == cert.y

    def test_certificate_malformed(self):
        with pytest.raises(InputError):
            certificate_from_json("{\"lambda\": 1.0}")

    def test_instance_round_trip(self, instance):
        text = instance_to_json(instance)
        again = instance_from_json(text)
        assert again.I == instance.I and again.N == instance.N
        assert again.variant == instance.variant
        assert instance_to_json(again) == text

    def test_instance_malformed(self):
        with pytest.raises(InputError):
            instance_from_json("{\"phi\": \"exp\"}")
