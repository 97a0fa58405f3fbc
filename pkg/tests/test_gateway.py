from datetime import timedelta

import pytest

from ehrgate.catalog import Tag, ViewKind
from ehrgate.errors import (
    AmbiguousMatch,
    Forbidden,
    InvalidCredentials,
    MissingProbe,
    NoMatch,
    SessionExpired,
)
from ehrgate.gateway import GatewayService
from ehrgate.synth import SynthConfig, gen_fingerprint_template, gen_iris_template, perturb_fingerprint, perturb_iris


def test_biometric_or_single_modality(service, enrolled):
    p = enrolled[1]
    probe = perturb_iris(p["iris"], 0.10, 0.0, seed=500)
    ctx, ref = service.authenticate_biometric(iris_probe=probe)
    assert ref == p["ref"]
    assert ctx.role == "emergency_responder"
    assert ctx.bound_patient_ref == p["ref"]


def test_biometric_no_match(service, enrolled):
    probe = gen_fingerprint_template(999_999, 30)
    with pytest.raises(NoMatch):
        service.authenticate_biometric(fingerprint_probe=probe)
    entries = service.store.query_audit()
    assert entries[-1].outcome == "denied"


def test_biometric_ambiguous(service, enrolled):
    iris_probe = perturb_iris(enrolled[0]["iris"], 0.10, 0.0, seed=1)
    fp_probe = perturb_fingerprint(enrolled[1]["fingerprint"], SynthConfig(), seed=2)
    with pytest.raises(AmbiguousMatch):
        service.authenticate_biometric(iris_probe=iris_probe, fingerprint_probe=fp_probe)


def test_biometric_and_mode(service, enrolled):
    p = enrolled[0]
    iris_probe = perturb_iris(p["iris"], 0.10, 0.0, seed=3)
    fp_probe = perturb_fingerprint(p["fingerprint"], SynthConfig(), seed=4)
    ctx, ref = service.authenticate_biometric(
        iris_probe=iris_probe, fingerprint_probe=fp_probe, fusion_mode="AND"
    )
    assert ref == p["ref"]
    with pytest.raises(MissingProbe):
        service.authenticate_biometric(iris_probe=iris_probe, fusion_mode="AND")


def test_biometric_and_mode_one_modality_failing(service, enrolled):
    iris_probe = perturb_iris(enrolled[0]["iris"], 0.10, 0.0, seed=3)
    fp_probe = gen_fingerprint_template(888_888, 30)
    with pytest.raises(NoMatch):
        service.authenticate_biometric(
            iris_probe=iris_probe, fingerprint_probe=fp_probe, fusion_mode="AND"
        )


def test_biometric_requires_probe(service):
    with pytest.raises(MissingProbe):
        service.authenticate_biometric()


def test_doctor_login(service):
    ctx = service.doctor_login("drwho", "gallifrey")
    assert ctx.role == "doctor"
    with pytest.raises(InvalidCredentials):
        service.doctor_login("drwho", "wrong")
    with pytest.raises(InvalidCredentials):
        service.doctor_login("nobody", "gallifrey")


def test_responder_bound_to_matched_patient(service, enrolled):
    p = enrolled[0]
    other = enrolled[1]
    probe = perturb_iris(p["iris"], 0.10, 0.0, seed=11)
    ctx, ref = service.authenticate_biometric(iris_probe=probe)
    fr = service.api_get_view(ctx, ref, ViewKind.EMERGENCY)
    assert set(fr.values) <= {
        a.id for a in service.store.catalog.attributes if Tag.EMERGENCY in a.tags
    }
    with pytest.raises(Forbidden):
        service.api_get_view(ctx, other["ref"], ViewKind.EMERGENCY)
    with pytest.raises(Forbidden):
        service.api_get_view(ctx, ref, ViewKind.FULL)


def test_doctor_views(service, enrolled):
    p = enrolled[0]
    ctx = service.doctor_login("drwho", "gallifrey")
    basic = service.api_get_view(ctx, p["ref"], ViewKind.BASIC_SHARE)
    assert "bio_data.sexuality" not in basic.values
    full = service.api_get_view(ctx, p["ref"], ViewKind.FULL, presented_key=p["key"])
    assert full.values == p["values"]
    with pytest.raises(Forbidden):
        service.api_get_view(ctx, p["ref"], ViewKind.EMERGENCY)


def test_register_role_gate(service, enrolled, catalog):
    from ehrgate.synth import gen_enrollee_templates, gen_patient

    iris_t, fp_t = gen_enrollee_templates(SynthConfig(seed=77), 50)
    demo, vals = gen_patient(50, catalog)
    dctx = service.doctor_login("drwho", "gallifrey")
    ref, key = service.api_register(dctx, demo, vals, [iris_t], [fp_t])
    assert ref.startswith("P") and len(key) == 64

    probe = perturb_iris(enrolled[0]["iris"], 0.10, 0.0, seed=12)
    ectx, _ = service.authenticate_biometric(iris_probe=probe)
    with pytest.raises(Forbidden):
        service.api_register(ectx, demo, vals, [iris_t], [])


def test_list_patients(service, enrolled):
    ctx = service.doctor_login("drwho", "gallifrey")
    rows = service.api_list_patients(ctx)
    assert [r for r, _ in rows] == sorted(r for r, _ in rows)
    assert len(rows) == 3


def test_share_export(service, enrolled, catalog):
    p = enrolled[0]
    service.store.update_record(p["ref"], {"statuses.hiv_aids": "positive"}, p["key"])
    ctx = service.doctor_login("drwho", "gallifrey")
    export = service.api_share_export(ctx, p["ref"], "employer")
    assert export.recipient_type == "employer"
    assert "statuses.hiv_aids" not in export.payload.values
    assert "bio_data.sexuality" not in export.payload.values
    assert all(
        Tag.CONFIDENTIAL not in catalog.get(k).tags for k in export.payload.values
    )
    audit = service.store.query_audit(role="external")
    assert audit and audit[-1].patient_ref == p["ref"]


def test_share_export_unknown_patient(service):
    ctx = service.doctor_login("drwho", "gallifrey")
    from ehrgate.errors import UnknownPatient

    with pytest.raises(UnknownPatient):
        service.api_share_export(ctx, "P99999999", "employer")


def test_expired_sessions_authorize_nothing(store, enrolled):
    svc = GatewayService(store, emergency_ttl=timedelta(seconds=-1), doctor_ttl=timedelta(seconds=-1))
    store.add_doctor("late", "pw")
    ctx = svc.doctor_login("late", "pw")
    for call in (
        lambda: svc.api_get_view(ctx, enrolled[0]["ref"], ViewKind.BASIC_SHARE),
        lambda: svc.api_list_patients(ctx),
        lambda: svc.api_register(ctx, {}, {}, [enrolled[0]["iris"]], []),
        lambda: svc.api_share_export(ctx, enrolled[0]["ref"], "employer"),
        lambda: svc.api_update_record(ctx, enrolled[0]["ref"], {}),
    ):
        with pytest.raises(SessionExpired):
            call()
    with pytest.raises(SessionExpired):
        svc.resolve_session(ctx.session_token)


def test_forbidden_view_request_audits_denied(service, enrolled):
    p = enrolled[0]
    probe = perturb_iris(p["iris"], 0.10, 0.0, seed=21)
    ctx, _ = service.authenticate_biometric(iris_probe=probe)
    before = len(service.store.query_audit())
    with pytest.raises(Forbidden):
        service.api_get_view(ctx, enrolled[1]["ref"], ViewKind.EMERGENCY)
    entries = service.store.query_audit()
    assert len(entries) == before + 1 and entries[-1].outcome == "denied"
