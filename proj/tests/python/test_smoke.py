import datetime
import math
import pathlib

import pytest

import pubtrend

ROOT = pathlib.Path(__file__).resolve().parents[2]
BANANA = ROOT / "studies" / "fixtures" / "banana.jsonl"


def series(term, counts):
    return pubtrend.CountSeries(pubtrend.KeywordSpec(term), counts)


def test_build_term():
    spec = pubtrend.KeywordSpec("H1N1")
    assert pubtrend.build_term(spec, 2018) == '"H1N1"[text]+AND+2018[pdat]'
    mesh = pubtrend.KeywordSpec("Thyroid Gland", pubtrend.Field.MESH)
    assert pubtrend.build_term(mesh, 2020) == '"Thyroid Gland"[MESH]+AND+2020[pdat]'


def test_encode_round_trip():
    term = pubtrend.build_term(pubtrend.KeywordSpec("C++ & more"), 1999)
    assert pubtrend.decode_term(pubtrend.encode_term(term)) == term


def test_invalid_term_raises_with_kind():
    with pytest.raises(pubtrend.PubtrendError) as info:
        pubtrend.KeywordSpec("   ")
    assert info.value.kind == "InvalidTerm"


def test_parse_count():
    body = '{"esearchresult":{"count":"420"}}'
    assert pubtrend.parse_count(200, body) == 420
    with pytest.raises(pubtrend.PubtrendError):
        pubtrend.parse_count(200, "<html>")


def test_normalisation():
    k = series("kw", {2000: 10, 2001: 0, 2002: 6})
    r = series("ref", {2000: 5, 2001: 0, 2002: 3})
    single = pubtrend.normalize_by_reference(k, r)
    assert single.values == {2000: 2.0, 2001: None, 2002: 2.0}
    assert pubtrend.normalize_by_set(k, [r]).values == single.values
    mean = pubtrend.normalize_by_set(k, [r, series("ref2", {2000: 15, 2001: 0, 2002: 9})])
    assert mean.reference_label == "mean(ref, ref2)"
    assert math.isclose(mean.values[2000], 1.0)
    assert pubtrend.stability_score(single) == 0.0


def test_align_and_dip():
    a, b = pubtrend.align_years([series("a", {2018: 1, 2019: 100, 2020: 40}), series("b", {2019: 3, 2020: 3})])
    assert sorted(a.counts) == [2019, 2020]
    dip = pubtrend.detect_trailing_dip(a)
    assert dip.year == 2020 and dip.previous_count == 100
    assert pubtrend.detect_trailing_dip(b) is None


def test_csv_and_svg():
    k = series("kw", {2000: 1, 2001: 2})
    r = pubtrend.normalize_by_reference(k, series("ref", {2000: 1, 2001: 0}))
    csv = pubtrend.to_csv([("kw", r)])
    assert csv.splitlines()[0] == "year,kw"
    assert csv.splitlines()[2] == "2001,"
    svg = pubtrend.render_svg("t", [("kw", k)])
    assert svg.startswith("<svg") or svg.startswith("<?xml")


def test_cache_round_trip(tmp_path):
    path = tmp_path / "cache.jsonl"
    cache = pubtrend.CountCache.load(path)
    when = datetime.datetime(2021, 2, 8, tzinfo=datetime.timezone.utc)
    cache.put("pubmed", "t", 7, when)
    cache.flush()
    assert pubtrend.CountCache.load(path).get("pubmed", "t") == 7


def test_fetch_replay():
    s = pubtrend.fetch_replay(BANANA, pubtrend.KeywordSpec("banana"), 2019, 2019)
    assert s.counts == {2019: 420}
    with pytest.raises(pubtrend.PubtrendError) as info:
        pubtrend.fetch_replay(BANANA, pubtrend.KeywordSpec("banana"), 2018, 2018)
    assert info.value.kind == "ReplayMiss"


def test_run_cli():
    code, out, err = pubtrend.run(["--help"], {})
    assert code == 0 and "--keyword" in out
    code, out, err = pubtrend.run(["--keyword", "x"], {})
    assert code == 2 and err.startswith("pubtrend: error:")
