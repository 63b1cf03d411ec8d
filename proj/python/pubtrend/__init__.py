"""Yearly PubMed publication counts normalised against reference keywords."""

from ._pubtrend import (
    CountCache,
    CountSeries,
    DipWarning,
    Field,
    KeywordSpec,
    PubtrendError,
    RatioSeries,
    align_years,
    build_term,
    decode_term,
    detect_trailing_dip,
    encode_request,
    encode_term,
    fetch_replay,
    normalize_by_reference,
    normalize_by_set,
    parse_count,
    render_svg,
    run,
    stability_score,
    to_csv,
)

__all__ = [name for name in dir() if not name.startswith("_")]
