"""Parsers turning the four public catalog exports into normalized records."""

from .nvd import parse_nvd_feed, FeedParseError, UnsupportedVersionError
from .cwe import parse_cwe_catalog, CatalogConfigurationError, CatalogIntegrityError
from .capec import parse_capec_catalog
from .attack import parse_attack_bundle

__all__ = [
    "parse_nvd_feed",
    "parse_cwe_catalog",
    "parse_capec_catalog",
    "parse_attack_bundle",
    "FeedParseError",
    "UnsupportedVersionError",
    "CatalogConfigurationError",
    "CatalogIntegrityError",
]
