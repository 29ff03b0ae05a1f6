"""extforge: small-bias generators, Trevisan and Raz extractors, the
non-malleability compiler and a privacy amplification simulator, with a
brute-force oracle for checking them at toy sizes."""

__version__ = "0.1.0"

from .bitcore import BitString, FieldElement, FieldSpec, concat, field, gf_add, gf_inv, gf_mul, gf_pow

__all__ = [
    "BitString",
    "FieldElement",
    "FieldSpec",
    "concat",
    "field",
    "gf_add",
    "gf_inv",
    "gf_mul",
    "gf_pow",
    "__version__",
]
