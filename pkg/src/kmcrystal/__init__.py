"""Crystals of B(infinity) for finite and affine root data, with parabolic,
stalk-character and ADHM companions."""
from .b_infinity import BInfinity, CrystalGraph, enumerate_graph
from .crystal_core import ElementaryCrystal, TensorCrystal, tensor
from .root_datum import RootDatum, RootDatumError, affinize, build_finite, from_cartan

__all__ = [
    "BInfinity",
    "CrystalGraph",
    "ElementaryCrystal",
    "RootDatum",
    "RootDatumError",
    "TensorCrystal",
    "affinize",
    "build_finite",
    "enumerate_graph",
    "from_cartan",
    "tensor",
]
