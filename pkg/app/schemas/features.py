"""Pydantic schemas for feature templates."""

from enum import Enum
from typing import Tuple

from pydantic import BaseModel, ConfigDict, field_validator


class Address(str, Enum):

    """Positions a feature atom can read from."""

    S0 = "S0"
    S1 = "S1"
    S2 = "S2"
    B0 = "B0"
    B1 = "B1"
    B2 = "B2"
    B3 = "B3"
    HEAD_S0 = "head(S0)"
    LDEP_S0 = "ldep(S0)"
    RDEP_S0 = "rdep(S0)"
    LDEP_B0 = "ldep(B0)"
    RDEP_B0 = "rdep(B0)"


class Attribute(str, Enum):

    """Token attributes a feature atom can read."""

    FORM = "form"
    CPOSTAG = "cpostag"
    POSTAG = "postag"
    DEPREL = "deprel"


class FeatureAtom(BaseModel):

    """One (address, attribute) pair."""

    model_config = ConfigDict(frozen=True)

    address: Address
    attribute: Attribute

    @property
    def name(self) -> str:
        return f"{self.address.value}.{self.attribute.value}"


class FeatureTemplate(BaseModel):

    """Conjunction of atoms producing one feature per configuration."""

    model_config = ConfigDict(frozen=True)

    atoms: Tuple[FeatureAtom, ...]

    @field_validator("atoms")
    @classmethod
    def _non_empty(cls, atoms: Tuple[FeatureAtom, ...]) -> Tuple[FeatureAtom, ...]:
        if not atoms:
            raise ValueError("a feature template needs at least one atom")
        return atoms

    @property
    def name(self) -> str:
        return "+".join(atom.name for atom in self.atoms)

    @classmethod
    def parse(cls, name: str) -> "FeatureTemplate":
        """Build a template from its canonical name, e.g. "S0.postag+B0.form"."""
        atoms = []
        for part in name.strip().split("+"):
            address, dot, attribute = part.rpartition(".")
            if not dot:
                raise ValueError(f"malformed feature atom {part!r}")
            atoms.append(
                FeatureAtom(address=Address(address), attribute=Attribute(attribute))
            )
        return cls(atoms=tuple(atoms))

    def __str__(self) -> str:
        return self.name
