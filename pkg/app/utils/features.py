"""Feature extraction from parser configurations."""

import itertools
import threading
from functools import lru_cache
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

from app.core.exceptions import DataError
from app.schemas.features import Address, Attribute, FeatureAtom, FeatureTemplate
from app.schemas.treebank import Sentence, Token
from app.utils.transitions import Configuration, TransitionSystem

NULL = "<NULL>"
ROOT = "<ROOT>"

FeatureVector = Tuple[int, ...]


class FeatureInterner:

    """Bijective mapping between feature strings and integer ids.

    Lookups may run concurrently; insertion takes a lock.
    """

    def __init__(self, strings: Iterable[str] = ()):
        self._ids: Dict[str, int] = {}
        self._strings: List[str] = []
        self._lock = threading.Lock()
        for string in strings:
            self.intern(string)

    def __len__(self) -> int:
        return len(self._strings)

    def intern(self, string: str) -> int:
        feature_id = self._ids.get(string)
        if feature_id is not None:
            return feature_id
        with self._lock:
            feature_id = self._ids.get(string)
            if feature_id is None:
                feature_id = len(self._strings)
                self._strings.append(string)
                self._ids[string] = feature_id
        return feature_id

    def get(self, string: str) -> Optional[int]:
        return self._ids.get(string)

    def string(self, feature_id: int) -> str:
        return self._strings[feature_id]


def _atom(address: Address, attribute: Attribute) -> FeatureAtom:
    return FeatureAtom(address=address, attribute=attribute)


def _single(address: Address, attribute: Attribute) -> FeatureTemplate:
    return FeatureTemplate(atoms=(_atom(address, attribute),))


def _pair(first: FeatureTemplate, second: FeatureTemplate) -> FeatureTemplate:
    return FeatureTemplate(atoms=first.atoms + second.atoms)


def default_templates(system: TransitionSystem = TransitionSystem.ARC_EAGER) -> List[FeatureTemplate]:
    """Baseline feature model, shared by both transition systems."""
    A, T = Address, Attribute
    templates = [
        _single(A.S0, T.FORM),
        _single(A.B0, T.FORM),
        _single(A.B1, T.FORM),
        _single(A.S0, T.POSTAG),
        _single(A.S1, T.POSTAG),
        _single(A.B0, T.POSTAG),
        _single(A.B1, T.POSTAG),
        _single(A.B2, T.POSTAG),
        _single(A.S0, T.CPOSTAG),
        _single(A.B0, T.CPOSTAG),
        _single(A.LDEP_S0, T.DEPREL),
        _single(A.RDEP_S0, T.DEPREL),
        _single(A.LDEP_B0, T.DEPREL),
        _pair(_single(A.S0, T.POSTAG), _single(A.B0, T.POSTAG)),
        _pair(_single(A.S0, T.FORM), _single(A.B0, T.POSTAG)),
        _pair(_single(A.S0, T.POSTAG), _single(A.B0, T.FORM)),
    ]
    return templates


def candidate_pool(system: TransitionSystem = TransitionSystem.ARC_EAGER) -> List[FeatureTemplate]:
    """Defaults, deeper addresses and all pairwise conjunctions of singletons, by name."""
    A, T = Address, Attribute
    defaults = default_templates(system)
    singletons = [template for template in defaults if len(template.atoms) == 1]
    singletons += [
        _single(A.S2, T.POSTAG),
        _single(A.B3, T.POSTAG),
        _single(A.HEAD_S0, T.POSTAG),
        _single(A.HEAD_S0, T.FORM),
        _single(A.RDEP_B0, T.DEPREL),
    ]
    pool = {template.name: template for template in defaults + singletons}
    for first, second in itertools.combinations(singletons, 2):
        conjunction = _pair(first, second)
        pool.setdefault(conjunction.name, conjunction)
    return [pool[name] for name in sorted(pool)]


def _resolve(config: Configuration, address: Address) -> Optional[int]:
    stack, buffer = config.stack, config.buffer
    if address == Address.S0:
        return stack[-1] if stack else None
    if address == Address.S1:
        return stack[-2] if len(stack) >= 2 else None
    if address == Address.S2:
        return stack[-3] if len(stack) >= 3 else None
    if address in (Address.B0, Address.B1, Address.B2, Address.B3):
        index = int(address.value[1])
        return buffer[index] if len(buffer) > index else None
    if address == Address.HEAD_S0:
        return config.heads.get(stack[-1]) if stack else None

    anchor = _resolve(config, Address.S0 if address.value.endswith("(S0)") else Address.B0)
    if anchor is None:
        return None
    dependents = config.dependents(anchor)
    if not dependents:
        return None
    return dependents[0] if address in (Address.LDEP_S0, Address.LDEP_B0) else dependents[-1]


def _value(config: Configuration, tokens: Sequence[Token], token: Optional[int], attribute: Attribute) -> str:
    if token is None:
        return NULL
    if attribute == Attribute.DEPREL:
        return config.labels.get(token, NULL)
    if token == 0:
        return ROOT
    return getattr(tokens[token - 1], attribute.value)


@lru_cache(maxsize=64)
def _compile(templates: Tuple[FeatureTemplate, ...]) -> List[Tuple[str, Tuple[Tuple[Address, Attribute], ...]]]:
    return [
        (template.name, tuple((atom.address, atom.attribute) for atom in template.atoms))
        for template in templates
    ]


def feature_strings(config: Configuration, sentence: Sentence, templates: Sequence[FeatureTemplate]) -> List[str]:
    """One "name=v1|v2|..." string per template."""
    tokens = sentence.tokens
    resolved: Dict[Address, Optional[int]] = {}
    strings = []
    for name, atoms in _compile(tuple(templates)):
        values = []
        for address, attribute in atoms:
            if address not in resolved:
                resolved[address] = _resolve(config, address)
            values.append(_value(config, tokens, resolved[address], attribute))
        strings.append(f"{name}={'|'.join(values)}")
    return strings


def extract(
    config: Configuration,
    sentence: Sentence,
    templates: Sequence[FeatureTemplate],
    interner: FeatureInterner,
    grow: bool = True,
) -> FeatureVector:
    """Sorted, deduplicated feature ids; unseen strings are dropped when grow is False."""
    ids = set()
    for string in feature_strings(config, sentence, templates):
        feature_id = interner.intern(string) if grow else interner.get(string)
        if feature_id is not None:
            ids.add(feature_id)
    return tuple(sorted(ids))


def dump_templates(templates: Iterable[FeatureTemplate]) -> str:
    """One canonical template name per line."""
    return "".join(f"{template.name}\n" for template in templates)


def load_templates(text: str) -> List[FeatureTemplate]:
    """Parse a template file; blank lines and "#" comments are skipped."""
    templates = []
    for line_number, line in enumerate(text.splitlines(), start=1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        try:
            templates.append(FeatureTemplate.parse(line))
        except ValueError as e:
            raise DataError(f"template file line {line_number}: {e}")
    if not templates:
        raise DataError("template file lists no templates")
    return templates
