"""Reading, validating and writing CoNLL-X treebanks."""

import logging
from pathlib import Path
from typing import Iterable, List, Optional, Sequence, Tuple, Union

from pydantic import ValidationError

from app.core.exceptions import ConllFormatError, TreeStructureError
from app.schemas.treebank import EMPTY, Sentence, Token, Treebank

logger = logging.getLogger(__name__)

COLUMN_COUNT = 10


def tree_error(heads: Sequence[int]) -> Optional[Tuple[str, int]]:
    """Return (message, 0-based token index) if heads are not a single-rooted tree."""
    n = len(heads)
    roots = [i for i, head in enumerate(heads) if head == 0]
    for i, head in enumerate(heads):
        if head < 0 or head > n:
            return f"head out of range: {head}", i
        if head == i + 1:
            return "token is its own head", i
    if not roots and n:
        return "no token is attached to the root", 0
    if len(roots) > 1:
        return f"multiple roots at tokens {[r + 1 for r in roots]}", roots[1]

    # every token must reach 0 without revisiting a node
    state = [0] * (n + 1)  # 0 unvisited, 1 on current path, 2 reaches root
    state[0] = 2
    for start in range(1, n + 1):
        path = []
        node = start
        while state[node] == 0:
            state[node] = 1
            path.append(node)
            node = heads[node - 1]
        if state[node] == 1:
            return f"cycle through token {node}", node - 1
        for visited in path:
            state[visited] = 2
    return None


def is_tree(heads: Sequence[int]) -> bool:
    """True iff heads encode a single tree rooted at the artificial node 0."""
    return tree_error(heads) is None


def attach_extra_roots(heads: Sequence[int]) -> List[int]:
    """Re-attach every root child after the first one to the first root child."""
    repaired = list(heads)
    first_root = None
    for i, head in enumerate(repaired):
        if head != 0:
            continue
        if first_root is None:
            first_root = i + 1
        else:
            repaired[i] = first_root
    return repaired


def _parse_int(value: str, column: str, line_number: int) -> int:
    try:
        return int(value)
    except ValueError:
        raise ConllFormatError(f"non-integer {column} {value!r}", line_number)


def _build_sentence(
    rows: List[Tuple[int, List[str]]],
    lang: Optional[str],
    annotated: bool,
    repair_roots: bool,
) -> Sentence:
    n = len(rows)
    heads = []
    for line_number, columns in rows:
        if not annotated and columns[6] == EMPTY:
            heads.append(0)
            continue
        head = _parse_int(columns[6], "head", line_number)
        if head < 0 or head > n:
            raise TreeStructureError(
                f"head out of range: {head} in a {n}-token sentence", line_number
            )
        heads.append(head)

    if annotated:
        problem = tree_error(heads)
        if problem and problem[0].startswith("multiple roots") and repair_roots:
            logger.warning(
                f"Re-attaching extra roots of sentence at line {rows[0][0]}"
            )
            heads = attach_extra_roots(heads)
            problem = tree_error(heads)
        if problem:
            message, index = problem
            raise TreeStructureError(message, rows[index][0])

    tokens = []
    for (line_number, columns), head in zip(rows, heads):
        try:
            tokens.append(
                Token(
                    id=_parse_int(columns[0], "id", line_number),
                    form=columns[1],
                    lemma=columns[2],
                    cpostag=columns[3],
                    postag=columns[4],
                    feats=columns[5],
                    head=head,
                    deprel=columns[7],
                )
            )
        except ValidationError as e:
            raise ConllFormatError(e.errors()[0]["msg"], line_number)

    try:
        return Sentence(tokens=tuple(tokens), lang=lang)
    except ValidationError as e:
        raise ConllFormatError(e.errors()[0]["msg"], rows[0][0])


def read_treebank(
    text: Union[str, Iterable[str]],
    lang: Optional[str] = None,
    source: str = "",
    annotated: bool = True,
    repair_roots: bool = False,
) -> Treebank:
    """Parse CoNLL-X text into a validated Treebank.

    With ``annotated=False`` the HEAD column may be "_" and no tree check is
    made; this is how raw parser input is read. PHEAD/PDEPREL are ignored.
    """
    lines = text.splitlines() if isinstance(text, str) else text
    sentences = []
    rows: List[Tuple[int, List[str]]] = []

    for line_number, raw in enumerate(lines, start=1):
        line = raw.rstrip("\r\n")
        if not line.strip():
            if rows:
                sentences.append(_build_sentence(rows, lang, annotated, repair_roots))
                rows = []
            continue
        columns = line.split("\t")
        if len(columns) != COLUMN_COUNT:
            raise ConllFormatError(
                f"expected {COLUMN_COUNT} tab-separated columns, got {len(columns)}",
                line_number,
            )
        rows.append((line_number, columns))

    if rows:
        sentences.append(_build_sentence(rows, lang, annotated, repair_roots))

    logger.debug(f"Read {len(sentences)} sentences from {source or 'stream'}")
    return Treebank(sentences=tuple(sentences), source=source)


def format_sentence(sentence: Sentence) -> str:
    """Canonical CoNLL-X block for one sentence, blank line included."""
    lines = []
    for token in sentence.tokens:
        columns = [
            str(token.id),
            token.form or EMPTY,
            token.lemma,
            token.cpostag,
            token.postag,
            token.feats,
            str(token.head),
            token.deprel,
            EMPTY,
            EMPTY,
        ]
        lines.append("\t".join(columns))
    return "\n".join(lines) + "\n\n"


def write_treebank(treebank: Treebank) -> str:
    """Emit canonical CoNLL-X text: tabs, "_" for empty, blank line after each sentence."""
    return "".join(format_sentence(sentence) for sentence in treebank.sentences)


def read_treebank_file(
    path: Union[str, Path],
    lang: Optional[str] = None,
    annotated: bool = True,
    repair_roots: bool = False,
) -> Treebank:
    """Read a UTF-8 CoNLL-X file."""
    path = Path(path)
    with path.open(encoding="utf-8") as handle:
        return read_treebank(
            handle,
            lang=lang,
            source=str(path),
            annotated=annotated,
            repair_roots=repair_roots,
        )


def write_treebank_file(treebank: Treebank, path: Union[str, Path]) -> None:
    """Write a treebank as UTF-8 with LF line endings."""
    with Path(path).open("w", encoding="utf-8", newline="\n") as handle:
        handle.write(write_treebank(treebank))
