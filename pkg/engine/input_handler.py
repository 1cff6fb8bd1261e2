# engine/input_handler.py
# Parses command-line vectors and matrix JSON files.

import json
import logging
import re
from pathlib import Path
from typing import List, Optional, Sequence, Tuple

from core.errors import MatrixFormatError, UsageError
from core.topple_matrix import ToppleMatrix, matrix_from_json

logger = logging.getLogger(__name__)


class InputHandler:
    """Turns raw CLI text into vectors and matrices, rejecting anything malformed."""

    def __init__(self):
        self.vector_pattern = re.compile(r'^[\(\[]?\s*(-?\d+(?:\s*,\s*-?\d+)*)\s*[\)\]]?$')

    def parse_vector(self, text: str, expected_length: Optional[int] = None) -> Tuple[int, ...]:
        """
        Parse "a,b,c" (optionally wrapped in parentheses or brackets).

        Args:
            text: Raw vector text from the command line
            expected_length: Required number of entries, if known

        Returns:
            Tuple of integers

        Raises:
            UsageError: If the text is not a comma-separated integer list
                or has the wrong length
        """
        if text is None:
            raise UsageError("missing vector argument")
        match = self.vector_pattern.match(text.strip())
        if not match:
            raise UsageError(f"cannot read {text!r} as a comma-separated integer vector")
        vector = tuple(int(part) for part in match.group(1).split(","))
        if expected_length is not None and len(vector) != expected_length:
            raise UsageError(f"vector {vector} has length {len(vector)}, expected {expected_length}")
        logger.debug(f"Parsed vector {vector}")
        return vector

    def parse_vectors(self, texts: Sequence[str], expected_length: Optional[int] = None) -> List[Tuple[int, ...]]:
        return [self.parse_vector(text, expected_length) for text in texts]

    def load_matrix(self, path: Optional[str]) -> ToppleMatrix:
        """
        Read a matrix from a JSON file of the form {"n": int, "rows": [[...], ...]}.

        Raises:
            UsageError: If no path was given or the file is missing
            MatrixFormatError: If the file is not valid JSON or not a square integer matrix
        """
        if not path:
            raise UsageError("--matrix PATH is required for this command")
        matrix_path = Path(path)
        if not matrix_path.exists():
            raise UsageError(f"matrix file {matrix_path} not found")
        try:
            with open(matrix_path, "r", encoding="utf-8") as f:
                data = json.load(f)
        except json.JSONDecodeError as e:
            raise MatrixFormatError(f"{matrix_path} is not valid JSON: {e}") from e
        matrix = matrix_from_json(data)
        logger.info(f"Loaded {matrix.n}x{matrix.n} matrix from {matrix_path}")
        return matrix
