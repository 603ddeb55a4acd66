"""
Reads and writes cap files (format "capset v1").

capset v1
dim <n>
<size>
<n digits per point, ascending index>
"""

import os

from capatlas.engine.geometry import CapSet, coords_of, index_of, is_cap
from capatlas.models.exceptions import CapFileException

HEADER = "capset v1"


def dumps(cap):
    lines = [HEADER, f"dim {cap.dimension}", str(cap.size)]
    lines.extend("".join(str(value) for value in coords_of(point, cap.dimension)) for point in cap.points)
    return "\n".join(lines) + "\n"


def loads(text):
    """
    Parses cap file content.
    @param text: file content
    @return: CapSet
    """
    lines = text.splitlines()
    if not lines or lines[0].strip() != HEADER:
        raise CapFileException(f"expected header '{HEADER}'", 1)
    if len(lines) < 2 or not lines[1].startswith("dim "):
        raise CapFileException("expected 'dim <n>'", 2)
    try:
        dimension = int(lines[1][4:])
    except ValueError as exc:
        raise CapFileException(f"dimension '{lines[1][4:]}' is not a number", 2) from exc
    if len(lines) < 3:
        raise CapFileException("expected the number of points", 3)
    try:
        size = int(lines[2])
    except ValueError as exc:
        raise CapFileException(f"size '{lines[2]}' is not a number", 3) from exc
    points = []
    for line_number, line in enumerate(lines[3:], start=4):
        line = line.strip()
        if not line:
            continue
        if len(line) != dimension or any(digit not in "012" for digit in line):
            raise CapFileException(f"'{line}' is not a point of dimension {dimension}", line_number)
        point = index_of(int(digit) for digit in line)
        if points and point <= points[-1]:
            raise CapFileException(f"point '{line}' out of ascending order", line_number)
        points.append(point)
    if len(points) != size:
        raise CapFileException(f"header announces {size} points, found {len(points)}", 3)
    if not is_cap(points, dimension):
        raise CapFileException("points do not form a cap", 3)
    return CapSet.from_points(dimension, points, check=False)


def read_cap(path):
    """
    @param path: path to a cap file
    @return: CapSet
    """
    with open(path, mode="r", encoding="UTF-8") as cap_file:
        return loads(cap_file.read())


def write_cap(path, cap):
    """
    Writes atomically (temporary file, then rename).
    """
    temporary = f"{path}.tmp"
    with open(temporary, mode="w", encoding="UTF-8") as cap_file:
        cap_file.write(dumps(cap))
    os.replace(temporary, path)
