import json

import pytest

TWISTED_C4 = {
    "n": 4,
    "edges": [[0, 1], [1, 2], [2, 3], [0, 3]],
    "lists": [[1, 2], [1, 2], [1, 2], [1, 2]],
    "matchings": [
        {"edge": [0, 1], "pairs": [[1, 1], [2, 2]]},
        {"edge": [1, 2], "pairs": [[1, 1], [2, 2]]},
        {"edge": [2, 3], "pairs": [[1, 1], [2, 2]]},
        {"edge": [0, 3], "pairs": [[1, 2], [2, 1]]},
    ],
}

C5 = {"n": 5, "edges": [[0, 1], [1, 2], [2, 3], [3, 4], [0, 4]]}

PATH_LISTS = {"n": 3, "edges": [[0, 1], [1, 2]], "lists": [[1, 2], [1, 2], [1, 2]]}


def _write(directory, name, document):
    path = directory / name
    path.write_text(json.dumps(document), encoding="utf-8")
    return path


@pytest.fixture
def twisted_c4_file(tmp_path):
    return _write(tmp_path, "twisted_c4.json", TWISTED_C4)


@pytest.fixture
def c5_file(tmp_path):
    return _write(tmp_path, "c5.json", C5)


@pytest.fixture
def path_lists_file(tmp_path):
    return _write(tmp_path, "path.json", PATH_LISTS)


@pytest.fixture
def twisted_c4_document():
    return json.loads(json.dumps(TWISTED_C4))


@pytest.fixture
def path_lists_document():
    return json.loads(json.dumps(PATH_LISTS))
