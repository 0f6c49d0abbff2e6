"""Validate wlrgs JSON documents against the shipped schemas.

usage: validate_json.py SCHEMA_DIR DOC.json [DOC.json ...]
The schema is picked from each document's "kind".
"""
import json
import pathlib
import sys

import jsonschema


def main() -> int:
    schema_dir = pathlib.Path(sys.argv[1])
    for path in sys.argv[2:]:
        doc = json.loads(pathlib.Path(path).read_text())
        schema = json.loads((schema_dir / f"{doc['kind']}.schema.json").read_text())
        jsonschema.Draft202012Validator(schema).validate(doc)
    return 0


if __name__ == "__main__":
    sys.exit(main())
