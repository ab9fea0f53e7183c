#!/usr/bin/env python3
"""Validates a run manifest against the schema and re-checks the file checksums."""
import hashlib
import json
import pathlib
import sys

import jsonschema


def main() -> int:
    schema_path, manifest_path = map(pathlib.Path, sys.argv[1:3])
    schema = json.loads(schema_path.read_text())
    manifest = json.loads(manifest_path.read_text())
    jsonschema.validate(manifest, schema)
    for entry in manifest["files"]:
        data = (manifest_path.parent / entry["name"]).read_bytes()
        if hashlib.sha256(data).hexdigest() != entry["sha256"] or len(data) != entry["bytes"]:
            print(f"checksum mismatch: {entry['name']}")
            return 1
    rows = (manifest_path.parent / "probes.csv").read_bytes().count(b"\r\n") - 1
    if rows != manifest["accepted_steps"]:
        print(f"probes.csv has {rows} rows for {manifest['accepted_steps']} accepted steps")
        return 1
    print(f"{manifest_path}: valid")
    return 0


if __name__ == "__main__":
    sys.exit(main())
