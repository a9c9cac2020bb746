#!/usr/bin/env python3
"""Rewrite an engine JSON file with one term or rule per line."""
import json
import sys


def dump(doc):
    out = ['{', '  "variables": [']
    vs = []
    for v in doc["variables"]:
        terms = ",\n".join("        " + json.dumps(t, separators=(", ", ": ")).replace("{", "{ ", 1)[:-1] + " }"
                           for t in v["terms"])
        vs.append('    {\n'
                  f'      "name": {json.dumps(v["name"])},\n'
                  f'      "universe": {json.dumps(v["universe"])},\n'
                  f'      "unit": {json.dumps(v["unit"])},\n'
                  '      "terms": [\n' + terms + '\n      ]\n    }')
    out.append(",\n".join(vs))
    out.append('  ],')
    out.append('  "layers": [')
    ls = []
    for layer in doc["layers"]:
        rules = ",\n".join("        " + json.dumps(r, separators=(", ", ": ")) for r in layer["rules"])
        ls.append('    {\n'
                  f'      "name": {json.dumps(layer["name"])},\n'
                  '      "rules": [\n' + rules + '\n      ]\n    }')
    out.append(",\n".join(ls))
    out.append('  ]')
    out.append('}')
    return "\n".join(out) + "\n"


if __name__ == "__main__":
    path = sys.argv[1]
    with open(path) as f:
        doc = json.load(f)
    text = dump(doc)
    assert json.loads(text) == doc
    with open(path, "w") as f:
        f.write(text)
